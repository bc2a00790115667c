"""Finite-SNR Monte Carlo evaluation of recorded scheme traces.

A trace stores SNR-free equation rows (transmit forms are normalized to
unit coefficient norm), so the physical receive equation at SNR ``P`` is
the stored row scaled by ``sqrt(P / active_antennas)`` plus unit-variance
noise.  Each receiver's rate is the Gaussian mutual information of its
stacked equations after zero-forcing the other receivers' symbols —
interference cancellation uses the receiver's own stored (noisy)
equations, so the cancellation cost shows up in the effective noise.
Rates are normalized per slot; the high-SNR slope of the sum rate
estimates the scheme's DoF.

The asymptotic model pins down only the DoF, not a finite-SNR decoding
strategy; unit-power Gaussian symbols with per-slot power split equally
over active antennas plus zero-forcing is the instantiation used here.

Trials are independent: trial ``t`` consumes the derived stream
``rng.split(t)``, so results are identical for any thread count.
"""

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .ledger import noise_covariance
from .numerics import DEFAULT_TOL, RngStream, logdet_capacity, numerical_rank
from .schemes import tdma_trace

__all__ = [
    "RatePoint",
    "SlopeFit",
    "fit_dof_slope",
    "receiver_rate",
    "simulate_rates",
    "snr_grid",
    "tdma_baseline",
]

LOG2_10 = math.log2(10.0)


@dataclass(frozen=True)
class RatePoint:
    """Monte Carlo rate estimate at one SNR point (bits per slot)."""

    snr_db: float
    sum_rate: float
    per_receiver: tuple
    trials: int
    stderr: float

    def __post_init__(self):
        if abs(self.sum_rate - sum(self.per_receiver)) > 1e-9:
            raise ValueError("sum_rate must equal the per-receiver total")
        if self.sum_rate < 0 or any(r < 0 for r in self.per_receiver):
            raise ValueError("rates must be nonnegative")


@dataclass(frozen=True)
class SlopeFit:
    """Least-squares line of sum rate against log2(SNR)."""

    slope: float
    intercept: float
    window_db: tuple
    residual: float
    slope_stderr: float


def snr_grid(lo_db: float, hi_db: float, step_db: float) -> list:
    """Inclusive dB grid ``lo, lo+step, ..., hi``."""
    if step_db <= 0:
        raise ValueError(f"step must be positive, got {step_db}")
    if hi_db < lo_db:
        raise ValueError(f"grid must be nondecreasing, got {lo_db}..{hi_db}")
    n = int(round((hi_db - lo_db) / step_db))
    grid = [lo_db + i * step_db for i in range(n + 1)]
    if grid[-1] < hi_db - 1e-9:
        grid.append(hi_db)
    return grid


def receiver_rate(trace, receiver: int, snr: float, tol=DEFAULT_TOL) -> float:
    """Gaussian mutual information of one receiver, in bits per slot.

    Stacks the receiver's equations at the given SNR, zero-forces the
    columns of all other receivers' symbols, and evaluates log det of
    the resulting Gaussian channel with unit-power symbols.
    """
    if snr < 0:
        raise ValueError(f"snr must be nonnegative, got {snr}")
    state = trace.states[receiver - 1]
    own = trace.targets_for(receiver)
    if not own or not state.equations or snr == 0:
        return 0.0
    ids = trace.table.ids
    rows = state.coefficient_matrix(ids)
    scale = np.array([
        math.sqrt(snr / trace.active_antennas[eq.slot])
        for eq in state.equations
    ])
    rows = rows * scale[:, None]
    own_set = set(own)
    own_idx = [i for i, s in enumerate(ids) if s in own_set]
    int_idx = [i for i, s in enumerate(ids) if s not in own_set]
    cov = noise_covariance(state.equations)
    desired = rows[:, own_idx]
    if int_idx:
        interference = rows[:, int_idx]
        rank = numerical_rank(interference, tol)
        if rank == rows.shape[0]:
            return 0.0
        u = np.linalg.svd(interference, full_matrices=True)[0]
        w = u[:, rank:].conj().T
        desired = w @ desired
        cov = w @ cov @ w.conj().T
    bits = logdet_capacity(desired, cov, 1.0)
    return max(bits, 0.0) / trace.total_slots


def _trial_matrix(builder, stream, snrs, k):
    trace = builder(stream)
    out = np.empty((len(snrs), k))
    for gi, snr in enumerate(snrs):
        for r in range(1, k + 1):
            out[gi, r - 1] = receiver_rate(trace, r, snr)
    return out


def simulate_rates(builder, snr_grid_db, trials: int, rng: RngStream,
                   threads=None) -> list:
    """Average per-receiver rates of a scheme over seeded trials.

    ``builder`` maps an RNG stream to a scheme trace; one trace per
    trial is shared by every grid point (common random numbers), which
    removes most of the trial noise from slope estimates.
    """
    if trials < 1:
        raise ValueError(f"need at least one trial, got {trials}")
    grid = list(snr_grid_db)
    if not grid:
        raise ValueError("the SNR grid must be nonempty")
    snrs = [10.0 ** (db / 10.0) for db in grid]
    k = builder(rng.split(0)).k
    results = np.empty((trials, len(grid), k))

    def run(t):
        return _trial_matrix(builder, rng.split(t), snrs, k)

    if threads and threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            for t, mat in enumerate(pool.map(run, range(trials))):
                results[t] = mat
    else:
        for t in range(trials):
            results[t] = run(t)
    points = []
    for gi, db in enumerate(grid):
        per = results[:, gi, :].mean(axis=0)
        sums = results[:, gi, :].sum(axis=1)
        stderr = float(sums.std(ddof=1) / math.sqrt(trials)) if trials > 1 else 0.0
        points.append(RatePoint(
            snr_db=float(db),
            sum_rate=float(per.sum()),
            per_receiver=tuple(float(x) for x in per),
            trials=trials,
            stderr=stderr,
        ))
    return points


def tdma_baseline(k: int, snr_grid_db, trials: int, rng: RngStream,
                  threads=None) -> list:
    """Round-robin single-user rates; the sum-rate slope is 1."""
    return simulate_rates(lambda s: tdma_trace(k, s), snr_grid_db, trials,
                          rng, threads=threads)


def fit_dof_slope(points, window_db=(40.0, 60.0)) -> SlopeFit:
    """Least-squares sum-rate slope against log2(SNR) inside a dB window.

    The slope estimates the DoF; below roughly 40 dB the constant terms
    of the rate expression still bend the curve.
    """
    lo, hi = window_db
    inside = [p for p in points if lo - 1e-9 <= p.snr_db <= hi + 1e-9]
    if len(inside) < 3:
        raise ValueError(
            f"need at least 3 rate points inside {window_db}, got {len(inside)}")
    x = np.array([p.snr_db * LOG2_10 / 10.0 for p in inside])
    y = np.array([p.sum_rate for p in inside])
    slope, intercept = np.polyfit(x, y, 1)
    fitted = slope * x + intercept
    resid = y - fitted
    rms = float(np.sqrt(np.mean(resid ** 2)))
    n = len(inside)
    sxx = float(np.sum((x - x.mean()) ** 2))
    if n > 2 and sxx > 0:
        stderr = math.sqrt(float(np.sum(resid ** 2)) / (n - 2) / sxx)
    else:
        stderr = 0.0
    return SlopeFit(
        slope=float(slope),
        intercept=float(intercept),
        window_db=(float(lo), float(hi)),
        residual=rms,
        slope_stderr=stderr,
    )
