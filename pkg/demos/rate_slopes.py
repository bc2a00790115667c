"""
Sum rate versus SNR
===================

The DoF is the high-SNR slope of the sum rate against log2(SNR).  This
demo runs a small Monte Carlo (a few hundred seeded trials, zero-forcing
receivers) and fits the slope over 40-60 dB.  With more receivers the
delayed-CSI scheme pulls further ahead of TDMA even though neither side
ever knows the current channel.
"""

from delayedcsit import (
    RngStream,
    fit_dof_slope,
    run_square_scheme,
    simulate_rates,
    snr_grid,
    tdma_baseline,
)

GRID = snr_grid(40, 60, 5)
TRIALS = 150

runs = [
    ("square K=2", lambda s: run_square_scheme(2, s), 4 / 3),
    ("square K=3", lambda s: run_square_scheme(3, s), 18 / 11),
]

print(f"{TRIALS} trials per point, ZF receivers, common noise across SNR")
print()
curves = {}
for i, (label, builder, _) in enumerate(runs):
    curves[label] = simulate_rates(builder, GRID, TRIALS, RngStream(100 + i))
curves["tdma  K=3"] = tdma_baseline(3, GRID, TRIALS, RngStream(200))

header = f"{'SNR dB':>7}" + "".join(f"{label:>14}" for label in curves)
print(header)
for gi, db in enumerate(GRID):
    row = f"{db:>7.0f}"
    for label in curves:
        row += f"{curves[label][gi].sum_rate:>14.2f}"
    print(row)

print()
targets = {"square K=2": 4 / 3, "square K=3": 18 / 11, "tdma  K=3": 1.0}
for label, points in curves.items():
    fit = fit_dof_slope(points, window_db=(40.0, 60.0))
    target = targets[label]
    off = 100.0 * (fit.slope - target) / target
    print(f"{label}: fitted slope {fit.slope:.3f}  "
          f"(DoF target {target:.3f}, off by {off:+.1f}%)")

# The crossing story at finite SNR: the K=3 scheme spends slots on
# retransmissions, so its curves start lower but grow faster; by 40 dB
# the ordering already matches the DoF ordering.
best = max(curves, key=lambda label: curves[label][-1].sum_rate)
print(f"\nhighest sum rate at {GRID[-1]:.0f} dB: {best}")
