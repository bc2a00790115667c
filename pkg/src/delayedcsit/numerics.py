"""Complex dense linear algebra, rank decisions, and reproducible sampling.

Everything downstream (symbol ledgers, scheme runners, rate simulation)
funnels its numerical work through this module: channel draws, SVD-based
rank tests, row-space membership, and log-det mutual information.

Matrices are plain ``numpy.ndarray`` objects with ``complex128`` dtype;
:func:`as_complex_matrix` is the validating constructor used at module
boundaries.
"""

import numbers

import numpy as np

__all__ = [
    "ComplexMatrix",
    "NumericalDomainError",
    "RankTolerance",
    "RngStream",
    "as_complex_matrix",
    "in_rowspace",
    "logdet_capacity",
    "numerical_rank",
    "sample_channel",
]

# Alias used in signatures: a validated 2-D complex128 ndarray.
ComplexMatrix = np.ndarray


class NumericalDomainError(ArithmeticError):
    """Raised when an input is outside the numerical domain of an operation
    (e.g. a noise covariance that is not Hermitian positive definite)."""


class RankTolerance:
    """Relative singular-value threshold used by every rank decision.

    A singular value counts toward the rank when it exceeds
    ``relative * max_singular_value``.  The default of ``1e-9`` is far
    above double-precision noise yet far below any plausible generic
    singular value, which is what turns the model's "almost surely full
    rank" statements into reliable boolean tests.

    Parameters
    ----------
    relative : float
        Relative threshold; must satisfy ``0 <= relative < 1``.
    """

    __slots__ = ("relative",)

    def __init__(self, relative: float = 1e-9):
        relative = float(relative)
        if not 0.0 <= relative < 1.0:
            raise ValueError(
                f"relative tolerance must lie in [0, 1), got {relative}")
        self.relative = relative

    def __repr__(self):
        return f"RankTolerance({self.relative!r})"

    def __eq__(self, other):
        return isinstance(other, RankTolerance) and self.relative == other.relative


#: Default tolerance shared by all rank decisions.
DEFAULT_TOL = RankTolerance()


class RngStream:
    """Splittable deterministic random stream.

    A stream is identified by a ``(seed, index)`` pair.  Identical pairs
    always reproduce the identical sample sequence, and distinct indices
    under the same seed are statistically independent, so parallel
    consumers (one stream per Monte Carlo trial) never share state.

    Parameters
    ----------
    seed : int
        Master seed (64-bit unsigned).
    index : int
        Stream index within the seed's family.
    """

    __slots__ = ("seed", "index", "_gen")

    def __init__(self, seed: int, index: int = 0):
        if not isinstance(seed, numbers.Integral) or seed < 0:
            raise ValueError(f"seed must be a nonnegative integer, got {seed!r}")
        if not isinstance(index, numbers.Integral) or index < 0:
            raise ValueError(f"index must be a nonnegative integer, got {index!r}")
        self.seed = int(seed)
        self.index = int(index)
        ss = np.random.SeedSequence(entropy=self.seed, spawn_key=(self.index,))
        self._gen = np.random.Generator(np.random.PCG64(ss))

    def split(self, index: int) -> "RngStream":
        """Return the independent sibling stream ``(seed, index)``."""
        return RngStream(self.seed, index)

    def standard_normal(self, shape):
        return self._gen.standard_normal(shape)

    def complex_normal(self, shape):
        """Circularly-symmetric complex Gaussian samples, CN(0, 1)."""
        re = self._gen.standard_normal(shape)
        im = self._gen.standard_normal(shape)
        return (re + 1j * im) / np.sqrt(2.0)

    def __repr__(self):
        return f"RngStream(seed={self.seed}, index={self.index})"


def as_complex_matrix(a) -> ComplexMatrix:
    """Validate and convert ``a`` to a 2-D complex128 array.

    Raises
    ------
    ValueError
        If the input is not two-dimensional or contains NaN/Inf entries.
    """
    m = np.asarray(a, dtype=np.complex128)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-D matrix, got ndim={m.ndim}")
    if not (np.all(np.isfinite(m.real)) and np.all(np.isfinite(m.imag))):
        raise ValueError("matrix entries must be finite")
    return m


def sample_channel(k_rx: int, m_tx: int, rng: RngStream) -> ComplexMatrix:
    """Draw one channel matrix with i.i.d. CN(0, 1) entries.

    Row ``r`` holds the (conjugated) channel vector of receiver ``r`` for
    the current slot, so the noiseless observation of receiver ``r`` is
    ``H[r, :] @ x``.  Entries are independent over receivers, antennas,
    and (across calls) time.

    Parameters
    ----------
    k_rx : int
        Number of receivers (rows), at least 1.
    m_tx : int
        Number of transmit antennas (columns), at least 1.
    rng : RngStream
        Source of randomness.

    Returns
    -------
    numpy.ndarray
        A ``k_rx x m_tx`` complex matrix.
    """
    if k_rx < 1 or m_tx < 1:
        raise ValueError(
            f"channel dimensions must be positive, got {k_rx}x{m_tx}")
    return rng.complex_normal((k_rx, m_tx))


def haar_unitary(n: int, rng: RngStream) -> ComplexMatrix:
    """Draw an ``n x n`` unitary matrix from the Haar distribution.

    QR of a complex Gaussian matrix with the R-diagonal phases folded
    back into Q.  Used for mixing weights: Haar rows are as generic as
    raw Gaussian rows (every rank event that holds almost surely for one
    holds for the other) but keep the mixtures well conditioned, which
    matters for finite-SNR rates.
    """
    if n < 1:
        raise ValueError(f"unitary size must be positive, got {n}")
    z = rng.complex_normal((n, n))
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))


def numerical_rank(a, tol: RankTolerance = DEFAULT_TOL) -> int:
    """Number of singular values above ``tol.relative`` times the largest.

    Returns 0 for a matrix whose largest singular value is exactly zero.
    """
    a = as_complex_matrix(a)
    if a.size == 0:
        return 0
    s = np.linalg.svd(a, compute_uv=False)
    if s[0] == 0.0:
        return 0
    return int(np.count_nonzero(s > tol.relative * s[0]))


def in_rowspace(a, v, tol: RankTolerance = DEFAULT_TOL) -> bool:
    """True iff row vector ``v`` lies in the row space of ``a``.

    Decided by comparing ``numerical_rank(a)`` with the rank of ``a``
    stacked on top of ``v``; appending a vector already in the span
    cannot raise the rank.
    """
    a = as_complex_matrix(a)
    v = np.asarray(v, dtype=np.complex128).ravel()
    if v.shape[0] != a.shape[1]:
        raise ValueError(
            f"vector length {v.shape[0]} does not match {a.shape[1]} columns")
    stacked = np.vstack([a, v[np.newaxis, :]])
    return numerical_rank(stacked, tol) == numerical_rank(a, tol)


def logdet_capacity(g, noise_cov, power_per_symbol: float) -> float:
    """Mutual information of the linear Gaussian system ``y = g x + z``.

    Computes ``log2 det(I + power_per_symbol * noise_cov^-1 g g^H)`` in
    bits, for i.i.d. Gaussian inputs of per-symbol power
    ``power_per_symbol`` and noise covariance ``noise_cov``.

    Parameters
    ----------
    g : array_like
        Effective channel matrix (observations x symbols).
    noise_cov : array_like
        Hermitian positive-definite noise covariance (observations x
        observations).
    power_per_symbol : float
        Transmit power per input symbol; must be nonnegative.

    Raises
    ------
    NumericalDomainError
        If ``noise_cov`` is not Hermitian positive definite.
    """
    g = as_complex_matrix(g)
    noise_cov = as_complex_matrix(noise_cov)
    if power_per_symbol < 0:
        raise ValueError("power_per_symbol must be nonnegative")
    n = noise_cov.shape[0]
    if noise_cov.shape[1] != n or g.shape[0] != n:
        raise ValueError("noise covariance must be square and match g's rows")
    if not np.allclose(noise_cov, noise_cov.conj().T, atol=1e-12 * max(1.0, np.abs(noise_cov).max())):
        raise NumericalDomainError("noise covariance is not Hermitian")
    try:
        chol = np.linalg.cholesky(noise_cov)
    except np.linalg.LinAlgError as exc:
        raise NumericalDomainError(
            "noise covariance is not positive definite") from exc
    # Whiten: y' = L^-1 y has identity noise covariance.
    gw = np.linalg.solve(chol, g)
    k = gw.shape[1]
    gram = np.eye(k, dtype=np.complex128) + power_per_symbol * (gw.conj().T @ gw)
    sign, logdet = np.linalg.slogdet(gram)
    if sign.real <= 0:
        raise NumericalDomainError("log-det argument is not positive definite")
    return float(logdet / np.log(2.0))
