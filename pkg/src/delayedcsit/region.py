"""The order-1 DoF region for the full-antenna case (``m == k``).

The region is the polyhedron of per-receiver DoF tuples ``d`` with

    sum_i d_{pi(i)} / i <= 1   for every permutation ``pi`` of ``1..k``,

together with ``d >= 0``.  Membership is exact rational arithmetic
throughout.  Because the weights ``1/i`` decrease, the left-hand side is
maximized by pairing larger coordinates with earlier positions, so the
single descending-sorted assignment decides membership; the exhaustive
mode checks all ``k!`` assignments and exists to validate that argument.

Corners are the symmetric points of the support subsets,
``chi_S / H_{|S|}``, and any member point is a sub-convex combination of
the corners along its sorted coordinate chain (closed form, no LP).
"""

import math
from fractions import Fraction
from functools import lru_cache
from itertools import combinations, permutations

import numpy as np

from .dof_calc import OutOfRegimeError, harmonic

__all__ = [
    "as_point",
    "combination_value",
    "corner_candidates",
    "decompose_time_sharing",
    "in_region",
    "symmetric_corner",
    "tight_permutations",
]

_INT64_SAFE = 2 ** 62


def as_point(d) -> tuple:
    """Coerce coordinates to exact nonnegative rationals.

    Accepts ints, Fractions, floats (converted exactly), and strings
    such as ``"2/3"`` or ``"0.5"``.
    """
    pt = tuple(Fraction(x) for x in d)
    if not pt:
        raise ValueError("a region point needs at least one coordinate")
    if any(x < 0 for x in pt):
        raise ValueError(f"coordinates must be nonnegative, got {d!r}")
    return pt


def _require_square(m, k: int) -> None:
    if m is not None and m != k:
        raise OutOfRegimeError(
            f"the region is characterized for m == k only (got m={m}, k={k})")


@lru_cache(maxsize=None)
def _perm_matrix(k: int) -> np.ndarray:
    """All permutations of ``0..k-1`` as an index matrix, in
    ``itertools.permutations`` order."""
    return np.array(list(permutations(range(k))), dtype=np.intp)


def _integerize(pt):
    """Common-denominator integer view: numerators, den, weights, lcm.

    The constraint ``sum d_{pi(i)}/i <= 1`` becomes
    ``sum n_{pi(i)} * (L/i) <= den * L`` with ``L = lcm(1..k)``.
    """
    den = math.lcm(*(x.denominator for x in pt))
    nums = [int(x * den) for x in pt]
    els = math.lcm(*range(1, len(pt) + 1))
    weights = [els // i for i in range(1, len(pt) + 1)]
    return nums, den, weights, els


def in_region(d, mode: str = "sorted", m=None) -> bool:
    """Exact membership test.

    ``sorted`` evaluates only the descending-sorted assignment;
    ``exhaustive`` (``k <= 8``) evaluates all ``k!``.  The two always
    agree; the slow mode exists to check the fast one.
    """
    pt = as_point(d)
    k = len(pt)
    _require_square(m, k)
    if mode == "sorted":
        ordered = sorted(pt, reverse=True)
        return sum(x / i for i, x in enumerate(ordered, start=1)) <= 1
    if mode != "exhaustive":
        raise ValueError(f"mode must be 'sorted' or 'exhaustive', got {mode!r}")
    if k > 8:
        raise ValueError(f"exhaustive mode supports k <= 8, got k={k}")
    nums, den, weights, els = _integerize(pt)
    rhs = den * els
    if max(nums) * els * k < _INT64_SAFE:
        lhs = np.asarray(nums, dtype=np.int64)[_perm_matrix(k)] @ np.asarray(
            weights, dtype=np.int64)
        return bool(np.all(lhs <= rhs))
    return all(
        sum(a * b for a, b in zip(p, weights)) <= rhs
        for p in permutations(nums)
    )


def tight_permutations(d, m=None) -> list:
    """Permutations ``pi`` (as 1-based receiver tuples) whose constraint
    holds with equality.  Exact; ``k <= 8``."""
    pt = as_point(d)
    k = len(pt)
    _require_square(m, k)
    if k > 8:
        raise ValueError(f"tight_permutations supports k <= 8, got k={k}")
    nums, den, weights, els = _integerize(pt)
    rhs = den * els
    if max(nums) * els * k < _INT64_SAFE:
        perms = _perm_matrix(k)
        lhs = np.asarray(nums, dtype=np.int64)[perms] @ np.asarray(
            weights, dtype=np.int64)
        hits = np.nonzero(lhs == rhs)[0]
        return [tuple(int(r) + 1 for r in perms[i]) for i in hits]
    out = []
    for order in permutations(range(k)):
        if sum(nums[r] * w for r, w in zip(order, weights)) == rhs:
            out.append(tuple(r + 1 for r in order))
    return out


def symmetric_corner(k: int) -> tuple:
    """The all-equal corner ``(1/H_k, ..., 1/H_k)``; every permutation
    constraint is tight there."""
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    coord = 1 / harmonic(k)
    return (coord,) * k


def corner_candidates(k: int) -> list:
    """The origin plus ``chi_S / H_{|S|}`` for every nonempty support
    ``S``, in (size, subset) order.  ``k <= 6``."""
    if not 1 <= k <= 6:
        raise ValueError(f"corner enumeration supports 1 <= k <= 6, got {k}")
    pts = [tuple(Fraction(0) for _ in range(k))]
    for size in range(1, k + 1):
        coord = 1 / harmonic(size)
        for s in combinations(range(1, k + 1), size):
            member = frozenset(s)
            pts.append(tuple(
                coord if r in member else Fraction(0)
                for r in range(1, k + 1)))
    return pts


def decompose_time_sharing(d, m=None):
    """Write a member point as a sub-convex combination of corners.

    Sorting the coordinates descending as ``p_(1) >= ... >= p_(k)`` and
    walking the nested supports ``S_s = {sigma(1), ..., sigma(s)}``, the
    weights ``lambda_s = H_s (p_(s) - p_(s+1))`` reconstruct the point
    exactly, and their total equals the sorted constraint value — so the
    weights sum to at most 1 precisely when the point is in the region.

    Returns a list of ``(support frozenset, weight)`` pairs with the
    zero-weight entries dropped (the corner for support ``S`` is
    ``chi_S / H_{|S|}``), or None when the point is outside the region.
    An all-zero point decomposes as the empty list.
    """
    pt = as_point(d)
    k = len(pt)
    _require_square(m, k)
    order = sorted(range(k), key=lambda i: pt[i], reverse=True)
    ranked = [pt[i] for i in order]
    if sum(x / i for i, x in enumerate(ranked, start=1)) > 1:
        return None
    parts = []
    for s in range(1, k + 1):
        drop = ranked[s - 1] - (ranked[s] if s < k else Fraction(0))
        weight = harmonic(s) * drop
        if weight:
            parts.append((frozenset(i + 1 for i in order[:s]), weight))
    return parts


def combination_value(parts, k: int) -> tuple:
    """Evaluate a weighted corner combination back into coordinates."""
    coords = [Fraction(0)] * k
    for support, weight in parts:
        coord = weight / harmonic(len(support))
        for r in support:
            coords[r - 1] += coord
    return tuple(coords)
