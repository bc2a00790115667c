"""
The order-1 DoF region
======================

With as many antennas as receivers, the achievable per-receiver DoF
tuples form a polytope cut out by one inequality per receiver ordering:
sum_i d_{pi(i)} / i <= 1.  Everything here is exact rational
arithmetic, so membership answers are proofs, not approximations.
"""

from fractions import Fraction

from delayedcsit import (
    corner_candidates,
    decompose_time_sharing,
    in_region,
    symmetric_corner,
    tight_permutations,
)

# Start with three receivers.  The symmetric corner 1/H_3 = 6/11 per
# receiver saturates every one of the 3! = 6 constraints at once.
corner = symmetric_corner(3)
print(f"symmetric corner for K=3: {corner}")
print(f"member of the region    : {in_region(corner)}")
print(f"tight orderings         : {tight_permutations(corner)}")

# Nudging any coordinate up leaves the region.
outside = (Fraction(6, 11) + Fraction(1, 1000),) + corner[1:]
print(f"after a tiny push up    : in_region = {in_region(outside)}")

# The corners are the subsets: chi_S / H_|S| for every support S.  For
# K=3 that is the origin plus 7 subset corners.
print()
print("all corner points for K=3")
for pt in corner_candidates(3):
    tights = len(tight_permutations(pt))
    print(f"  {str(pt):>42}  tight in {tights} of 6 orderings")

# Any member point is a time-sharing mix of corners along its sorted
# coordinate chain; the weights are exact and sum to at most 1.
print()
pt = (Fraction(1, 2), Fraction(2, 5), Fraction(1, 5))
print(f"decomposing {pt}")
parts = decompose_time_sharing(pt)
for support, weight in parts:
    share = sorted(support)
    print(f"  run the scheme serving {share} for {weight} of the time")
print(f"  total airtime used: {sum(w for _, w in parts)} (slack is idle time)")

# For a point outside the region the decomposition does not exist.
print()
bad = (Fraction(1), Fraction(1, 2))
print(f"decomposing {bad}: {decompose_time_sharing(bad)}")

# The sorted-assignment shortcut agrees with brute force over all
# orderings -- the rearrangement inequality in action.
from itertools import product

agree = all(
    in_region(p, mode="sorted") == in_region(p, mode="exhaustive")
    for p in product([Fraction(n, 4) for n in range(5)], repeat=3)
)
print(f"sorted == exhaustive on a 5x5x5 grid: {agree}")
