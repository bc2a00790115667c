"""
Scheme accounting
=================

Every scheme is a chain of phases: phase j consumes order-j symbols
(wanted by j receivers at once), spends slots broadcasting them, and
turns the overheard side information into order-(j+1) symbols for the
next phase.  The DoF is just delivered symbols over slots, and both
counts are exact integers.
"""

from fractions import Fraction

from delayedcsit import (
    RngStream,
    dof_square,
    harmonic,
    run_mat23_suboptimal,
    run_opt23,
    run_order_j_delivery,
    run_square_scheme,
)

rng = RngStream(2023)


def report(trace, expected):
    print(f"{trace.name}  (M={trace.m}, K={trace.k})")
    print(f"  {'phase':>5} {'runs':>4} {'consumed':>8} {'slots':>5} {'emitted':>7}")
    for p in trace.phases:
        print(f"  {p.level:>5} {p.runs:>4} {p.inputs_consumed:>8} "
              f"{p.slots:>5} {p.outputs_generated:>7}")
    print(f"  replication per phase: {trace.replication}")
    print(f"  {trace.symbols_delivered} symbols / {trace.total_slots} slots "
          f"= {trace.empirical_dof} (expected {expected})")
    assert trace.empirical_dof == expected
    assert trace.decode_ok()
    print()


# The square chain: as many antennas as receivers.  Each phase-1 run is
# replicated so that phase outputs exactly feed the next phase's input
# quota -- the replication factors are the smallest integers that work.
for k in range(1, 5):
    report(run_square_scheme(k, rng.split(k)), k / harmonic(k))

# Two antennas, three receivers: phase 1 is antenna-limited, so each
# pair of order-1 runs needs extra slots and emits purified
# combinations.  The chain gives 24/17; the best known scheme for this
# geometry (below) does better.
report(run_mat23_suboptimal(rng.split(10)), Fraction(24, 17))

# The hand-crafted (2,3) scheme: three pair-slots plus two broadcast
# slots deliver 12 symbols in 8 slots.
report(run_opt23(rng.split(11)), Fraction(3, 2))

# Order-2 delivery alone (the tail of a chain) is also a scheme.
report(run_order_j_delivery(2, 3, 2, rng.split(12)), dof_square(3, 2))
