"""
Two-user scheme, slot by slot
=============================

The smallest interesting case: two single-antenna receivers, two
transmit antennas, channel state known only after the fact.  Three
slots deliver four symbols (DoF 4/3) because the transmitter can
rebroadcast what each receiver overheard about the other's symbols.
"""

from delayedcsit import RngStream, alignment_ranks, run_square_scheme

trace = run_square_scheme(2, RngStream(7))
table = trace.table

print("symbols and owners")
for sym in table.symbols:
    owner = ",".join(str(r) for r in sorted(sym.owner))
    print(f"  symbol {sym.id} ({sym.label}) -> wanted by receiver(s) {owner}")


def fmt(form):
    parts = []
    for s, c in sorted(form.coeffs.items()):
        parts.append(f"({c.real:+.2f}{c.imag:+.2f}j)*x{s}")
    return " + ".join(parts) if parts else "0"


# Slot 1 sends receiver 1's two symbols on two antennas, slot 2 does the
# same for receiver 2, and slot 3 broadcasts one linear combination that
# each receiver can subtract its own overheard slot from.
for slot in range(trace.total_slots):
    print()
    print(f"slot {slot}: {len(trace.plans[slot])} antenna(s) active")
    for a, form in enumerate(trace.plans[slot]):
        print(f"  antenna {a} sends {fmt(form)}")
    for state in trace.states:
        eq = state.equations[slot]
        print(f"  receiver {state.receiver} hears {fmt(eq.form)}")

# After slot 3, receiver 1 has three equations in four unknowns, but the
# two interference symbols only ever appear in one combined direction:
# the interference occupies rank 1, the desired symbols rank 2.
desired_rank, interference_rank = alignment_ranks(trace)
print()
print(f"receiver 1 desired-signal rank     : {desired_rank} (needs 2)")
print(f"receiver 1 interference rank       : {interference_rank} (aligned to 1)")

print(f"every receiver decodes its symbols : {trace.decode_ok()}")
print(f"symbols delivered / slots used     : "
      f"{trace.symbols_delivered}/{trace.total_slots}"
      f" = {trace.empirical_dof} DoF")
print(f"equation matrix condition numbers  : "
      f"{['%.1f' % c for c in trace.condition_numbers()]}")
