"""Recombine one vanishing cycle along a Moore space and watch which
characteristics kill symplectic cohomology.

With q = 6 the reduced cohomology of U_- is nonzero exactly over fields of
characteristic 2 or 3, so those are the only fields where the twisted
cycle grows and the hull inequality forces HW to vanish.
"""

from homrecomb.linalg import CoeffField
from homrecomb.recombination import (
    LefschetzDescription,
    UMinusSpec,
    recombine,
    run_cascade,
    sh_verdict,
    u_minus_cohomology,
)

original = LefschetzDescription.from_cycles("M", 4, ["V1"], sh_known={"*": "nonvanishes"})
u = UMinusSpec("moore", 6, 6)
rec = recombine(original, 2, u)

print("recombined cycles:")
for c in rec.cycles:
    print("  ", c)
print(f"complexity ledger {original.ledger.bound} -> {rec.ledger.bound}\n")

for p in (0, 2, 3, 5, 7):
    k = CoeffField(p)
    v = sh_verdict(original, 2, u, k)
    cascade = run_cascade(rec, k).status
    print(f"char {p}: H~(U-) = {u_minus_cohomology(u, k)}  ->  {v.kind} "
          f"(cascade: {cascade})")
    if v.kind == "vanishes":
        print("         because:", " > ".join(v.rule_chain))
