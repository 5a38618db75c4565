#!/usr/bin/env python3
"""Which powers of a have square roots in BS(1,2)?

Walks X^2 = a^n for n = 1..8 and prints the verdict plus the witness or
the refutation kind.  In BS(1,2) the element a^n is (n, 0) and a square
(u, s)^2 with s = 0 is (2u, 0), so odd n forces u = n/2 which only lies
in Z[1/2]... and that is exactly why every odd n here is sat too: n/2 is
a dyadic rational.  The interesting failures need a nonzero shift, see
the conjugation instances at the bottom.
"""

from groupeq.frontend import parse_system
from groupeq.decide import Budget, decide
from groupeq.groups import render_element, verify_witness


def solve(text):
    sys_ = parse_system(text)
    rep = decide(sys_, Budget())
    return sys_, rep


print("square roots of a^n in BS(1,2)")
print()
for n in range(1, 9):
    sys_, rep = solve(f"group BS 2\nX^2 = a^{n}\n")
    if rep.status == "sat":
        assert verify_witness(sys_, rep.witness)
        x = render_element(sys_.spec, rep.witness["X"])
        print(f"  a^{n}: sat, X = {x}")
    else:
        print(f"  a^{n}: {rep.status} ({rep.certificate['kind']})")

print()
print("conjugation power instances: X^-1 a X = a^n asks whether")
print("multiplication by n is a power of multiplication by 2")
print()
for n in (2, 3, 4, 5, 8, 16, 17):
    sys_, rep = solve(f"group BS 2\nX^-1 a X = a^{n}\n")
    if rep.status == "sat":
        x = render_element(sys_.spec, rep.witness["X"])
        print(f"  n={n:3d}: sat, X = {x}")
    else:
        chain = rep.certificate.get("chain")
        print(f"  n={n:3d}: unsat, refuted mod {chain}")
