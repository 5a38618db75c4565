#!/usr/bin/env python3
"""Centralizers and lamp transport in the lamplighter group Z_2 wr Z.

Generators: t shifts the lamplighter, a toggles the lamp at the current
position.  An element is a finite set of lit lamps plus a shift.
"""

from groupeq.frontend import parse_system
from groupeq.decide import Budget, decide
from groupeq.groups import eval_word, inv, mul, render_element

HEADER = "group wreath Z^0 x Z_2"


def run(eqs):
    sys_ = parse_system(HEADER + "\n" + eqs + "\n")
    return sys_, decide(sys_, Budget())


# Commuting with a alone allows any pure lamp configuration (the base is
# abelian), but commuting with t as well forces the configuration to be
# shift invariant, so only the identity survives.
sys_, rep = run("X a = a X\nX t = t X")
print("commutes with both a and t:", rep.status)
if rep.status == "sat":
    print("  X =", render_element(sys_.spec, rep.witness["X"]))

sys_, rep = run("X a X^-1 = t a t^-1")
print("transport lamp 0 to lamp 1:", rep.status)
if rep.status == "sat":
    x = rep.witness["X"]
    print("  X =", render_element(sys_.spec, x))
    spec = sys_.spec
    a = eval_word(spec, (("a", 1),), {})
    t = eval_word(spec, (("t", 1),), {})
    lhs = mul(spec, mul(spec, x, a), inv(spec, x))
    rhs = mul(spec, mul(spec, t, a), inv(spec, t))
    print("  check: X a X^-1 =", render_element(sys_.spec, lhs),
          " t a t^-1 =", render_element(sys_.spec, rhs))

# No square roots of a single lamp: a square with zero shift doubles every
# lamp coefficient, and doubling kills everything mod 2; a square with
# nonzero shift never has zero shift.  The certificate pins this down.
sys_, rep = run("X^2 = a")
print("square root of one lamp:", rep.status)
print("  certificate kind:", rep.certificate["kind"])

# Over Z_3 lamps the same equation flips to sat: 2 is invertible mod 3.
sys_ = parse_system("group wreath Z^0 x Z_3\nX^2 = a\n")
rep = decide(sys_, Budget())
print("same equation over Z_3 lamps:", rep.status,
      "with X =", render_element(sys_.spec, rep.witness["X"]))
