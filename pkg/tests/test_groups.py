import random
from fractions import Fraction

from groupeq.groups import (
    BsElement,
    GroupSpec,
    WreathElement,
    eval_word,
    generator,
    identity,
    inv,
    mul,
    parse_element,
    power,
    render_element,
    verify_witness,
)
from groupeq.frontend import parse_system
from groupeq.rings import LaurentPoly, RElem, ZkFrac

BS2 = GroupSpec.bs(2)
BS3 = GroupSpec.bs(3)
LAMP = GroupSpec.wreath(0, (2,))
ZWR = GroupSpec.wreath(1)
MIXED = GroupSpec.wreath(1, (2,))

FAMILIES = [BS2, BS3, LAMP, ZWR, MIXED]


def _rand_bs(rng, spec):
    u = ZkFrac.make(rng.randint(-20, 20), rng.randint(0, 3), spec.k)
    return BsElement(u, rng.randint(-4, 4))


def _rand_wreath(rng, spec):
    m, orders = spec.free_rank, spec.torsion
    items = []
    for _ in range(rng.randint(0, 3)):
        free = [rng.randint(-5, 5) for _ in range(m)]
        tors = [rng.randrange(o) for o in orders]
        items.append((rng.randint(-3, 3), RElem.make(free, tors, orders)))
    return WreathElement(LaurentPoly.make(items, m, orders), rng.randint(-3, 3))


def rand_element(rng, spec):
    return _rand_bs(rng, spec) if spec.kind == "bs" else _rand_wreath(rng, spec)


def test_mul_bs_worked_example():
    g = BsElement(ZkFrac.integer(1, 2), 1)
    h = BsElement(ZkFrac.integer(1, 2), -1)
    prod = mul(BS2, g, h)
    assert prod == BsElement(ZkFrac.make(3, 1, 2), 0)


def test_mul_identity_is_neutral():
    rng = random.Random(5)
    for spec in FAMILIES:
        e = identity(spec)
        for _ in range(50):
            g = rand_element(rng, spec)
            assert mul(spec, g, e) == g
            assert mul(spec, e, g) == g


def test_mul_lamp_squares_cancel():
    a = generator(LAMP, "a")
    assert mul(LAMP, a, a) == identity(LAMP)


def test_inv_bs_formula():
    rng = random.Random(11)
    for spec in (BS2, BS3):
        for _ in range(100):
            g = rand_element(rng, spec)
            gi = inv(spec, g)
            assert gi.r == -g.r
            assert gi.u == (-g.u).scale_kpow(g.r)
            assert mul(spec, g, gi) == identity(spec)
            assert mul(spec, gi, g) == identity(spec)


def test_inv_identity():
    for spec in FAMILIES:
        assert inv(spec, identity(spec)) == identity(spec)


def test_inv_wreath_worked_example():
    # (p = t^2, x = 1)^{-1} = (p = -t^1, x = -1) in Z wr Z
    g = WreathElement(
        LaurentPoly.make([(2, RElem.make([1], [], ()))], 1, ()), 1
    )
    gi = inv(ZWR, g)
    assert gi.shift == -1
    assert gi.poly == LaurentPoly.make([(1, RElem.make([-1], [], ()))], 1, ())
    assert mul(ZWR, g, gi) == identity(ZWR)


def test_group_axioms_randomized():
    rng = random.Random(19)
    for spec in FAMILIES:
        for _ in range(300):
            g, h, k = (rand_element(rng, spec) for _ in range(3))
            assert mul(spec, mul(spec, g, h), k) == mul(spec, g, mul(spec, h, k))
            assert mul(spec, g, inv(spec, g)) == identity(spec)


def test_bs_defining_relation():
    for k in (2, 3, 5):
        spec = GroupSpec.bs(k)
        lhs = eval_word(spec, [("b", -1), ("a", 1), ("b", 1)], {})
        rhs = eval_word(spec, [("a", k)], {})
        assert lhs == rhs
        assert lhs == BsElement(ZkFrac.integer(k, k), 0)


def test_eval_word_variable_lookup():
    rng = random.Random(23)
    for spec in FAMILIES:
        g = rand_element(rng, spec)
        assert eval_word(spec, [("X", 1)], {"X": g}) == g


def test_eval_word_conjugation_scales_by_power_of_k():
    for r in range(-3, 4):
        x = BsElement(ZkFrac.zero(2), r)
        out = eval_word(BS2, [("X", -1), ("a", 1), ("X", 1)], {"X": x})
        assert out == BsElement(ZkFrac.from_fraction(Fraction(2) ** r, 2), 0)


def test_eval_word_is_a_homomorphism_on_concatenation():
    rng = random.Random(29)
    for spec in FAMILIES:
        names = spec.generator_names()
        for _ in range(100):
            w1 = [(rng.choice(names), rng.randint(-3, 3)) for _ in range(3)]
            w2 = [(rng.choice(names), rng.randint(-3, 3)) for _ in range(3)]
            lhs = eval_word(spec, w1 + w2, {})
            rhs = mul(spec, eval_word(spec, w1, {}), eval_word(spec, w2, {}))
            assert lhs == rhs


def test_wreath_mul_matches_two_by_two_matrices():
    # [[t^x1, P1],[0,1]] * [[t^x2, P2],[0,1]] = [[t^(x1+x2), t^x1 P2 + P1],[0,1]]
    rng = random.Random(31)
    for spec in (LAMP, ZWR, MIXED):
        for _ in range(150):
            g, h = rand_element(rng, spec), rand_element(rng, spec)
            prod = mul(spec, g, h)
            assert prod.shift == g.shift + h.shift
            assert prod.poly == h.poly.shift(g.shift) + g.poly


def test_power_agrees_with_repeated_mul():
    rng = random.Random(37)
    for spec in FAMILIES:
        for _ in range(60):
            g = rand_element(rng, spec)
            n = rng.randint(-5, 5)
            acc = identity(spec)
            step = g if n >= 0 else inv(spec, g)
            for _ in range(abs(n)):
                acc = mul(spec, acc, step)
            assert power(spec, g, n) == acc


def test_verify_witness_worked_examples():
    s = parse_system("group BS 2\nX^2 = a^3")
    assert verify_witness(s, {"X": BsElement(ZkFrac.make(3, 1, 2), 0)})
    s2 = parse_system("group BS 2\nX = a")
    assert not verify_witness(s2, {"X": identity(BS2)})
    s3 = parse_system("group wreath Z^0 x Z_2\nX a = a X")
    p = LaurentPoly.make(
        [(0, RElem.make([], [1], (2,))), (1, RElem.make([], [1], (2,)))], 0, (2,)
    )
    assert verify_witness(s3, {"X": WreathElement(p, 0)})


def test_render_parse_element_round_trip():
    rng = random.Random(41)
    for spec in FAMILIES:
        for _ in range(200):
            g = rand_element(rng, spec)
            assert parse_element(spec, render_element(spec, g)) == g


def test_generator_names_by_family():
    assert BS2.generator_names() == ["a", "b"]
    assert LAMP.generator_names() == ["t", "c1", "a"]
    assert set(ZWR.generator_names()) == {"t", "a1", "a"}
    assert "a1" in MIXED.generator_names() and "c1" in MIXED.generator_names()
