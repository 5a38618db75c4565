"""Concrete group arithmetic for the two supported families.

BS(1,k) elements are pairs (u, r) with u in Z[1/k], r in Z, multiplying as

    (u1, r1) * (u2, r2) = (u1 + u2 * k^-r1, r1 + r2).

Wreath products A wr Z (A = Z^m + Z_{n_1} + ... + Z_{n_s}) are modelled as
pairs (p, x) with p a Laurent polynomial over A and x the shift:

    (p1, x1) * (p2, x2) = (p1 + t^x1 * p2, x1 + x2),

the upper-triangular 2x2 matrix model [[t^x, p], [0, 1]].
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .rings import LaurentPoly, RElem, ZkFrac


@dataclass(frozen=True)
class GroupSpec:
    """Tagged description of the ambient group: BS(1,k) or A wr Z."""

    kind: str  # "bs" | "wreath"
    k: int = 0
    free_rank: int = 0
    torsion: tuple[int, ...] = ()

    @staticmethod
    def bs(k: int) -> "GroupSpec":
        if k < 1:
            raise ValueError("k must be >= 1")
        return GroupSpec(kind="bs", k=k)

    @staticmethod
    def wreath(free_rank: int, torsion=()) -> "GroupSpec":
        torsion = tuple(int(n) for n in torsion)
        if free_rank < 0 or any(n < 2 for n in torsion):
            raise ValueError("free rank must be >= 0 and torsion orders >= 2")
        return GroupSpec(kind="wreath", free_rank=free_rank, torsion=torsion)

    # -- component bookkeeping (wreath) --

    @property
    def n_components(self) -> int:
        return self.free_rank + len(self.torsion)

    def component_modulus(self, idx: int) -> int | None:
        """None for a Z component, n for a Z_n component."""
        if idx < self.free_rank:
            return None
        return self.torsion[idx - self.free_rank]

    def generator_names(self) -> list[str]:
        if self.kind == "bs":
            return ["a", "b"]
        names = ["t"]
        names += [f"a{i + 1}" for i in range(self.free_rank)]
        names += [f"c{j + 1}" for j in range(len(self.torsion))]
        if self.n_components == 1:
            names.append("a")  # convenience alias for the single lamp generator
        return names

    def render(self) -> str:
        if self.kind == "bs":
            return f"group BS {self.k}"
        parts = [f"Z^{self.free_rank}"] + [f"Z_{n}" for n in self.torsion]
        return "group wreath " + " x ".join(parts)


@dataclass(frozen=True)
class BsElement:
    u: ZkFrac
    r: int


@dataclass(frozen=True)
class WreathElement:
    poly: LaurentPoly
    shift: int


def identity(spec: GroupSpec):
    if spec.kind == "bs":
        return BsElement(ZkFrac.zero(spec.k), 0)
    return WreathElement(LaurentPoly.zero(spec.free_rank, spec.torsion), 0)


def _unit_relem(spec: GroupSpec, component: int) -> RElem:
    m, orders = spec.free_rank, spec.torsion
    free = tuple(1 if i == component else 0 for i in range(m))
    tors = tuple(1 if m + j == component else 0 for j in range(len(orders)))
    return RElem.make(free, tors, orders)


def generator(spec: GroupSpec, name: str):
    if spec.kind == "bs":
        if name == "a":
            return BsElement(ZkFrac.integer(1, spec.k), 0)
        if name == "b":
            return BsElement(ZkFrac.zero(spec.k), 1)
        raise KeyError(name)
    if name == "t":
        return WreathElement(LaurentPoly.zero(spec.free_rank, spec.torsion), 1)
    if name == "a" and spec.n_components == 1:
        comp = 0
    elif name.startswith("a") and name[1:].isdigit():
        comp = int(name[1:]) - 1
        if not 0 <= comp < spec.free_rank:
            raise KeyError(name)
    elif name.startswith("c") and name[1:].isdigit():
        comp = spec.free_rank + int(name[1:]) - 1
        if not spec.free_rank <= comp < spec.n_components:
            raise KeyError(name)
    else:
        raise KeyError(name)
    poly = LaurentPoly.make([(0, _unit_relem(spec, comp))], spec.free_rank, spec.torsion)
    return WreathElement(poly, 0)


def mul(spec: GroupSpec, g, h):
    if spec.kind == "bs":
        return BsElement(g.u + h.u.scale_kpow(-g.r), g.r + h.r)
    return WreathElement(g.poly + h.poly.shift(g.shift), g.shift + h.shift)


def inv(spec: GroupSpec, g):
    if spec.kind == "bs":
        return BsElement((-g.u).scale_kpow(g.r), -g.r)
    return WreathElement((-g.poly).shift(-g.shift), -g.shift)


def power(spec: GroupSpec, g, e: int):
    if e < 0:
        return power(spec, inv(spec, g), -e)
    acc = identity(spec)
    for _ in range(e):
        acc = mul(spec, acc, g)
    return acc


def eval_word(spec: GroupSpec, word, assignment: dict):
    """Evaluate a word (sequence of (name, exponent) letters) left to right.

    Names are looked up in assignment first, then among the generators.
    """
    acc = identity(spec)
    for name, exp in word:
        if name in assignment:
            base = assignment[name]
        else:
            base = generator(spec, name)
        acc = mul(spec, acc, power(spec, base, exp))
    return acc


def verify_witness(system, assignment: dict) -> bool:
    """Check a candidate assignment against every equation of the system.

    Exact arithmetic, no approximation.  system needs .spec and
    .equations (pairs of words).
    """
    spec = system.spec
    for lhs, rhs in system.equations:
        gl = eval_word(spec, lhs, assignment)
        gr = eval_word(spec, rhs, assignment)
        if gl != gr:
            return False
    return True


# ---------------------------------------------------------------------------
# Canonical element text (used in reports and by --verify-only)


def render_element(spec: GroupSpec, g) -> str:
    if spec.kind == "bs":
        return f"{g.u.render()} | {g.r}"
    return f"{g.poly.render()} | {g.shift}"


def parse_element(spec: GroupSpec, text: str):
    """Inverse of render_element."""
    left, sep, right = text.rpartition("|")
    if not sep:
        raise ValueError(f"bad element text: {text!r}")
    left = left.strip()
    last = int(right.strip())
    if spec.kind == "bs":
        if "*" in left:
            z_text, kpow = left.split("*")
            base, _, depth = kpow.partition("^-")
            if int(base) != spec.k:
                raise ValueError(f"element base {base} does not match k={spec.k}")
            u = ZkFrac.make(int(z_text), int(depth), spec.k)
        else:
            u = ZkFrac.integer(int(left), spec.k)
        return BsElement(u, last)
    if not (left.startswith("{") and left.endswith("}")):
        raise ValueError(f"bad polynomial text: {left!r}")
    body = left[1:-1].strip()
    items = []
    if body:
        for chunk in _split_top(body):
            d_text, _, c_text = chunk.partition(":")
            items.append((int(d_text), _parse_relem(spec, c_text.strip())))
    poly = LaurentPoly.make(items, spec.free_rank, spec.torsion)
    return WreathElement(poly, last)


def _split_top(body: str) -> list[str]:
    out, depth, cur = [], 0, []
    for ch in body:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == "," and depth == 0:
            out.append("".join(cur).strip())
            cur = []
        else:
            cur.append(ch)
    if cur:
        out.append("".join(cur).strip())
    return out


def _parse_relem(spec: GroupSpec, text: str) -> RElem:
    m, orders = spec.free_rank, spec.torsion
    if text.startswith("("):
        vals = [int(v) for v in text[1:-1].split(",")]
    else:
        vals = [int(text)]
    if len(vals) != m + len(orders):
        raise ValueError(f"coefficient {text!r} has wrong component count")
    return RElem.make(vals[:m], vals[m:], orders)
