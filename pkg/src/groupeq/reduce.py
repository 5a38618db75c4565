"""Rewriting word equations into exponential-linear component systems.

A BS(1,k) equation in variables X_1..X_n becomes one equation over the
atomic Z[1/k] unknowns U_i (the first coordinates) whose coefficients are
signed sums of k-power monomials with affine exponents in the second
coordinates r_i, plus one linear equation over the r_i.

A wreath equation splits per coefficient component of A into polynomial
equations over the lamp-polynomial unknowns f_i, with coefficients that are
signed sums of t-power monomials with affine exponents in the shift
variables x_i and the support offsets y_i, plus one shared linear equation
over the x_i.

The triangularization and the nonnegativity (sign) split live here too; the
downstream search procedures consume the branches this module produces.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from .frontend import EquationSystem, Word
from .groups import GroupSpec, generator
from .intlinalg import AffineForm


# ---------------------------------------------------------------------------
# Signed sums of monomials  coef * base^form


@dataclass(frozen=True)
class ExpSum:
    """Finite sum of coef * base^(affine form), coefficients in Z or Z_mod.

    The base (k for BS, t for wreath) is supplied by the consumer; this class
    only does the symbolic bookkeeping, merging terms with syntactically equal
    exponent forms.
    """

    terms: tuple[tuple[AffineForm, int], ...]
    mod: int | None = None

    @staticmethod
    def make(items, mod: int | None = None) -> "ExpSum":
        acc: dict[AffineForm, int] = {}
        for form, coef in items:
            if mod is not None:
                coef %= mod
            if coef:
                cur = acc.get(form, 0) + coef
                if mod is not None:
                    cur %= mod
                if cur:
                    acc[form] = cur
                else:
                    acc.pop(form, None)
        return ExpSum(tuple(sorted(acc.items())), mod)

    @staticmethod
    def zero(mod: int | None = None) -> "ExpSum":
        return ExpSum((), mod)

    @staticmethod
    def monomial(form: AffineForm, coef: int = 1, mod: int | None = None) -> "ExpSum":
        return ExpSum.make([(form, coef)], mod)

    def is_zero(self) -> bool:
        return not self.terms

    def __add__(self, other: "ExpSum") -> "ExpSum":
        return ExpSum.make(self.terms + other.terms, self.mod)

    def __neg__(self) -> "ExpSum":
        return ExpSum.make([(f, -c) for f, c in self.terms], self.mod)

    def __sub__(self, other: "ExpSum") -> "ExpSum":
        return self + (-other)

    def __mul__(self, other: "ExpSum") -> "ExpSum":
        items = []
        for f1, c1 in self.terms:
            for f2, c2 in other.terms:
                items.append((f1 + f2, c1 * c2))
        return ExpSum.make(items, self.mod)

    def scale(self, s: int) -> "ExpSum":
        return ExpSum.make([(f, c * s) for f, c in self.terms], self.mod)

    def shift_exp(self, form: AffineForm) -> "ExpSum":
        """Multiply by base^form."""
        return ExpSum.make([(f + form, c) for f, c in self.terms], self.mod)

    def substitute(self, env: dict[str, AffineForm]) -> "ExpSum":
        return ExpSum.make([(f.substitute(env), c) for f, c in self.terms], self.mod)

    def single(self) -> tuple[AffineForm, int] | None:
        return self.terms[0] if len(self.terms) == 1 else None

    def const_value(self) -> int | None:
        """If every exponent form is the zero form, the plain coefficient sum."""
        if not self.terms:
            return 0
        if len(self.terms) == 1 and self.terms[0][0] == AffineForm.constant(0):
            return self.terms[0][1]
        return None

    def variables(self) -> set[str]:
        out: set[str] = set()
        for f, _ in self.terms:
            out.update(f.variables())
        return out

    def min_var_coef(self, var: str) -> int:
        return min((f.coef(var) for f, _ in self.terms), default=0)

    def min_const(self) -> int:
        return min((f.const for f, _ in self.terms), default=0)

    def eval_fraction(self, k: int, env: dict[str, int]) -> Fraction:
        total = Fraction(0)
        for f, c in self.terms:
            total += c * Fraction(k) ** f.evaluate(env)
        return total

    def eval_laurent(self, env: dict[str, int]) -> dict[int, int]:
        """Concrete Laurent polynomial (degree -> coefficient) at integer env."""
        out: dict[int, int] = {}
        for f, c in self.terms:
            d = f.evaluate(env)
            v = out.get(d, 0) + c
            if self.mod is not None:
                v %= self.mod
            if v:
                out[d] = v
            else:
                out.pop(d, None)
        return out

    def render(self, base: str) -> str:
        if not self.terms:
            return "0"
        parts = []
        for f, c in self.terms:
            if f == AffineForm.constant(0):
                parts.append(f"{c:+d}")
            else:
                parts.append(f"{c:+d}*{base}^({f.render()})")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


# ---------------------------------------------------------------------------
# Component systems


@dataclass
class Row:
    """One equation  sum_u coeffs[u] * u  +  const  =  0."""

    coeffs: dict[str, ExpSum]
    const: ExpSum

    def normalized(self) -> "Row":
        return Row({u: s for u, s in self.coeffs.items() if not s.is_zero()}, self.const)

    def substitute(self, env: dict[str, AffineForm]) -> "Row":
        return Row(
            {u: s.substitute(env) for u, s in self.coeffs.items()},
            self.const.substitute(env),
        ).normalized()

    def scale(self, s: ExpSum) -> "Row":
        return Row({u: c * s for u, c in self.coeffs.items()}, self.const * s)

    def sub_scaled(self, other: "Row", factor_self: ExpSum, factor_other: ExpSum) -> "Row":
        """factor_self * self - factor_other * other."""
        out: dict[str, ExpSum] = {}
        for u, c in self.coeffs.items():
            out[u] = c * factor_self
        for u, c in other.coeffs.items():
            cur = out.get(u)
            prod = c * factor_other
            out[u] = (cur - prod) if cur is not None else -prod
        return Row(out, self.const * factor_self - other.const * factor_other).normalized()

    def render(self, base: str) -> str:
        parts = [f"({s.render(base)})*{u}" for u, s in sorted(self.coeffs.items())]
        parts.append(self.const.render(base))
        return " + ".join(parts) + " = 0"


@dataclass
class ExpLinSystem:
    """Reduced form of a BS system: exponential rows plus linear forms."""

    k: int
    rows: list[Row]
    linear: list[AffineForm]
    rvars: list[str]
    zvars: list[str]


@dataclass
class CompSystem:
    component: int
    mod: int | None
    rows: list[Row]


@dataclass
class WreathSystem:
    spec: GroupSpec
    components: list[CompSystem]
    linear: list[AffineForm]
    xvars: list[str]
    yvars: list[str]
    fvars: list[str]


def _expand(word: Word) -> list[tuple[str, int]]:
    """Flatten exponents into unit letters with sign +-1."""
    out = []
    for name, exp in word:
        step = 1 if exp > 0 else -1
        for _ in range(abs(exp)):
            out.append((name, step))
    return out


def _equation_word(lhs: Word, rhs: Word) -> list[tuple[str, int]]:
    inv_rhs = tuple((name, -exp) for name, exp in reversed(rhs))
    return _expand(lhs + inv_rhs)


def rvar(x: str) -> str:
    return f"r_{x}"


def xvar(x: str) -> str:
    return f"x_{x}"


def yvar(x: str) -> str:
    return f"y_{x}"


def reduce_bs(system: EquationSystem) -> ExpLinSystem:
    spec = system.spec
    k = spec.k
    rows: list[Row] = []
    linear: list[AffineForm] = []
    for lhs, rhs in system.equations:
        prefix = AffineForm.constant(0)
        zterms: dict[str, list] = {}
        cterms: list = []
        for name, s in _equation_word(lhs, rhs):
            if name[0].isupper():
                rv = AffineForm.var(rvar(name))
                if s > 0:
                    zterms.setdefault(name, []).append((-prefix, 1))
                    prefix = prefix + rv
                else:
                    zterms.setdefault(name, []).append((rv - prefix, -1))
                    prefix = prefix - rv
            else:
                g = generator(spec, name)
                u, r = (g.u, g.r) if s > 0 else ((-g.u).scale_kpow(g.r), -g.r)
                if not u.is_zero():
                    cterms.append((AffineForm.constant(-u.depth) - prefix, u.num))
                prefix = prefix.shift(r)
        row = Row(
            {v: ExpSum.make(items) for v, items in zterms.items()},
            ExpSum.make(cterms),
        ).normalized()
        if row.coeffs or not row.const.is_zero():
            # variable-free identities (e.g. the defining relation) fold to 0 = 0
            vacuous = (
                not row.coeffs
                and all(f.is_const() for f, _ in row.const.terms)
                and row.const.eval_fraction(k, {}) == 0
            )
            if not vacuous:
                rows.append(row)
        if prefix.terms or prefix.const:
            linear.append(prefix)
    return ExpLinSystem(
        k=k,
        rows=rows,
        linear=linear,
        rvars=[rvar(v) for v in system.variables],
        zvars=list(system.variables),
    )


def reduce_wreath(system: EquationSystem) -> WreathSystem:
    spec = system.spec
    shared_linear: list[AffineForm] = []
    # raw rows hold RElem constants; split per component afterwards
    raw: list[tuple[dict[str, list], list]] = []
    for lhs, rhs in system.equations:
        prefix = AffineForm.constant(0)
        fterms: dict[str, list] = {}
        cterms: list = []
        for name, s in _equation_word(lhs, rhs):
            if name[0].isupper():
                xv = AffineForm.var(xvar(name))
                yv = AffineForm.var(yvar(name))
                if s > 0:
                    fterms.setdefault(name, []).append((prefix - yv, 1))
                    prefix = prefix + xv
                else:
                    fterms.setdefault(name, []).append((prefix - xv - yv, -1))
                    prefix = prefix - xv
            else:
                g = generator(spec, name)
                poly, x = (g.poly, g.shift) if s > 0 else ((-g.poly).shift(-g.shift), -g.shift)
                for deg, relem in poly.coeffs:
                    cterms.append((prefix.shift(deg), relem))
                prefix = prefix.shift(x)
        raw.append((fterms, cterms))
        if prefix.terms or prefix.const:
            shared_linear.append(prefix)

    components: list[CompSystem] = []
    for comp in range(spec.n_components):
        mod = spec.component_modulus(comp)
        rows = []
        for fterms, cterms in raw:
            row = Row(
                {v: ExpSum.make(items, mod) for v, items in fterms.items()},
                ExpSum.make([(f, relem.component(comp)) for f, relem in cterms], mod),
            ).normalized()
            if row.coeffs or not row.const.is_zero():
                rows.append(row)
        components.append(CompSystem(component=comp, mod=mod, rows=rows))
    return WreathSystem(
        spec=spec,
        components=components,
        linear=shared_linear,
        xvars=[xvar(v) for v in system.variables],
        yvars=[yvar(v) for v in system.variables],
        fvars=list(system.variables),
    )


# ---------------------------------------------------------------------------
# Triangularization with zero/nonzero case splits


@dataclass
class TriBranch:
    """One branch of the case analysis over a component system.

    pivots is triangular: pivot s references only unknowns appearing later.
    residuals are unknown-free exponential sums required to vanish.
    side holds coefficient sums this branch assumes nonzero (bookkeeping;
    never used to justify an unsat verdict).
    """

    pivots: list[tuple[str, Row]]
    residuals: list[ExpSum]
    side: list[ExpSum]
    path: str

    def render(self, base: str) -> str:
        lines = [f"branch {self.path}"]
        for u, row in self.pivots:
            lines.append(f"  pivot {u}: {row.render(base)}")
        for r in self.residuals:
            lines.append(f"  residual: {r.render(base)} = 0")
        for s in self.side:
            lines.append(f"  assume nonzero: {s.render(base)}")
        return "\n".join(lines)


def _is_unit(coef: int, mod: int | None) -> bool:
    if mod is None:
        return coef in (1, -1)
    import math

    return math.gcd(coef, mod) == 1


def _pivot_score(s: ExpSum, mod: int | None) -> tuple[int, int]:
    one = s.single()
    if one is not None:
        return (0 if _is_unit(one[1], mod) else 1, 1)
    return (2, len(s.terms))


def triangularize(rows: list[Row], mod: int | None, branch_cap: int = 512) -> list[TriBranch]:
    """Case-split elimination; the union of branch solution sets covers the input."""
    out: list[TriBranch] = []
    seen: set[str] = set()
    base = "k" if mod is None else "t"

    def emit(branch: TriBranch) -> None:
        key = branch.render(base)
        key = "\n".join(sorted(key.splitlines()[1:]))
        if key not in seen:
            seen.add(key)
            out.append(branch)

    def walk(work: list[Row], pivots, residuals, side, path: str) -> None:
        if len(out) >= branch_cap:
            raise BranchOverflow()
        work = [r.normalized() for r in work]
        ready: list[Row] = []
        for r in work:
            if r.coeffs:
                ready.append(r)
            elif not r.const.is_zero():
                residuals = residuals + [r.const]
        if not ready:
            emit(TriBranch(list(pivots), residuals, side, path))
            return
        # deterministic pivot choice: safest coefficient first
        best = None
        for i, row in enumerate(ready):
            for u in sorted(row.coeffs):
                score = _pivot_score(row.coeffs[u], mod) + (u, i)
                if best is None or score < best[0]:
                    best = (score, i, u)
        _, i, u = best
        prow = ready[i]
        coef = prow.coeffs[u]
        rest = ready[:i] + ready[i + 1 :]
        if coef.single() is None:
            # zero branch: this coefficient sum vanishes
            zrow = Row({v: s for v, s in prow.coeffs.items() if v != u}, prow.const)
            walk(rest + [zrow], pivots, residuals + [coef], side, path + "z")
            side = side + [coef]
            path = path + "n"
        eliminated = []
        for row in rest:
            if u in row.coeffs:
                eliminated.append(row.sub_scaled(prow, coef, row.coeffs[u]))
            else:
                eliminated.append(row)
        walk(eliminated, pivots + [(u, prow)], residuals, side, path + ".")

    walk(rows, [], [], [], "")
    return out


class BranchOverflow(Exception):
    """Raised when the case-split tree exceeds its cap; caller degrades to Unknown."""


# ---------------------------------------------------------------------------
# Nonnegativity split


@dataclass
class SignedBranch:
    tri: TriBranch
    flips: tuple[str, ...]  # parameters replaced by their negatives
    params: tuple[str, ...]  # all exponent variables, now ranging over N


def _clear_row(row: Row) -> Row:
    """Multiply the equation by base^M so every exponent form is N-valued."""
    forms = [f for s in row.coeffs.values() for f, _ in s.terms]
    forms += [f for f, _ in row.const.terms]
    if not forms:
        return row
    lift: dict[str, int] = {}
    for f in forms:
        for v, c in f.terms:
            if c < 0:
                lift[v] = max(lift.get(v, 0), -c)
    cmin = min(f.const for f in forms)
    m = AffineForm.make(lift, max(0, -cmin))
    if not m.terms and m.const == 0:
        return row
    return Row({u: s.shift_exp(m) for u, s in row.coeffs.items()}, row.const.shift_exp(m))


def _clear_sum(s: ExpSum) -> ExpSum:
    return _clear_row(Row({}, s)).const


def sign_split(branch: TriBranch, params: list[str]) -> list[SignedBranch]:
    """2^v branches over the sign patterns of the exponent parameters.

    In each branch negated parameters are replaced by their negatives, and each
    equation is multiplied through by a base power so that all exponent forms
    take nonnegative values on N-assignments.
    """
    out = []
    for mask in range(1 << len(params)):
        flips = tuple(p for i, p in enumerate(params) if mask >> i & 1)
        env = {p: AffineForm.var(p, -1) for p in flips}
        pivots = [(u, _clear_row(r.substitute(env))) for u, r in branch.pivots]
        residuals = [_clear_sum(s.substitute(env)) for s in branch.residuals]
        tri = TriBranch(pivots, residuals, branch.side, branch.path + f"/s{mask}")
        out.append(SignedBranch(tri=tri, flips=flips, params=tuple(params)))
    return out


# ---------------------------------------------------------------------------
# Exact evaluation of reduced systems (soundness checks and tests)


def wreath_coords(elem, n_components: int):
    """Split a wreath element into (f per component, y, x) coordinates."""
    poly, x = elem.poly, elem.shift
    degs = poly.support()
    y = max(0, -min(degs)) if degs else 0
    comps = []
    for c in range(n_components):
        d = poly.component_dict(c)
        comps.append({deg + y: v for deg, v in d.items()})
    return comps, y, x


def eval_bs_system(sys2: ExpLinSystem, assignment: dict) -> bool:
    """Does a group assignment satisfy the reduced system?  Exact."""
    renv = {rvar(v): g.r for v, g in assignment.items()}
    for form in sys2.linear:
        if form.evaluate(renv) != 0:
            return False
    for row in sys2.rows:
        total = row.const.eval_fraction(sys2.k, renv)
        for v, s in row.coeffs.items():
            total += s.eval_fraction(sys2.k, renv) * assignment[v].u.as_fraction()
        if total != 0:
            return False
    return True


def eval_wreath_system(wsys: WreathSystem, assignment: dict) -> bool:
    spec = wsys.spec
    env: dict[str, int] = {}
    fcomp: dict[str, list[dict[int, int]]] = {}
    for v, g in assignment.items():
        comps, y, x = wreath_coords(g, spec.n_components)
        env[xvar(v)] = x
        env[yvar(v)] = y
        fcomp[v] = comps
    for form in wsys.linear:
        if form.evaluate(env) != 0:
            return False
    for comp in wsys.components:
        for row in comp.rows:
            acc: dict[int, int] = {}

            def bump(d: int, v: int) -> None:
                w = acc.get(d, 0) + v
                if comp.mod is not None:
                    w %= comp.mod
                if w:
                    acc[d] = w
                else:
                    acc.pop(d, None)

            for d, v in row.const.eval_laurent(env).items():
                bump(d, v)
            for var, s in row.coeffs.items():
                coefpoly = s.eval_laurent(env)
                fpoly = fcomp[var][comp.component]
                for d1, v1 in coefpoly.items():
                    for d2, v2 in fpoly.items():
                        bump(d1 + d2, v1 * v2)
            if acc:
                return False
    return True
