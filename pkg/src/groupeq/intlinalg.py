"""Integer linear algebra: Smith normal form, Z-linear systems, affine forms.

All arithmetic is plain Python integers (unbounded).  Fixed-width arithmetic
is unsound here: unimodular transforms can blow entries up well past 2^63
even for small inputs, so numpy is deliberately not used in this module.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence


Matrix = list[list[int]]


def identity(n: int) -> Matrix:
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def mat_mul(a: Matrix, b: Matrix) -> Matrix:
    rows, inner, cols = len(a), len(b), len(b[0]) if b else 0
    out = [[0] * cols for _ in range(rows)]
    for i in range(rows):
        ai = a[i]
        for kk in range(inner):
            v = ai[kk]
            if v:
                bk = b[kk]
                oi = out[i]
                for j in range(cols):
                    oi[j] += v * bk[j]
    return out


def mat_vec(a: Matrix, x: Sequence[int]) -> list[int]:
    return [sum(r[j] * x[j] for j in range(len(x))) for r in a]


def det(a: Matrix) -> int:
    """Determinant by fraction-free (Bareiss) elimination."""
    n = len(a)
    if n == 0:
        return 1
    m = [row[:] for row in a]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k]:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


# ---------------------------------------------------------------------------
# Smith normal form


@dataclass
class SnfResult:
    """U * A * V = D with U, V unimodular and D diagonal, d_1 | d_2 | ..., d_i >= 0."""

    u: Matrix
    v: Matrix
    diag: list[int]
    rows: int
    cols: int

    def d_matrix(self) -> Matrix:
        out = [[0] * self.cols for _ in range(self.rows)]
        for i, d in enumerate(self.diag):
            out[i][i] = d
        return out


def smith_normal_form(a: Matrix) -> SnfResult:
    m = len(a)
    n = len(a[0]) if m else 0
    d = [row[:] for row in a]
    u = identity(m)
    v = identity(n)

    def row_sub(r: int, s: int, q: int) -> None:
        # row r -= q * row s
        dr, ds = d[r], d[s]
        for j in range(n):
            dr[j] -= q * ds[j]
        ur, us = u[r], u[s]
        for j in range(m):
            ur[j] -= q * us[j]

    def col_sub(c: int, s: int, q: int) -> None:
        for i in range(m):
            d[i][c] -= q * d[i][s]
        for i in range(n):
            v[i][c] -= q * v[i][s]

    t = 0
    while True:
        # smallest nonzero entry of the remaining submatrix; ties: lowest row, col
        best = None
        for i in range(t, m):
            di = d[i]
            for j in range(t, n):
                val = di[j]
                if val and (best is None or abs(val) < abs(best[2])):
                    best = (i, j, val)
        if best is None:
            break
        bi, bj, _ = best
        if bi != t:
            d[t], d[bi] = d[bi], d[t]
            u[t], u[bi] = u[bi], u[t]
        if bj != t:
            for row in d:
                row[t], row[bj] = row[bj], row[t]
            for row in v:
                row[t], row[bj] = row[bj], row[t]

        dirty = False
        for i in range(m):
            if i != t and d[i][t]:
                row_sub(i, t, d[i][t] // d[t][t])
                if d[i][t]:
                    dirty = True
        for j in range(n):
            if j != t and d[t][j]:
                col_sub(j, t, d[t][j] // d[t][t])
                if d[t][j]:
                    dirty = True
        if dirty:
            continue

        piv = d[t][t]
        offender = None
        for i in range(t + 1, m):
            di = d[i]
            for j in range(t + 1, n):
                if di[j] % piv:
                    offender = i
                    break
            if offender is not None:
                break
        if offender is not None:
            # pull the offending row in so the pivot shrinks to a divisor
            row_sub(t, offender, -1)
            continue

        if piv < 0:
            for j in range(n):
                d[t][j] = -d[t][j]
            for j in range(m):
                u[t][j] = -u[t][j]
        t += 1

    diag = [d[i][i] for i in range(min(m, n))]
    while diag and diag[-1] == 0:
        diag.pop()
    return SnfResult(u=u, v=v, diag=diag, rows=m, cols=n)


# ---------------------------------------------------------------------------
# Linear systems A x = b over Z


@dataclass
class LinearSolutionSet:
    """Solution set of an integer linear system.

    status is "ok" or "empty".  When "ok", the set is
    particular + integer span of basis.  When "empty", cert_row holds
    (row index, d, c) for a diagonalized row d*x = c with d not dividing c
    (d == 0 and c != 0 covers the degenerate case).
    """

    status: str
    nvars: int
    particular: tuple[int, ...] | None = None
    basis: tuple[tuple[int, ...], ...] = ()
    cert_row: tuple[int, int, int] | None = None

    def canonical(self) -> tuple:
        """Canonical key: HNF of the basis lattice plus reduced particular."""
        if self.status == "empty":
            return ("empty",)
        hnf = row_hnf(self.basis, self.nvars)
        part = list(self.particular)
        for row in hnf:
            c = next(j for j in range(self.nvars) if row[j])
            q = part[c] // row[c]
            if q:
                for j in range(self.nvars):
                    part[j] -= q * row[j]
        return ("ok", tuple(part), tuple(tuple(r) for r in hnf))


def solve_linear(a: Matrix, b: Sequence[int]) -> LinearSolutionSet:
    m = len(a)
    n = len(a[0]) if m else 0
    if m == 0:
        return LinearSolutionSet(status="ok", nvars=n, particular=(0,) * n,
                                 basis=tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))
    snf = smith_normal_form(a)
    c = mat_vec(snf.u, list(b))
    r = len(snf.diag)
    y = [0] * n
    for i in range(r):
        di = snf.diag[i]
        if c[i] % di:
            return LinearSolutionSet(status="empty", nvars=n, cert_row=(i, di, c[i]))
        y[i] = c[i] // di
    for i in range(r, m):
        if c[i]:
            return LinearSolutionSet(status="empty", nvars=n, cert_row=(i, 0, c[i]))
    particular = tuple(mat_vec(snf.v, y))
    basis = tuple(tuple(snf.v[i][j] for i in range(n)) for j in range(r, n))
    return LinearSolutionSet(status="ok", nvars=n, particular=particular, basis=basis)


def row_hnf(vecs: Sequence[Sequence[int]], n: int) -> list[list[int]]:
    """Row Hermite normal form of the lattice spanned by vecs (canonical basis)."""
    mat = [list(v) for v in vecs if any(v)]
    row = 0
    for col in range(n):
        sel = None
        for i in range(row, len(mat)):
            if mat[i][col]:
                sel = i
                break
        if sel is None:
            continue
        mat[row], mat[sel] = mat[sel], mat[row]
        for i in range(row + 1, len(mat)):
            while mat[i][col]:
                q = mat[row][col] // mat[i][col]
                for j in range(n):
                    mat[row][j] -= q * mat[i][j]
                mat[row], mat[i] = mat[i], mat[row]
        if mat[row][col] < 0:
            mat[row] = [-x for x in mat[row]]
        for i in range(row):
            q = mat[i][col] // mat[row][col]
            if q:
                for j in range(n):
                    mat[i][j] -= q * mat[row][j]
        row += 1
    return [r for r in mat[:row]]


def lattice_contains(basis: Sequence[Sequence[int]], vec: Sequence[int]) -> bool:
    """Is vec in the integer span of basis?"""
    n = len(vec)
    if not any(vec):
        return True
    if not basis:
        return False
    a = [[basis[j][i] for j in range(len(basis))] for i in range(n)]
    return solve_linear(a, list(vec)).status == "ok"


# ---------------------------------------------------------------------------
# Affine forms over named integer variables


@dataclass(frozen=True, order=True)
class AffineForm:
    """Sum of coef * var plus a constant, with a canonical sorted term tuple."""

    terms: tuple[tuple[str, int], ...]
    const: int

    @staticmethod
    def make(terms: dict[str, int] | Sequence[tuple[str, int]], const: int = 0) -> "AffineForm":
        acc: dict[str, int] = {}
        items = terms.items() if isinstance(terms, dict) else terms
        for v, c in items:
            if c:
                acc[v] = acc.get(v, 0) + c
                if not acc[v]:
                    del acc[v]
        return AffineForm(tuple(sorted(acc.items())), const)

    @staticmethod
    def constant(c: int) -> "AffineForm":
        return AffineForm((), c)

    @staticmethod
    def var(name: str, coef: int = 1) -> "AffineForm":
        if coef == 0:
            return AffineForm((), 0)
        return AffineForm(((name, coef),), 0)

    def __add__(self, other: "AffineForm") -> "AffineForm":
        return AffineForm.make(self.terms + other.terms, self.const + other.const)

    def __neg__(self) -> "AffineForm":
        return AffineForm(tuple((v, -c) for v, c in self.terms), -self.const)

    def __sub__(self, other: "AffineForm") -> "AffineForm":
        return self + (-other)

    def scale(self, s: int) -> "AffineForm":
        if s == 0:
            return AffineForm((), 0)
        return AffineForm(tuple((v, c * s) for v, c in self.terms), self.const * s)

    def shift(self, c: int) -> "AffineForm":
        return AffineForm(self.terms, self.const + c)

    def is_const(self) -> bool:
        return not self.terms

    def coef(self, var: str) -> int:
        for v, c in self.terms:
            if v == var:
                return c
        return 0

    def variables(self) -> tuple[str, ...]:
        return tuple(v for v, _ in self.terms)

    def evaluate(self, env: dict[str, int]) -> int:
        return self.const + sum(c * env[v] for v, c in self.terms)

    def substitute(self, env: dict[str, "AffineForm"]) -> "AffineForm":
        out = AffineForm.constant(self.const)
        for v, c in self.terms:
            if v in env:
                out = out + env[v].scale(c)
            else:
                out = out + AffineForm.var(v, c)
        return out

    def render(self) -> str:
        parts = []
        for v, c in self.terms:
            if c == 1:
                parts.append(f"+{v}")
            elif c == -1:
                parts.append(f"-{v}")
            else:
                parts.append(f"{c:+d}*{v}")
        if self.const or not parts:
            parts.append(f"{self.const:+d}")
        s = "".join(parts)
        return s[1:] if s.startswith("+") else s


def apply_solution(
    sol: LinearSolutionSet,
    var_names: Sequence[str],
    forms: Sequence[AffineForm],
    param_prefix: str,
) -> tuple[list[AffineForm], list[str], dict[str, AffineForm]]:
    """Rewrite forms over the free parameters of a solved linear system.

    Returns (rewritten forms, parameter names, substitution map var -> form).
    """
    if sol.status != "ok":
        raise ValueError("cannot apply an empty solution set")
    params = [f"{param_prefix}{j}" for j in range(len(sol.basis))]
    sub: dict[str, AffineForm] = {}
    for i, name in enumerate(var_names):
        form = AffineForm.constant(sol.particular[i])
        for j, bj in enumerate(sol.basis):
            if bj[i]:
                form = form + AffineForm.var(params[j], bj[i])
        sub[name] = form
    return [f.substitute(sub) for f in forms], params, sub
