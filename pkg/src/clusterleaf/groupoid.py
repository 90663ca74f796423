"""Unipotent upper-triangular matrices built from geodesic data.

Covers exact rank and determinant over the rational-function field,
Pfaffians, the reciprocal polynomial det(A + lambda A^T), the rank condition
and the three n = 6 case predicates.
"""

from __future__ import annotations

from fractions import Fraction
from pathlib import Path
from typing import Dict, List, Mapping, Optional, Sequence

import flint

from .algebra import RationalFn, as_scalar, parse, var

FIXTURES = Path(__file__).resolve().parent / "fixtures"


class GroupoidError(Exception):
    pass


class AsymmetricTable(GroupoidError, ValueError):
    pass


class OddDimension(GroupoidError, ValueError):
    pass


class NotSkew(GroupoidError, ValueError):
    pass


class UnknownCase(GroupoidError, ValueError):
    pass


def _rf(x) -> RationalFn:
    return as_scalar(x)


Matrix = List[List[RationalFn]]


def to_matrix(rows) -> Matrix:
    return [[_rf(x) for x in r] for r in rows]


def transpose(M: Matrix) -> Matrix:
    return [list(r) for r in zip(*M)]


def mat_add(A: Matrix, B: Matrix, scale=1) -> Matrix:
    return [[a + b * scale for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


class UTMatrix:
    """n x n unipotent upper-triangular matrix over RationalFn."""

    def __init__(self, entries: Mapping[tuple, object] | Sequence[Sequence], n: Optional[int] = None):
        if isinstance(entries, Mapping):
            if n is None:
                raise ValueError("n required with a mapping of entries")
            rows = [[RationalFn.const(1 if i == j else 0) for j in range(n)] for i in range(n)]
            for (i, j), v in entries.items():
                if not i < j:
                    raise ValueError("only strictly upper entries may be given")
                rows[i][j] = _rf(v)
        else:
            rows = to_matrix(entries)
            n = len(rows)
            for i in range(n):
                if rows[i][i] != 1 or any(not rows[i][j].is_zero() for j in range(i)):
                    raise ValueError("matrix is not unipotent upper-triangular")
        self.n = n
        self.rows: Matrix = rows

    def __getitem__(self, ij):
        i, j = ij
        return self.rows[i][j]

    def symmetrized(self) -> Matrix:
        """A + A^T."""
        return mat_add(self.rows, transpose(self.rows))

    def matrix(self) -> Matrix:
        return [list(r) for r in self.rows]


def assemble_A(table) -> UTMatrix:
    """A_ij = G_ij above the diagonal, ones on it."""
    n = len(table)
    for i in range(n):
        if _rf(table[i][i]) != 2:
            raise AsymmetricTable(f"diagonal entry {i} is not 2")
        for j in range(i + 1, n):
            if _rf(table[i][j]) != _rf(table[j][i]):
                raise AsymmetricTable(f"entries ({i},{j}) and ({j},{i}) differ")
    return UTMatrix({(i, j): table[i][j] for i in range(n) for j in range(i + 1, n)}, n)


def generic_A(n: int, prefix: str = "g") -> UTMatrix:
    """Unipotent A with independent indeterminate entries g_ij."""
    return UTMatrix({(i, j): var(f"{prefix}{i + 1}{j + 1}") for i in range(n) for j in range(i + 1, n)}, n)


# -- elimination -------------------------------------------------------------------


def _pick_pivot(M: Matrix, col: int, start: int) -> Optional[int]:
    best, size = None, None
    for r in range(start, len(M)):
        x = M[r][col]
        if not x.is_zero():
            s = len(str(x))
            if best is None or s < size:
                best, size = r, s
    return best


def determinant(M) -> RationalFn:
    """Exact determinant by fraction-free (Bareiss) elimination."""
    M = [list(r) for r in to_matrix(M)]
    n = len(M)
    if n == 0:
        return RationalFn.const(1)
    sign = 1
    prev = RationalFn.const(1)
    for k in range(n - 1):
        p = _pick_pivot(M, k, k)
        if p is None:
            return RationalFn.const(0)
        if p != k:
            M[k], M[p] = M[p], M[k]
            sign = -sign
        piv = M[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                M[i][j] = (M[i][j] * piv - M[i][k] * M[k][j]) / prev
            M[i][k] = RationalFn.const(0)
        prev = piv
    return M[n - 1][n - 1] * sign


def symmetric_rank(M) -> int:
    """Rank over the rational-function field (Gaussian elimination)."""
    M = [list(r) for r in to_matrix(M)]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    rank = 0
    for c in range(cols):
        p = _pick_pivot(M, c, rank)
        if p is None:
            continue
        M[rank], M[p] = M[p], M[rank]
        inv = M[rank][c].inverse()
        for i in range(rank + 1, rows):
            if M[i][c].is_zero():
                continue
            f = M[i][c] * inv
            M[i] = [a - f * b for a, b in zip(M[i], M[rank])]
        rank += 1
        if rank == rows:
            break
    return rank


def rank_at(M, point: Mapping[str, object]) -> int:
    """Rank after evaluating every entry at a rational point."""
    vals = [_rf(x).evaluate(point) for r in M for x in r]
    rows = len(M)
    cols = len(M[0]) if rows else 0
    return flint.fmpq_mat(rows, cols, [flint.fmpq(v.numerator, v.denominator) for v in vals]).rank()


# -- Pfaffian ---------------------------------------------------------------------------


def pfaffian(M) -> RationalFn:
    """Pfaffian by expansion along the first row."""
    M = to_matrix(M)
    n = len(M)
    if n % 2:
        raise OddDimension(f"Pfaffian needs even dimension, got {n}")
    for i in range(n):
        if not M[i][i].is_zero():
            raise NotSkew("nonzero diagonal")
        for j in range(i + 1, n):
            if M[i][j] != -M[j][i]:
                raise NotSkew(f"entries ({i},{j}) and ({j},{i}) are not opposite")
    return _pf(M, tuple(range(n)))


def _pf(M: Matrix, idx: tuple) -> RationalFn:
    if not idx:
        return RationalFn.const(1)
    i = idx[0]
    total = RationalFn.const(0)
    for k in range(1, len(idx)):
        j = idx[k]
        if M[i][j].is_zero():
            continue
        rest = idx[1:k] + idx[k + 1:]
        term = M[i][j] * _pf(M, rest)
        total = total + term if k % 2 == 1 else total - term
    return total


# -- chi(lambda) --------------------------------------------------------------------------


def chi_coefficients(A: UTMatrix) -> List[RationalFn]:
    """Coefficients of det(A + lambda A^T) for lambda^0..lambda^n.

    Obtained by exact Lagrange interpolation through lambda = 0..n.
    """
    n = A.n
    At = transpose(A.rows)
    pts = list(range(n + 1))
    vals = [determinant(mat_add(A.rows, At, lam)) for lam in pts]
    # Newton divided differences, then expand to monomial basis
    coef = list(vals)
    for k in range(1, n + 1):
        for i in range(n, k - 1, -1):
            coef[i] = (coef[i] - coef[i - 1]) * Fraction(1, pts[i] - pts[i - k])
    poly = [RationalFn.const(0)] * (n + 1)
    basis = [Fraction(1)]  # coefficients of prod_{m<k} (lambda - m)
    for k in range(n + 1):
        for d, b in enumerate(basis):
            if b:
                poly[d] = poly[d] + coef[k] * b
        nxt = [Fraction(0)] * (len(basis) + 1)
        for d, b in enumerate(basis):
            nxt[d + 1] += b
            nxt[d] -= b * pts[k]
        basis = nxt
    return poly


# -- rank condition and case predicates ------------------------------------------------------


def rank_condition(A: UTMatrix) -> tuple:
    """(holds, diagnostics) for rank(A + A^T) <= 4."""
    n = A.n
    if n <= 4:
        return True, {"n": n, "reason": "automatic for n <= 4"}
    S = A.symmetrized()
    if n == 5:
        d = determinant(S)
        return d.is_zero(), {"n": n, "det": d}
    r = symmetric_rank(S)
    return r <= 4, {"n": n, "rank": r, "corank": n - r}


def _prod(names) -> RationalFn:
    out = RationalFn.const(1)
    for s in names:
        out = out * var(s)
    return out


A_VARS = [f"a{i}" for i in range(1, 7)]
B_VARS = [f"b{i}" for i in range(1, 7)]
C_VARS = ["c1", "c2", "c3"]


def case_casimir(case: int) -> RationalFn:
    if case == 1:
        return _prod(C_VARS)
    if case == 2:
        return _prod(B_VARS + C_VARS)
    if case == 3:
        return _prod(A_VARS + B_VARS + C_VARS)
    raise UnknownCase(case)


def load_poly(name: str, fixtures: Optional[Path] = None) -> RationalFn:
    path = Path(fixtures or FIXTURES) / name
    return parse(path.read_text())


def case_minor(case: int, fixtures: Optional[Path] = None) -> RationalFn:
    """The minor condition of each case as an expression that must vanish."""
    if case == 1:
        c2, c3 = var("c2"), var("c3")
        return 1 + c2 + c2 * c3
    if case == 2:
        return load_poly("case2.poly", fixtures)
    if case == 3:
        p = Path(fixtures or FIXTURES) / "case3.poly"
        if not p.exists():
            raise FileNotFoundError("case3.poly has not been generated; run the permutation pipeline")
        return parse(p.read_text())
    raise UnknownCase(case)


def n6_case_predicate(case: int, assignment: Mapping[str, object], fixtures=None) -> bool:
    """True iff the Casimir condition and the minor condition both hold."""
    if case not in (1, 2, 3):
        raise UnknownCase(case)
    sigma = {k: _rf(v) for k, v in assignment.items()}
    cas = case_casimir(case).substitute(sigma)
    if cas != 1:
        return False
    minor = case_minor(case, fixtures).substitute(sigma)
    return minor.is_zero()
