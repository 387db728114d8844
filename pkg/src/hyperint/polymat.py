"""Matrices of univariate polynomials and fraction-free linear algebra."""

from __future__ import annotations

from typing import List, Sequence

from .scalars import ONE, QQi, ZERO
from .unipoly import UniPoly


class PolyMatrix:
    """Rectangular matrix with UniPoly entries (all in the same variable)."""

    __slots__ = ("rows", "var")

    def __init__(self, rows: Sequence[Sequence[UniPoly]], var: str = "t"):
        self.rows = [list(r) for r in rows]
        if self.rows:
            width = len(self.rows[0])
            if any(len(r) != width for r in self.rows):
                raise ValueError("ragged PolyMatrix")
        self.var = var

    @property
    def nrows(self) -> int:
        return len(self.rows)

    @property
    def ncols(self) -> int:
        return len(self.rows[0]) if self.rows else 0

    def entry(self, i: int, j: int) -> UniPoly:
        return self.rows[i][j]

    @staticmethod
    def identity(n: int, var: str = "t") -> "PolyMatrix":
        return PolyMatrix(
            [
                [UniPoly.const(ONE if i == j else ZERO, var) for j in range(n)]
                for i in range(n)
            ],
            var,
        )

    @staticmethod
    def from_scalar_matrix(m: Sequence[Sequence[QQi]], var: str = "t") -> "PolyMatrix":
        return PolyMatrix(
            [[UniPoly.const(c, var) for c in row] for row in m], var
        )

    def __mul__(self, other: "PolyMatrix") -> "PolyMatrix":
        if self.ncols != other.nrows:
            raise ValueError("shape mismatch in PolyMatrix product")
        out = []
        for i in range(self.nrows):
            row = []
            for j in range(other.ncols):
                acc = UniPoly.zero(self.var)
                for k in range(self.ncols):
                    acc = acc + self.rows[i][k] * other.rows[k][j]
                row.append(acc)
            out.append(row)
        return PolyMatrix(out, self.var)

    def transpose(self) -> "PolyMatrix":
        return PolyMatrix(
            [[self.rows[i][j] for i in range(self.nrows)] for j in range(self.ncols)],
            self.var,
        )

    def max_degree(self) -> int:
        return max((e.degree for r in self.rows for e in r), default=-1)

    def to_json(self):
        return [[e.to_json() for e in row] for row in self.rows]


def det_cofactor(m: PolyMatrix) -> UniPoly:
    """Determinant by cofactor expansion; the independent small-matrix oracle."""
    if m.nrows != m.ncols:
        raise ValueError("determinant of non-square matrix")
    n = m.nrows
    if n == 0:
        return UniPoly.const(ONE, m.var)

    def rec(rows: List[List[UniPoly]]) -> UniPoly:
        k = len(rows)
        if k == 1:
            return rows[0][0]
        acc = UniPoly.zero(m.var)
        for j in range(k):
            e = rows[0][j]
            if e.is_zero():
                continue
            minor = [r[:j] + r[j + 1 :] for r in rows[1:]]
            term = e * rec(minor)
            acc = acc + term if j % 2 == 0 else acc - term
        return acc

    return rec([row[:] for row in m.rows])


def fraction_free_det(m: PolyMatrix) -> UniPoly:
    """Exact determinant via Bareiss elimination.

    Pivoting divides by the previous pivot, which is an exact polynomial
    division in this scheme, so intermediate entries stay polynomial instead
    of growing into rational functions.
    """
    if m.nrows != m.ncols:
        raise ValueError("determinant of non-square matrix")
    n = m.nrows
    if n == 0:
        return UniPoly.const(ONE, m.var)
    a = [row[:] for row in m.rows]
    sign = 1
    prev = UniPoly.const(ONE, m.var)
    for k in range(n - 1):
        if a[k][k].is_zero():
            pivot_row = next(
                (i for i in range(k + 1, n) if not a[i][k].is_zero()), None
            )
            if pivot_row is None:
                return UniPoly.zero(m.var)
            a[k], a[pivot_row] = a[pivot_row], a[k]
            sign = -sign
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = a[i][j] * a[k][k] - a[i][k] * a[k][j]
                a[i][j] = num.exact_div(prev)
            a[i][k] = UniPoly.zero(m.var)
        prev = a[k][k]
    det = a[n - 1][n - 1]
    return det if sign == 1 else -det


def char_poly_and_adjugate(A: Sequence[Sequence[QQi]], var: str = "t"):
    """Characteristic polynomial det(tE - A) and adjugate Adj(tE - A).

    Faddeev-LeVerrier recursion over exact scalars: with M_0 = E and
    c_k = -tr(A M_{k-1}) / k, M_k = A M_{k-1} + c_k E, the characteristic
    polynomial is t^n + c_1 t^{n-1} + ... + c_n and
    Adj(tE - A) = sum_k M_k t^{n-1-k}.
    """
    n = len(A)
    A = [[c if isinstance(c, QQi) else QQi(c) for c in row] for row in A]

    def mat_mul(X, Y):
        return [
            [
                sum((X[i][k] * Y[k][j] for k in range(n)), ZERO)
                for j in range(n)
            ]
            for i in range(n)
        ]

    def mat_add_scalar(X, c):
        return [
            [X[i][j] + (c if i == j else ZERO) for j in range(n)]
            for i in range(n)
        ]

    eye = [[ONE if i == j else ZERO for j in range(n)] for i in range(n)]
    M = eye
    cs = [ONE]  # coefficient of t^n
    mats = [M]
    for k in range(1, n + 1):
        AM = mat_mul(A, M)
        trace = sum((AM[i][i] for i in range(n)), ZERO)
        ck = -trace / QQi(k)
        cs.append(ck)
        M = mat_add_scalar(AM, ck)
        if k < n:
            mats.append(M)
    # ascending coefficients: c_n + c_{n-1} t + ... + t^n
    p = UniPoly(list(reversed(cs)), var)
    adj = PolyMatrix(
        [
            [
                UniPoly([mats[n - 1 - k][i][j] for k in range(n)], var)
                for j in range(n)
            ]
            for i in range(n)
        ],
        var,
    )
    return p, adj
