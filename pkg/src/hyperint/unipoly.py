"""Dense univariate polynomials over exact Gaussian rationals."""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, Sequence

from .scalars import QQi, ZERO, ONE

MINUS_INF = float("-inf")


class UniPoly:
    """Polynomial in one indeterminate, ascending coefficients, exact scalars.

    The stored coefficient sequence never has a trailing zero; the zero
    polynomial is the empty sequence.
    """

    __slots__ = ("coeffs", "var")

    def __init__(self, coeffs: Iterable = (), var: str = "t"):
        cs = [c if isinstance(c, QQi) else QQi(c) for c in coeffs]
        while cs and cs[-1].is_zero():
            cs.pop()
        self.coeffs = tuple(cs)
        self.var = var

    # -- constructors --------------------------------------------------

    @staticmethod
    def zero(var: str = "t") -> "UniPoly":
        return UniPoly((), var)

    @staticmethod
    def const(c, var: str = "t") -> "UniPoly":
        return UniPoly((c,), var)

    @staticmethod
    def monomial(c, k: int, var: str = "t") -> "UniPoly":
        return UniPoly([ZERO] * k + [c if isinstance(c, QQi) else QQi(c)], var)

    @staticmethod
    def variable(var: str = "t") -> "UniPoly":
        return UniPoly((ZERO, ONE), var)

    @staticmethod
    def from_json(obj: dict) -> "UniPoly":
        return UniPoly([QQi.from_json(c) for c in obj["coeffs"]], obj.get("var", "t"))

    def to_json(self) -> dict:
        return {"var": self.var, "coeffs": [c.to_json() for c in self.coeffs]}

    # -- structure ------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def degree(self) -> int:
        """Degree, with the convention deg 0 = -1."""
        return len(self.coeffs) - 1

    def coeff(self, k: int) -> QQi:
        if 0 <= k < len(self.coeffs):
            return self.coeffs[k]
        return ZERO

    def leading(self) -> QQi:
        if not self.coeffs:
            return ZERO
        return self.coeffs[-1]

    # -- arithmetic ------------------------------------------------------

    def __add__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(
            [self.coeff(k) + other.coeff(k) for k in range(n)], self.var
        )

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        n = max(len(self.coeffs), len(other.coeffs))
        return UniPoly(
            [self.coeff(k) - other.coeff(k) for k in range(n)], self.var
        )

    def __rsub__(self, other):
        return self._coerce(other) - self

    def __neg__(self):
        return UniPoly([-c for c in self.coeffs], self.var)

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            c = other if isinstance(other, QQi) else QQi(other)
            return UniPoly([a * c for a in self.coeffs], self.var)
        other = self._coerce(other)
        if self.is_zero() or other.is_zero():
            return UniPoly.zero(self.var)
        out = [ZERO] * (len(self.coeffs) + len(other.coeffs) - 1)
        for i, a in enumerate(self.coeffs):
            if a.is_zero():
                continue
            for j, b in enumerate(other.coeffs):
                out[i + j] = out[i + j] + a * b
        return UniPoly(out, self.var)

    __rmul__ = __mul__

    def __pow__(self, k: int):
        out = UniPoly.const(ONE, self.var)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __divmod__(self, other):
        other = self._coerce(other)
        if other.is_zero():
            raise ZeroDivisionError("polynomial division by zero")
        q = UniPoly.zero(self.var)
        r = self
        lead = other.leading()
        while not r.is_zero() and r.degree >= other.degree:
            k = r.degree - other.degree
            c = r.leading() / lead
            term = UniPoly.monomial(c, k, self.var)
            q = q + term
            r = r - term * other
        return q, r

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __mod__(self, other):
        return divmod(self, other)[1]

    def exact_div(self, other: "UniPoly") -> "UniPoly":
        """Division known to be remainder-free; raises if it is not."""
        q, r = divmod(self, other)
        if not r.is_zero():
            raise ArithmeticError("exact_div with nonzero remainder")
        return q

    def __eq__(self, other):
        try:
            other = self._coerce(other)
        except TypeError:
            return NotImplemented
        return self.coeffs == other.coeffs

    def __hash__(self):
        return hash(self.coeffs)

    def _coerce(self, other) -> "UniPoly":
        if isinstance(other, UniPoly):
            return other
        if isinstance(other, (int, Fraction, QQi)):
            return UniPoly.const(other, self.var)
        raise TypeError(f"cannot coerce {type(other).__name__} to UniPoly")

    # -- calculus / evaluation -------------------------------------------

    def derivative(self) -> "UniPoly":
        return UniPoly(
            [c * k for k, c in enumerate(self.coeffs) if k >= 1], self.var
        )

    def eval(self, x: QQi) -> QQi:
        acc = ZERO
        for c in reversed(self.coeffs):
            acc = acc * x + c
        return acc

    def eval_complex(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + complex(c)
        return acc

    def monic(self) -> "UniPoly":
        if self.is_zero():
            return self
        return self * (ONE / self.leading())

    def gcd(self, other: "UniPoly") -> "UniPoly":
        """Monic gcd by the Euclidean algorithm over the scalar field."""
        a, b = self, other
        while not b.is_zero():
            a, b = b, a % b
        return a.monic()

    def __repr__(self):
        if self.is_zero():
            return f"UniPoly(0, {self.var!r})"
        terms = []
        for k, c in enumerate(self.coeffs):
            if c.is_zero():
                continue
            if k == 0:
                terms.append(str(c))
            elif k == 1:
                terms.append(f"{c}*{self.var}")
            else:
                terms.append(f"{c}*{self.var}^{k}")
        return " + ".join(terms)


def poly_from_roots(roots: Sequence, var: str = "t") -> UniPoly:
    """Exact monic polynomial with the given exact roots."""
    out = UniPoly.const(ONE, var)
    for r in roots:
        out = out * UniPoly((-(r if isinstance(r, QQi) else QQi(r)), ONE), var)
    return out
