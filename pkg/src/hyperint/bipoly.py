"""Sparse bivariate polynomials in (x, y) over exact scalars."""

from __future__ import annotations

from fractions import Fraction
from typing import Dict, Tuple

from .scalars import QQi, ZERO
from .unipoly import MINUS_INF, UniPoly

Key = Tuple[int, int]


class BiPoly:
    """Finite map (i, j) -> coefficient for monomials x^i y^j.

    Zero coefficients are never stored; the zero polynomial is the empty map.
    """

    __slots__ = ("terms",)

    def __init__(self, terms: Dict[Key, QQi] | None = None):
        cleaned: Dict[Key, QQi] = {}
        if terms:
            for (i, j), c in terms.items():
                if i < 0 or j < 0:
                    raise ValueError("negative exponent in BiPoly")
                c = c if isinstance(c, QQi) else QQi(c)
                if not c.is_zero():
                    cleaned[(i, j)] = c
        self.terms = cleaned

    # -- constructors ----------------------------------------------------

    @staticmethod
    def zero() -> "BiPoly":
        return BiPoly()

    @staticmethod
    def monomial(c, i: int, j: int) -> "BiPoly":
        return BiPoly({(i, j): c if isinstance(c, QQi) else QQi(c)})

    @staticmethod
    def const(c) -> "BiPoly":
        return BiPoly.monomial(c, 0, 0)

    @staticmethod
    def from_unipoly_x(p: UniPoly) -> "BiPoly":
        """Embed a polynomial in x as a bivariate polynomial."""
        return BiPoly({(k, 0): c for k, c in enumerate(p.coeffs)})

    @staticmethod
    def from_json(obj) -> "BiPoly":
        return BiPoly({(e["i"], e["j"]): QQi.from_json(e["c"]) for e in obj})

    def to_json(self):
        return [
            {"i": i, "j": j, "c": c.to_json()}
            for (i, j), c in sorted(self.terms.items())
        ]

    # -- structure ---------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def coeff(self, i: int, j: int) -> QQi:
        return self.terms.get((i, j), ZERO)

    def degree_x(self) -> int:
        return max((i for i, _ in self.terms), default=-1)

    def degree_y(self) -> int:
        return max((j for _, j in self.terms), default=-1)

    # -- arithmetic ----------------------------------------------------------

    def __add__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) + c
        return BiPoly(out)

    def __sub__(self, other: "BiPoly") -> "BiPoly":
        out = dict(self.terms)
        for k, c in other.terms.items():
            out[k] = out.get(k, ZERO) - c
        return BiPoly(out)

    def __neg__(self) -> "BiPoly":
        return BiPoly({k: -c for k, c in self.terms.items()})

    def __mul__(self, other):
        if isinstance(other, (int, Fraction, QQi)):
            c = other if isinstance(other, QQi) else QQi(other)
            return BiPoly({k: v * c for k, v in self.terms.items()})
        out: Dict[Key, QQi] = {}
        for (i1, j1), c1 in self.terms.items():
            for (i2, j2), c2 in other.terms.items():
                k = (i1 + i2, j1 + j2)
                out[k] = out.get(k, ZERO) + c1 * c2
        return BiPoly(out)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, BiPoly):
            return NotImplemented
        return self.terms == other.terms

    def __hash__(self):
        return hash(frozenset(self.terms.items()))

    # -- calculus -------------------------------------------------------------

    def dx(self) -> "BiPoly":
        return BiPoly(
            {(i - 1, j): c * i for (i, j), c in self.terms.items() if i >= 1}
        )

    def dy(self) -> "BiPoly":
        return BiPoly(
            {(i, j - 1): c * j for (i, j), c in self.terms.items() if j >= 1}
        )

    def integrate_y(self) -> "BiPoly":
        """Antiderivative in y with zero constant term."""
        return BiPoly(
            {(i, j + 1): c / QQi(j + 1) for (i, j), c in self.terms.items()}
        )

    def eval_complex(self, x: complex, y: complex) -> complex:
        return sum(complex(c) * x**i * y**j for (i, j), c in self.terms.items())

    def __repr__(self):
        if not self.terms:
            return "BiPoly(0)"
        parts = []
        for (i, j), c in sorted(self.terms.items()):
            s = str(c)
            if i:
                s += f"*x^{i}" if i > 1 else "*x"
            if j:
                s += f"*y^{j}" if j > 1 else "*y"
            parts.append(s)
        return " + ".join(parts)


def weighted_degree_bipoly(f: BiPoly, n: int):
    """Doubled quasi-homogeneous degree: weight 2 for x, n+1 for y.

    Returns -inf for the zero polynomial.
    """
    if n < 2:
        raise ValueError("weight parameter n must be >= 2")
    if f.is_zero():
        return MINUS_INF
    return max(2 * i + (n + 1) * j for (i, j) in f.terms)
