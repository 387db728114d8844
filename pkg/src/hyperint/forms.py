"""Polynomial differential forms on C^2 and the primitives built on them.

Orientation convention: dx ^ dy is positive, globally.  Every sign in the
package (exterior derivatives, wedge products, Gelfand-Leray rows) is stated
relative to this choice.
"""

from __future__ import annotations

from .bipoly import BiPoly, weighted_degree_bipoly
from .unipoly import MINUS_INF


class OneForm:
    """P(x,y) dx + Q(x,y) dy."""

    __slots__ = ("P", "Q")

    def __init__(self, P: BiPoly | None = None, Q: BiPoly | None = None):
        self.P = P if P is not None else BiPoly.zero()
        self.Q = Q if Q is not None else BiPoly.zero()

    @staticmethod
    def zero() -> "OneForm":
        return OneForm()

    @staticmethod
    def from_json(obj) -> "OneForm":
        return OneForm(
            BiPoly.from_json(obj.get("dx", [])),
            BiPoly.from_json(obj.get("dy", [])),
        )

    def to_json(self):
        return {"dx": self.P.to_json(), "dy": self.Q.to_json()}

    def is_zero(self) -> bool:
        return self.P.is_zero() and self.Q.is_zero()

    def __add__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.P + other.P, self.Q + other.Q)

    def __sub__(self, other: "OneForm") -> "OneForm":
        return OneForm(self.P - other.P, self.Q - other.Q)

    def __neg__(self) -> "OneForm":
        return OneForm(-self.P, -self.Q)

    def __mul__(self, c) -> "OneForm":
        return OneForm(self.P * c, self.Q * c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, OneForm):
            return NotImplemented
        return self.P == other.P and self.Q == other.Q

    def __repr__(self):
        return f"({self.P!r}) dx + ({self.Q!r}) dy"


class TwoForm:
    """F(x,y) dx ^ dy."""

    __slots__ = ("F",)

    def __init__(self, F: BiPoly | None = None):
        self.F = F if F is not None else BiPoly.zero()

    def is_zero(self) -> bool:
        return self.F.is_zero()

    def __add__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.F + other.F)

    def __sub__(self, other: "TwoForm") -> "TwoForm":
        return TwoForm(self.F - other.F)

    def __neg__(self) -> "TwoForm":
        return TwoForm(-self.F)

    def __mul__(self, c) -> "TwoForm":
        return TwoForm(self.F * c)

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, TwoForm):
            return NotImplemented
        return self.F == other.F

    def __repr__(self):
        return f"({self.F!r}) dx^dy"


def gradient_form(F: BiPoly) -> OneForm:
    """dF = F_x dx + F_y dy, the exact form of a polynomial."""
    return OneForm(F.dx(), F.dy())


def exterior_derivative(omega: OneForm) -> TwoForm:
    """d(P dx + Q dy) = (Q_x - P_y) dx^dy."""
    return TwoForm(omega.Q.dx() - omega.P.dy())


def multiply_form(f: BiPoly, omega: OneForm) -> OneForm:
    return OneForm(f * omega.P, f * omega.Q)


def wedge_dH(H, eta: OneForm) -> TwoForm:
    """dH ^ eta for H hyperelliptic: (H_x Q - H_y P) dx^dy.

    H_x = -V'(x) and H_y = 2y; `H` is a HyperellipticHamiltonian (imported
    lazily to keep the algebra layer free of that dependency).
    """
    H_x = -BiPoly.from_unipoly_x(H.V.derivative())
    H_y = BiPoly.monomial(2, 0, 1)
    return TwoForm(H_x * eta.Q - H_y * eta.P)


def weighted_degree(f, n: int):
    """Doubled quasi-homogeneous degree (x weighs 2, y weighs n+1).

    One-forms add the weight of dx (2) resp. dy (n+1) to their coefficient
    degrees.  Zero input gives -inf.
    """
    if isinstance(f, BiPoly):
        return weighted_degree_bipoly(f, n)
    if isinstance(f, OneForm):
        dp = weighted_degree_bipoly(f.P, n)
        dq = weighted_degree_bipoly(f.Q, n)
        a = dp + 2 if dp != MINUS_INF else MINUS_INF
        b = dq + (n + 1) if dq != MINUS_INF else MINUS_INF
        return max(a, b)
    raise TypeError(f"weighted_degree of {type(f).__name__}")
