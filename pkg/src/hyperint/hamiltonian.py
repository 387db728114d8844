"""Hyperelliptic Hamiltonians H = y^2 - x^(n+1) + hbar(x) and their critical data."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Sequence

import numpy as np

from .bipoly import BiPoly
from .forms import OneForm
from .scalars import ONE, QQi
from .unipoly import UniPoly

DEFAULT_SEPARATION_TOL = 1e-9
NEWTON_RESIDUAL = 1e-13


class HyperellipticHamiltonian:
    """H = y^2 - x^(n+1) + hbar(x), with hbar of degree at most n-1.

    The stored polynomial is exactly the hbar of the defining expression; the
    derived potential is V(x) = x^(n+1) - hbar(x), so level curves read
    y^2 = V(x) + t.
    """

    __slots__ = ("n", "hbar", "V")

    def __init__(self, n: int, hbar: UniPoly):
        if n < 2:
            raise ValueError("need n >= 2")
        if hbar.degree > n - 1:
            raise ValueError(
                f"deg hbar = {hbar.degree} exceeds n-1 = {n - 1}"
            )
        self.n = n
        self.hbar = UniPoly(hbar.coeffs, "x")
        self.V = UniPoly.monomial(ONE, n + 1, "x") - self.hbar

    @staticmethod
    def from_json(obj) -> "HyperellipticHamiltonian":
        return HyperellipticHamiltonian(
            int(obj["n"]), UniPoly.from_json(obj["hbar"])
        )

    def to_json(self):
        return {"n": self.n, "hbar": self.hbar.to_json()}

    # -- symbolic pieces ----------------------------------------------------

    def as_bipoly(self) -> BiPoly:
        """H itself as a bivariate polynomial: y^2 - V(x)."""
        out = BiPoly.monomial(ONE, 0, 2)
        return out - BiPoly.from_unipoly_x(self.V)

    def dH(self) -> OneForm:
        """dH = -V'(x) dx + 2y dy."""
        return OneForm(
            -BiPoly.from_unipoly_x(self.V.derivative()),
            BiPoly.monomial(QQi(2), 0, 1),
        )

    def petrov_form(self, i: int) -> OneForm:
        """The i-th monomial basis form x^(i-1) y dx, 1 <= i <= n."""
        if not 1 <= i <= self.n:
            raise ValueError(f"basis index {i} out of range 1..{self.n}")
        return OneForm(BiPoly.monomial(ONE, i - 1, 1), BiPoly.zero())

    def petrov_weighted_degree(self, i: int) -> int:
        """Doubled weighted degree of x^(i-1) y dx, namely 2i + n + 1."""
        return 2 * i + self.n + 1

    def __repr__(self):
        return f"HyperellipticHamiltonian(n={self.n}, hbar={self.hbar!r})"


@dataclass
class CriticalData:
    """Refined critical points (all on y = 0), their values, and Morse status."""

    points: List[complex]
    values: List[complex]
    morse: bool
    separation: float
    squarefree: bool = True
    notes: List[str] = field(default_factory=list)

    def to_json(self):
        return {
            "points": [[z.real, z.imag] for z in self.points],
            "values": [[z.real, z.imag] for z in self.values],
            "morse": self.morse,
            "separation": self.separation,
            "squarefree": self.squarefree,
            "notes": self.notes,
        }


def _poly_roots_refined(p: UniPoly, residual_tol: float) -> np.ndarray:
    """Roots of an exact polynomial: companion-matrix start, Newton polish."""
    coeffs = np.array([complex(c) for c in p.coeffs], dtype=complex)
    roots = np.roots(coeffs[::-1])
    dp = p.derivative()
    scale = max(1.0, float(np.max(np.abs(coeffs))))
    for _ in range(50):
        vals = np.array([p.eval_complex(z) for z in roots])
        if np.all(np.abs(vals) <= residual_tol * scale):
            break
        derivs = np.array([dp.eval_complex(z) for z in roots])
        step = np.where(np.abs(derivs) > 0, vals / np.where(derivs == 0, 1, derivs), 0)
        roots = roots - step
    return np.array(sorted(roots, key=lambda z: (z.real, z.imag)))

def critical_data(
    H: HyperellipticHamiltonian, tol: float = DEFAULT_SEPARATION_TOL
) -> CriticalData:
    """Critical points x* of V', critical values t* = -V(x*), Morse check.

    Nondegeneracy is decided exactly (gcd(V', V'') constant); distinctness of
    the critical values is a numeric check against `tol` relative to the
    largest value, and the achieved separation is reported either way.
    """
    Vp = H.V.derivative()
    Vpp = Vp.derivative()
    squarefree = Vp.gcd(Vpp).degree == 0

    roots = _poly_roots_refined(Vp, NEWTON_RESIDUAL)
    values = [-H.V.eval_complex(z) for z in roots]

    notes = []
    if not squarefree:
        notes.append("V' has a repeated root (degenerate critical point)")

    separation = float("inf")
    for a in range(len(values)):
        for b in range(a + 1, len(values)):
            separation = min(separation, abs(values[a] - values[b]))
    if len(values) < 2:
        separation = float("inf")

    vscale = max([1.0] + [abs(v) for v in values])
    distinct = separation > tol * vscale
    if not distinct:
        notes.append(f"critical values collide within {tol:g} relative")

    return CriticalData(
        points=[complex(z) for z in roots],
        values=[complex(v) for v in values],
        morse=bool(squarefree and distinct),
        separation=separation if separation != float("inf") else 0.0,
        squarefree=squarefree,
        notes=notes,
    )


def genus_formula(n: int) -> int:
    """Genus of the normalized level curve: floor(n/2)."""
    if n < 2:
        raise ValueError("need n >= 2")
    return n // 2


def random_morse_hamiltonian(
    n: int, rng, max_tries: int = 200, coeff_range: int = 4
) -> HyperellipticHamiltonian:
    """Draw random small-integer hbar coefficients until H is Morse."""
    for _ in range(max_tries):
        coeffs = [
            QQi(int(rng.integers(-coeff_range, coeff_range + 1)))
            for _ in range(n)
        ]
        H = HyperellipticHamiltonian(n, UniPoly(coeffs, "x"))
        if critical_data(H).morse:
            return H
    raise RuntimeError(f"found no Morse Hamiltonian for n={n} in {max_tries} tries")
