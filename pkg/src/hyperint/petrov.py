"""Reduction of polynomial 1-forms to the monomial basis x^(i-1) y dx.

Every 1-form is equivalent, modulo exact forms and multiples of dH, to a
combination sum_i p_i(t) * x^(i-1) y dx with polynomial coefficients in t,
where t stands for the value of H on the level curve.  The rewrite engine
below computes that normal form:

  * dy-parts are traded for dx-parts through an exact form,
  * even powers of y reduce to polynomials in x (exact, hence dropped),
  * y^2 is replaced by t + V(x),
  * x^(a+n) y dx with a >= 0 is rewritten by the module relation obtained
    from x^a y dH = 0 and d(x^a y^3) = 0:
      (2a/3)(t + V(x)) x^(a-1) y dx + x^a V'(x) y dx = 0,
    solved for the top monomial, whose coefficient 2a/3 + n + 1 is positive.

Each rule application strictly lowers the top x-degree, so the rewriting
terminates with coefficients of x^0..x^(n-1).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, List

from .forms import OneForm, weighted_degree
from .hamiltonian import HyperellipticHamiltonian
from .scalars import QQi, ZERO
from .unipoly import MINUS_INF, UniPoly

# polynomials in x whose coefficients are polynomials in t
XPoly = Dict[int, UniPoly]


def _xp_add(acc: XPoly, k: int, p: UniPoly) -> None:
    if p.is_zero():
        return
    cur = acc.get(k)
    acc[k] = p if cur is None else cur + p
    if acc[k].is_zero():
        del acc[k]


def _t_plus_V_power(H: HyperellipticHamiltonian, k: int) -> XPoly:
    """(t + V(x))^k as a polynomial in x over QQi[t]."""
    t_poly = UniPoly.variable("t")
    out: XPoly = {0: UniPoly.const(QQi(1), "t")}
    base: XPoly = {0: t_poly}
    for j, c in enumerate(H.V.coeffs):
        if not c.is_zero():
            _xp_add(base, j, UniPoly.const(c, "t"))
    for _ in range(k):
        nxt: XPoly = {}
        for i1, p1 in out.items():
            for i2, p2 in base.items():
                _xp_add(nxt, i1 + i2, p1 * p2)
        out = nxt
    return out


@dataclass
class PetrovDecomposition:
    """Coefficients p_1(t)..p_n(t) of a reduced 1-form, plus the input degree."""

    coeffs: List[UniPoly]
    source_degree: float  # doubled weighted degree of the input, -inf for zero

    def is_zero(self) -> bool:
        return all(p.is_zero() for p in self.coeffs)

    def to_json(self):
        return {
            "p": [p.to_json() for p in self.coeffs],
            "source_degree_doubled": None
            if self.source_degree == MINUS_INF
            else int(self.source_degree),
        }


def reduce(omega: OneForm, H: HyperellipticHamiltonian) -> PetrovDecomposition:
    """Normal form of [omega] in the basis x^(i-1) y dx, i = 1..n."""
    n = H.n
    src_deg = weighted_degree(omega, n)

    # (a) eliminate the dy part: Q dy = d(int Q dy) - (d/dx int Q dy) dx
    f = omega.P - omega.Q.integrate_y().dx()

    # (b) split f dx by parity in y; even powers are exact after y^2 -> t + V
    acc: XPoly = {}
    for (i, j), c in f.terms.items():
        if j % 2 == 0:
            continue
        k = (j - 1) // 2
        cpoly = UniPoly.const(c, "t")
        for xdeg, tp in _t_plus_V_power(H, k).items():
            _xp_add(acc, i + xdeg, cpoly * tp)

    # (c) rewrite top monomials until the x-degree drops below n
    hbar = H.hbar
    hbar_prime = hbar.derivative()
    t_poly = UniPoly.variable("t")
    while acc:
        d = max(acc)
        if d < n:
            break
        coeff = acc.pop(d)
        a = d - n
        scale = QQi(1) / (QQi(2 * a) / QQi(3) + QQi(n + 1))
        scaled = coeff * scale
        if a >= 1:
            two_a_thirds = QQi(2 * a) / QQi(3)
            # -(2a/3) t x^(a-1)
            _xp_add(acc, a - 1, -(scaled * two_a_thirds) * t_poly)
            # +(2a/3) hbar(x) x^(a-1)
            for j, c in enumerate(hbar.coeffs):
                if not c.is_zero():
                    _xp_add(acc, a - 1 + j, scaled * (two_a_thirds * c))
        # +hbar'(x) x^a
        for j, c in enumerate(hbar_prime.coeffs):
            if not c.is_zero():
                _xp_add(acc, a + j, scaled * c)

    coeffs = [acc.get(i, UniPoly.zero("t")) for i in range(n)]
    return PetrovDecomposition(coeffs=coeffs, source_degree=src_deg)


@dataclass
class DegreeCertificate:
    ok: bool
    entries: List[dict]

    def to_json(self):
        return {"ok": self.ok, "entries": self.entries}


def degree_certificate(
    dec: PetrovDecomposition, H: HyperellipticHamiltonian
) -> DegreeCertificate:
    """Check deg p_i <= (deg omega - deg omega_i) / deg H for every i.

    Degrees are doubled integers, so the bound reads
    2(n+1) * deg p_i <= srcdeg - (2i + n + 1); the report lists the slack
    per index.
    """
    n = H.n
    ok = True
    entries = []
    for idx, p in enumerate(dec.coeffs, start=1):
        if p.is_zero():
            entries.append({"i": idx, "deg": None, "slack_doubled": None})
            continue
        wi = H.petrov_weighted_degree(idx)
        if dec.source_degree == MINUS_INF:
            # nonzero reduction of the zero class can never happen
            ok = False
            entries.append({"i": idx, "deg": p.degree, "slack_doubled": None})
            continue
        slack = int(dec.source_degree) - wi - 2 * (n + 1) * p.degree
        if slack < 0:
            ok = False
        entries.append({"i": idx, "deg": p.degree, "slack_doubled": slack})
    return DegreeCertificate(ok=ok, entries=entries)
