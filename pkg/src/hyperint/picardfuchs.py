"""Gelfand-Leray rows and assembly of the Picard-Fuchs system (tE - A) x' = B x."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import List, Optional

import numpy as np
from scipy.optimize import linear_sum_assignment

from .bipoly import BiPoly
from .forms import OneForm, TwoForm, exterior_derivative, wedge_dH
from .hamiltonian import CriticalData, HyperellipticHamiltonian, critical_data
from .polymat import PolyMatrix, char_poly_and_adjugate
from .scalars import ONE, QQi, ZERO
from .unipoly import UniPoly


class SignConventionError(RuntimeError):
    """The reconstructed divisor identity failed to vanish symbolically."""


@dataclass
class GelfandLerayRow:
    """Data of one row: H d(omega_i) = dH ^ eta_i + sum_j a_ij d(omega_j)."""

    index: int
    a_row: List[QQi]
    eta: OneForm
    b_row: List[QQi]


def gelfand_leray(H: HyperellipticHamiltonian, i: int) -> GelfandLerayRow:
    """Constructive divisor row for the i-th basis form.

    Write V(x) x^(i-1) = q(x) V'(x) + r(x) by Euclidean division; then
    eta_i = (y/2) x^(i-1) dx - q(x) dy satisfies the row identity with
    a_ij = -(coefficient of x^(j-1) in r), and eta_i reduces to
    (1/2) omega_i + q'(x) y dx, giving constant Petrov coefficients b_ij.
    The identity is re-verified symbolically; failure aborts, since it can
    only come from a sign-convention bug.
    """
    n = H.n
    if not 1 <= i <= n:
        raise ValueError(f"row index {i} out of range 1..{n}")
    Vp = H.V.derivative()
    q, r = divmod(H.V * UniPoly.monomial(ONE, i - 1, "x"), Vp)
    if r.degree > n - 1:
        raise AssertionError("remainder degree exceeds n-1")

    a_row = [-r.coeff(j) for j in range(n)]
    eta = OneForm(
        BiPoly.monomial(QQi(1, 0) / QQi(2), i - 1, 1),
        -BiPoly.from_unipoly_x(q),
    )

    # b-row: eta_i = (1/2) omega_i + q'(x) y dx, and deg q' <= n-1
    qp = q.derivative()
    b_row = [
        (QQi(1) / QQi(2) if j + 1 == i else ZERO) + qp.coeff(j) for j in range(n)
    ]

    # symbolic re-verification of the row identity
    lhs = _h_d_omega(H, i)
    rhs = wedge_dH(H, eta)
    for j, a in enumerate(a_row, start=1):
        rhs = rhs + a * exterior_derivative(H.petrov_form(j))
    if not (lhs - rhs).is_zero():
        raise SignConventionError(f"row {i}: divisor identity not exact")

    return GelfandLerayRow(index=i, a_row=a_row, eta=eta, b_row=b_row)


def _h_d_omega(H: HyperellipticHamiltonian, i: int) -> TwoForm:
    """H * d(omega_i); the exterior derivative keeps all signs in one place."""
    d_omega = exterior_derivative(H.petrov_form(i))
    return TwoForm(H.as_bipoly() * d_omega.F)


@dataclass
class PicardFuchsSystem:
    """Constant matrices A, B with P(t) = det(tE - A) and C(t) = Adj(tE - A) B."""

    n: int
    A: List[List[QQi]]
    B: List[List[QQi]]
    P: UniPoly
    C: PolyMatrix
    morse: Optional[bool] = None
    rows: List[GelfandLerayRow] = field(default_factory=list)

    def to_json(self):
        return {
            "n": self.n,
            "A": [[c.to_json() for c in row] for row in self.A],
            "B": [[c.to_json() for c in row] for row in self.B],
            "P": self.P.to_json(),
            "C": self.C.to_json(),
            "morse": self.morse,
        }

    def A_complex(self) -> np.ndarray:
        return np.array([[complex(c) for c in row] for row in self.A])

    def B_complex(self) -> np.ndarray:
        return np.array([[complex(c) for c in row] for row in self.B])


def build_system(H: HyperellipticHamiltonian) -> PicardFuchsSystem:
    """Assemble the full system from the divisor rows and certify degrees."""
    n = H.n
    rows = [gelfand_leray(H, i) for i in range(1, n + 1)]
    A = [row.a_row for row in rows]
    B = [row.b_row for row in rows]
    P, adj = char_poly_and_adjugate(A, "t")
    Bmat = PolyMatrix.from_scalar_matrix(B, "t")
    C = adj * Bmat
    if P.degree != n:
        raise AssertionError("characteristic polynomial degree mismatch")
    if C.max_degree() > n - 1:
        raise AssertionError("rational-form numerator degree exceeds n-1")
    crit = critical_data(H)
    return PicardFuchsSystem(
        n=n, A=A, B=B, P=P, C=C, morse=crit.morse, rows=rows
    )


@dataclass
class EigencheckReport:
    max_mismatch: float
    char_poly_residual: float
    ok: bool
    tol: float

    def to_json(self):
        return {
            "max_mismatch": self.max_mismatch,
            "char_poly_residual": self.char_poly_residual,
            "ok": self.ok,
            "tol": self.tol,
        }


def eigencheck(
    sys: PicardFuchsSystem, crit: CriticalData, tol: float = 1e-8
) -> EigencheckReport:
    """Match the eigenvalues of A against the critical values as multisets.

    Any sign-convention error in the row construction breaks this badly, so
    it doubles as the system's self-check.  Also evaluates P at every
    critical value, which must be a root.
    """
    eigs = np.linalg.eigvals(sys.A_complex())
    values = np.array(crit.values)
    if len(eigs) != len(values):
        return EigencheckReport(float("inf"), float("inf"), False, tol)
    cost = np.abs(eigs[:, None] - values[None, :])
    ridx, cidx = linear_sum_assignment(cost)
    scale = max(1.0, float(np.max(np.abs(values))) if len(values) else 1.0)
    max_mismatch = float(cost[ridx, cidx].max()) / scale if len(values) else 0.0
    p_res = max(
        (abs(sys.P.eval_complex(v)) for v in crit.values), default=0.0
    ) / scale ** sys.n
    return EigencheckReport(
        max_mismatch=max_mismatch,
        char_poly_residual=float(p_res),
        ok=bool(max_mismatch <= tol),
        tol=tol,
    )
