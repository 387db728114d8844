"""Numeric periods of polynomial 1-forms on the level curves y^2 = V(x) + t.

The integration model: a cycle encircles exactly two branch points of the
curve.  Away from the endpoints the square root y is continued numerically
(nearest-continuation of the sign, never a per-point principal branch), and
each integral is evaluated either

  * in segment mode, as twice the integral along the straight segment
    between the two branch points with a Gauss-Jacobi rule absorbing the
    endpoint square-root singularity, or
  * in contour mode, on an explicit ellipse around the pair with
    Gauss-Legendre panels,

both seeded from the same anchor (the segment midpoint), so the two modes
agree including orientation.  Derivatives in t come from trapezoidal Cauchy
integrals on circles that stay at half the distance to the nearest critical
value, with branch points tracked as t moves.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, replace
from typing import List, Optional, Sequence

import numpy as np
from numpy.polynomial import polynomial as npoly
from scipy.special import roots_jacobi

from .forms import OneForm
from .hamiltonian import HyperellipticHamiltonian, critical_data

COLLISION_TOL = 1e-8
RESIDUAL_TOL = 1e-12


class BranchTrackingError(RuntimeError):
    """Branch continuation could not be disambiguated."""


class CycleConstructionError(RuntimeError):
    """No admissible integration path for the requested cycle."""


class NearCriticalError(ValueError):
    """The requested parameter is too close to a critical value."""


@dataclass(frozen=True)
class QuadOptions:
    """Quadrature controls; tolerances are relative."""

    tol: float = 1e-10
    min_nodes: int = 48
    max_doublings: int = 7
    circle_nodes: int = 64

    def to_json(self):
        return {
            "tol": self.tol,
            "min_nodes": self.min_nodes,
            "max_doublings": self.max_doublings,
            "circle_nodes": self.circle_nodes,
        }


DEFAULT_QUAD = QuadOptions()


@dataclass
class BranchSet:
    """Branch points of y^2 = V(x) + t, deterministically sorted."""

    t: complex
    roots: np.ndarray
    residual: float
    near_critical: bool

    def to_json(self):
        return {
            "t": [self.t.real, self.t.imag],
            "roots": [[z.real, z.imag] for z in self.roots],
            "residual": self.residual,
            "near_critical": self.near_critical,
        }


@dataclass
class Cycle:
    """Loop around the branch-point pair (ia, ib) of a sorted BranchSet."""

    ia: int
    ib: int
    mode: str  # "segment" or "contour"
    clearance: float
    length: float

    def to_json(self):
        return {
            "pair": [self.ia, self.ib],
            "mode": self.mode,
            "clearance": self.clearance,
            "length": self.length,
        }


def _v_coeffs(H: HyperellipticHamiltonian) -> np.ndarray:
    return np.array([complex(c) for c in H.V.coeffs], dtype=complex)


def branch_points(
    H: HyperellipticHamiltonian, t: complex, collision_tol: float = COLLISION_TOL
) -> BranchSet:
    """All n+1 roots of V(x) + t, Newton-refined and lexicographically sorted."""
    v = _v_coeffs(H)
    v0 = v.copy()
    v0[0] += t
    roots = np.roots(v0[::-1])
    dv = npoly.polyder(v0)
    for _ in range(60):
        vals = npoly.polyval(roots, v0)
        scale = max(1.0, float(np.max(np.abs(roots))) ** (H.n + 1))
        if np.all(np.abs(vals) <= RESIDUAL_TOL * scale):
            break
        der = npoly.polyval(roots, dv)
        der = np.where(np.abs(der) == 0, 1.0, der)
        roots = roots - vals / der
    order = np.lexsort((roots.imag, roots.real))
    roots = roots[order]
    vals = npoly.polyval(roots, v0)
    scale = max(1.0, float(np.max(np.abs(roots))) ** (H.n + 1))
    residual = float(np.max(np.abs(vals))) / scale
    sep = _min_pairwise(roots)
    rscale = max(1.0, float(np.max(np.abs(roots))))
    return BranchSet(
        t=complex(t),
        roots=roots,
        residual=residual,
        near_critical=bool(sep < collision_tol * rscale),
    )


def _min_pairwise(z: np.ndarray) -> float:
    if len(z) < 2:
        return float("inf")
    d = np.abs(z[:, None] - z[None, :])
    np.fill_diagonal(d, np.inf)
    return float(d.min())


def _segment_clearance(roots: np.ndarray, ia: int, ib: int) -> float:
    """Distance from the other roots to the segment [roots[ia], roots[ib]]."""
    a, b = roots[ia], roots[ib]
    others = np.delete(roots, [ia, ib])
    if len(others) == 0:
        return float("inf")
    e = b - a
    L2 = abs(e) ** 2
    u = np.clip(((others - a) * np.conj(e)).real / L2, 0.0, 1.0)
    proj = a + u * e
    return float(np.min(np.abs(others - proj)))


def cycle_basis(
    H: HyperellipticHamiltonian, t: complex, bs: Optional[BranchSet] = None
) -> List[Cycle]:
    """n loops around consecutive pairs of the sorted branch points."""
    if bs is None:
        bs = branch_points(H, t)
    if bs.near_critical:
        raise NearCriticalError(
            f"branch points nearly collide at t={t} (separation issue)"
        )
    cycles = []
    for k in range(H.n):
        length = float(abs(bs.roots[k + 1] - bs.roots[k]))
        clr = _segment_clearance(bs.roots, k, k + 1)
        mode = "segment" if clr >= 0.3 * length else "contour"
        cycles.append(
            Cycle(ia=k, ib=k + 1, mode=mode, clearance=clr, length=length)
        )
    return cycles


# ---------------------------------------------------------------------------
# branch-continued square root along node sequences
# ---------------------------------------------------------------------------


def _continued_sqrt(values: np.ndarray, seed: complex) -> np.ndarray:
    """Square roots of `values` with signs chosen by nearest continuation.

    The first entry is matched against `seed`; consecutive entries flip sign
    whenever that keeps neighbours close.  Raises if a step is too ambiguous
    to decide (caller should then refine its node sequence).
    """
    s = np.sqrt(values.astype(complex))
    n = len(s)
    if n == 0:
        return s
    prev = s[:-1]
    cur = s[1:]
    d_same = np.abs(cur - prev)
    d_flip = np.abs(cur + prev)
    # ambiguous when both options are comparably far and the magnitudes are
    # not tiny (near a branch point both roots collapse to zero, which is fine)
    mags = np.maximum(np.abs(prev), np.abs(cur))
    amb = (np.minimum(d_same, d_flip) > 0.75 * mags) & (mags > 0)
    if np.any(amb):
        raise BranchTrackingError("sqrt continuation ambiguous; refine nodes")
    rel_flip = np.where(d_flip < d_same, -1.0, 1.0)
    signs = np.concatenate([[1.0], np.cumprod(rel_flip)])
    out = s * signs
    if abs(out[0] - seed) > abs(out[0] + seed):
        out = -out
    return out


def _walk_sqrt(poly: np.ndarray, xs: np.ndarray, t: complex, seed_val: complex) -> np.ndarray:
    """y along the path xs with y(xs[0]) continued from seed_val."""
    vals = npoly.polyval(xs, poly) + t
    return _continued_sqrt(vals, seed_val)


def _anchor_seed(
    H: HyperellipticHamiltonian,
    roots: np.ndarray,
    cycle: Cycle,
    t: complex,
    carried: Optional[complex] = None,
) -> complex:
    """Value of y at the segment midpoint; principal branch unless carried."""
    v = _v_coeffs(H)
    mid = 0.5 * (roots[cycle.ia] + roots[cycle.ib])
    y2 = npoly.polyval(mid, v) + t
    y = np.sqrt(complex(y2))
    if carried is not None and abs(y - carried) > abs(y + carried):
        y = -y
    return complex(y)


# ---------------------------------------------------------------------------
# form compilation at fixed t
# ---------------------------------------------------------------------------


def _bipoly_arrays(p) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    if not p.terms:
        return (
            np.zeros(0, dtype=int),
            np.zeros(0, dtype=int),
            np.zeros(0, dtype=complex),
        )
    ii, jj, cc = zip(*[(i, j, complex(c)) for (i, j), c in p.terms.items()])
    return np.array(ii), np.array(jj), np.array(cc, dtype=complex)


class _CompiledForm:
    """A 1-form specialised to a parameter value t, ready for vector evaluation."""

    def __init__(self, H: HyperellipticHamiltonian, form: OneForm, t: complex):
        self.pi, self.pj, self.pc = _bipoly_arrays(form.P)
        self.qi, self.qj, self.qc = _bipoly_arrays(form.Q)
        v = _v_coeffs(H)
        v_t = v.copy()
        v_t[0] += t
        self.vprime = npoly.polyder(v)
        # parity split for segment mode: only terms odd in y on the dx side
        # and even in y on the dy side survive on a cycle
        g1 = np.zeros(1, dtype=complex)
        for (i, j), c in form.P.terms.items():
            if j % 2 == 1:
                term = npoly.polymul(
                    _xshift(i), npoly.polypow(v_t, (j - 1) // 2)
                ) * complex(c)
                g1 = npoly.polyadd(g1, term)
        gm1 = np.zeros(1, dtype=complex)
        for (i, j), c in form.Q.terms.items():
            if j % 2 == 0:
                term = npoly.polymul(
                    npoly.polymul(_xshift(i), npoly.polypow(v_t, j // 2)),
                    self.vprime * 0.5,
                ) * complex(c)
                gm1 = npoly.polyadd(gm1, term)
        self.g1 = g1
        self.gm1 = gm1

    def eval_full(self, xs: np.ndarray, ys: np.ndarray) -> np.ndarray:
        """P(x,y) + Q(x,y) V'(x)/(2y) on tracked points (contour mode)."""
        out = np.zeros(len(xs), dtype=complex)
        if len(self.pc):
            out += np.sum(
                self.pc[None, :]
                * xs[:, None] ** self.pi[None, :]
                * ys[:, None] ** self.pj[None, :],
                axis=1,
            )
        if len(self.qc):
            q = np.sum(
                self.qc[None, :]
                * xs[:, None] ** self.qi[None, :]
                * ys[:, None] ** self.qj[None, :],
                axis=1,
            )
            out += q * npoly.polyval(xs, self.vprime) / (2.0 * ys)
        return out


def _xshift(i: int) -> np.ndarray:
    z = np.zeros(i + 1, dtype=complex)
    z[i] = 1.0
    return z


# ---------------------------------------------------------------------------
# the two integration modes
# ---------------------------------------------------------------------------


def _integrate_segment(
    H, compiled: Sequence[_CompiledForm], roots, cycle: Cycle, t, seed, m: int
) -> np.ndarray:
    """Doubled-segment rule with Gauss-Jacobi endpoint weights.

    With x(s) = c + e s on [-1, 1] and y the anchored branch along the open
    segment, the counterclockwise loop integral equals
    -2 * int_{-1}^{1} (G1 y + Gm1 / y) dx, and y/sqrt(1-s^2) extends
    analytically across the endpoints, matching the Jacobi weights.
    """
    a, b = roots[cycle.ia], roots[cycle.ib]
    c = 0.5 * (a + b)
    e = 0.5 * (b - a)
    nodes_p, w_p = roots_jacobi(m, 0.5, 0.5)
    nodes_m, w_m = roots_jacobi(m, -0.5, -0.5)

    v = _v_coeffs(H)

    def y_on(nodes: np.ndarray) -> np.ndarray:
        # walk outward from the anchor, one half-segment at a time
        out = np.empty(m, dtype=complex)
        right = np.nonzero(nodes >= 0)[0]
        left = np.nonzero(nodes < 0)[0]
        if len(right):
            idx = right[np.argsort(nodes[right])]
            xs = np.concatenate([[c], c + e * nodes[idx]])
            out[idx] = _walk_sqrt(v, xs, t, seed)[1:]
        if len(left):
            idx = left[np.argsort(-nodes[left])]
            xs = np.concatenate([[c], c + e * nodes[idx]])
            out[idx] = _walk_sqrt(v, xs, t, seed)[1:]
        return out

    ys_p = y_on(nodes_p)
    ys_m = y_on(nodes_m)
    sq_p = np.sqrt(1.0 - nodes_p**2)
    sq_m = np.sqrt(1.0 - nodes_m**2)
    out = np.empty(len(compiled), dtype=complex)
    xs_p = c + e * nodes_p
    xs_m = c + e * nodes_m
    for k, cf in enumerate(compiled):
        acc = 0j
        if len(cf.g1) > 1 or cf.g1[0] != 0:
            f = npoly.polyval(xs_p, cf.g1) * (ys_p / sq_p)
            acc += np.dot(w_p, f)
        if len(cf.gm1) > 1 or cf.gm1[0] != 0:
            f = npoly.polyval(xs_m, cf.gm1) * (sq_m / ys_m)
            acc += np.dot(w_m, f)
        out[k] = -2.0 * e * acc
    return out


def _ellipse_params(roots, cycle: Cycle):
    a, b = roots[cycle.ia], roots[cycle.ib]
    c = 0.5 * (a + b)
    e = 0.5 * (b - a)
    L = abs(e)
    phase = e / L if L > 0 else 1.0
    others = np.delete(roots, [cycle.ia, cycle.ib])
    rho = 0.75 * cycle.clearance if len(others) else L
    rho = min(rho, 1.5 * L)
    for _ in range(40):
        if rho < 1e-3 * L:
            raise CycleConstructionError(
                f"cannot separate cycle ({cycle.ia},{cycle.ib}) from other roots"
            )
        aa, bb = L + rho, rho
        if len(others) == 0:
            break
        z = (others - c) / phase
        inside = (z.real / aa) ** 2 + (z.imag / bb) ** 2 <= 1.3
        if not np.any(inside):
            break
        rho *= 0.7
    else:
        raise CycleConstructionError("ellipse shrink loop failed")
    return c, phase, L + rho, rho


def _integrate_contour(
    H, compiled: Sequence[_CompiledForm], roots, cycle: Cycle, t, seed, m: int
) -> np.ndarray:
    """Gauss-Legendre panels on an explicit ellipse around the pair."""
    c, phase, ae, be = _ellipse_params(roots, cycle)
    v = _v_coeffs(H)

    # seed continuation from the segment midpoint to the ellipse top
    taus = np.linspace(0.0, 1.0, 24)
    path = c + phase * (1j * be * taus)
    y_path = _walk_sqrt(v, path, t, seed)
    y_top = y_path[-1]

    npan = max(8, m // 16)
    glx, glw = np.polynomial.legendre.leggauss(max(8, m // npan))
    thetas = []
    weights = []
    edges = np.linspace(np.pi / 2, np.pi / 2 + 2 * np.pi, npan + 1)
    for p in range(npan):
        mid = 0.5 * (edges[p] + edges[p + 1])
        half = 0.5 * (edges[p + 1] - edges[p])
        thetas.append(mid + half * glx)
        weights.append(half * glw)
    thetas = np.concatenate(thetas)
    weights = np.concatenate(weights)

    xs = c + phase * (ae * np.cos(thetas) + 1j * be * np.sin(thetas))
    dxs = phase * (-ae * np.sin(thetas) + 1j * be * np.cos(thetas))
    xs_walk = np.concatenate([[c + phase * 1j * be], xs, [c + phase * 1j * be]])
    ys_walk = _walk_sqrt(v, xs_walk, t, y_top)
    if abs(ys_walk[-1] - ys_walk[0]) > 1e-6 * max(1.0, abs(ys_walk[0])):
        raise BranchTrackingError("contour did not close on the same sheet")
    ys = ys_walk[1:-1]

    out = np.empty(len(compiled), dtype=complex)
    for k, cf in enumerate(compiled):
        vals = cf.eval_full(xs, ys)
        out[k] = np.dot(weights, vals * dxs)
    return out


def integrate_many(
    H: HyperellipticHamiltonian,
    forms: Sequence[OneForm],
    cycle: Cycle,
    t: complex,
    quad: QuadOptions = DEFAULT_QUAD,
    roots: Optional[np.ndarray] = None,
    seed: Optional[complex] = None,
) -> np.ndarray:
    """Integrals of several forms over one cycle, sharing branch tracking.

    Doubles the rule until the relative change drops below quad.tol; branch
    ambiguities also trigger refinement.  `roots` and `seed` support callers
    that continue the cycle through moving parameters: the pair indices of
    `cycle` refer to the supplied root array, and the integration mode is
    re-chosen from the actual root geometry.
    """
    if roots is None:
        roots = branch_points(H, t).roots
    else:
        length = float(abs(roots[cycle.ib] - roots[cycle.ia]))
        clr = _segment_clearance(roots, cycle.ia, cycle.ib)
        cycle = replace(
            cycle,
            clearance=clr,
            length=length,
            mode="segment" if clr >= 0.3 * length else "contour",
        )
    if seed is None:
        seed = _anchor_seed(H, roots, cycle, t)
    compiled = [_CompiledForm(H, f, t) for f in forms]
    runner = _integrate_segment if cycle.mode == "segment" else _integrate_contour

    m = quad.min_nodes
    prev = None
    last_err = None
    for _ in range(quad.max_doublings + 1):
        try:
            vals = runner(H, compiled, roots, cycle, t, seed, m)
        except BranchTrackingError as exc:
            last_err = exc
            m *= 2
            continue
        if prev is not None:
            scale = max(1.0, float(np.max(np.abs(vals))))
            if float(np.max(np.abs(vals - prev))) <= quad.tol * scale:
                return vals
        prev = vals
        m *= 2
    if prev is None:
        raise last_err or BranchTrackingError("integration failed")
    return prev


def integrate_form(
    H: HyperellipticHamiltonian,
    form: OneForm,
    cycle: Cycle,
    t: complex,
    quad: QuadOptions = DEFAULT_QUAD,
    roots: Optional[np.ndarray] = None,
    seed: Optional[complex] = None,
) -> complex:
    return complex(integrate_many(H, [form], cycle, t, quad, roots, seed)[0])


# ---------------------------------------------------------------------------
# period matrices
# ---------------------------------------------------------------------------


@dataclass
class PeriodMatrix:
    """entries[i][j] = integral of the (i+1)-th basis form over cycle j."""

    t: complex
    entries: np.ndarray
    cycles: List[Cycle]
    det: complex
    quad: QuadOptions

    def to_json(self):
        return {
            "t": [self.t.real, self.t.imag],
            "matrix": [
                [{"re": z.real, "im": z.imag} for z in row] for row in self.entries
            ],
            "det": {"re": self.det.real, "im": self.det.imag},
            "cycles": [c.to_json() for c in self.cycles],
            "quad": self.quad.to_json(),
        }


def thread_count() -> int:
    try:
        return max(1, int(os.environ.get("HYPERINT_THREADS", "1")))
    except ValueError:
        return 1


def period_matrix(
    H: HyperellipticHamiltonian, t: complex, quad: QuadOptions = DEFAULT_QUAD
) -> PeriodMatrix:
    """All n^2 basis periods at a regular value t."""
    bs = branch_points(H, t)
    if bs.near_critical:
        raise NearCriticalError(f"t={t} is too close to a critical value")
    cycles = cycle_basis(H, t, bs)
    basis = [H.petrov_form(i) for i in range(1, H.n + 1)]

    def column(j: int) -> np.ndarray:
        return integrate_many(H, basis, cycles[j], t, quad, roots=bs.roots)

    nthreads = thread_count()
    if nthreads > 1:
        from concurrent.futures import ThreadPoolExecutor

        with ThreadPoolExecutor(max_workers=nthreads) as ex:
            cols = list(ex.map(column, range(H.n)))
    else:
        cols = [column(j) for j in range(H.n)]
    entries = np.stack(cols, axis=1)
    return PeriodMatrix(
        t=complex(t),
        entries=entries,
        cycles=cycles,
        det=complex(np.linalg.det(entries)),
        quad=quad,
    )


# ---------------------------------------------------------------------------
# continuation in t and Cauchy derivatives
# ---------------------------------------------------------------------------


def _match_roots(prev: np.ndarray, new: np.ndarray) -> np.ndarray:
    """Reorder `new` so entry k continues prev[k] (greedy nearest matching)."""
    from scipy.optimize import linear_sum_assignment

    cost = np.abs(prev[:, None] - new[None, :])
    _, cidx = linear_sum_assignment(cost)
    return new[cidx]


def _roots_at(H, t: complex) -> np.ndarray:
    v = _v_coeffs(H)
    v_t = v.copy()
    v_t[0] += t
    new = np.roots(v_t[::-1])
    dv = npoly.polyder(v_t)
    for _ in range(30):
        vals = npoly.polyval(new, v_t)
        if np.max(np.abs(vals)) < 1e-13 * max(1.0, np.max(np.abs(new)) ** (H.n + 1)):
            break
        der = npoly.polyval(new, dv)
        der = np.where(np.abs(der) == 0, 1.0, der)
        new = new - vals / der
    return new


def _continue_state(H, state, t_from, t_to, pairs, depth=0):
    """Continue tracked roots and per-pair sheet anchors from t_from to t_to.

    `state` is (roots, seeds) with seeds[k] the y-value at the midpoint of
    pair k.  The step is bisected whenever the roots move by a sizable
    fraction of their separation or an anchor continuation is ambiguous.
    """
    roots_prev, seeds_prev = state
    v = _v_coeffs(H)
    aligned = _match_roots(roots_prev, _roots_at(H, t_to))
    movement = float(np.max(np.abs(aligned - roots_prev)))
    sep = _min_pairwise(roots_prev)
    if movement > 0.25 * sep and depth < 28:
        t_mid = 0.5 * (t_from + t_to)
        state = _continue_state(H, state, t_from, t_mid, pairs, depth + 1)
        return _continue_state(H, state, t_mid, t_to, pairs, depth + 1)
    seeds_new = []
    for (ia, ib), seed_prev in zip(pairs, seeds_prev):
        mid = 0.5 * (aligned[ia] + aligned[ib])
        y = np.sqrt(complex(npoly.polyval(mid, v) + t_to))
        if abs(y - seed_prev) > abs(y + seed_prev):
            y = -y
        if (
            min(abs(y - seed_prev), abs(y + seed_prev)) > 0.75 * abs(y)
            and abs(y) > 0
            and depth < 28
        ):
            t_mid = 0.5 * (t_from + t_to)
            state = _continue_state(H, state, t_from, t_mid, pairs, depth + 1)
            return _continue_state(H, state, t_mid, t_to, pairs, depth + 1)
        seeds_new.append(complex(y))
    return aligned, seeds_new


def cauchy_derivatives_many(
    H: HyperellipticHamiltonian,
    forms: Sequence[OneForm],
    cycle: Cycle,
    t0: complex,
    order: int,
    quad: QuadOptions = DEFAULT_QUAD,
    crit_values: Optional[Sequence[complex]] = None,
    radius: Optional[float] = None,
    nodes: Optional[int] = None,
    state0=None,
) -> np.ndarray:
    """Derivatives d^k/dt^k of the period integrals, k = 0..order.

    Trapezoidal Cauchy integrals on a circle of radius half the distance to
    the nearest critical value; the cycle (branch points and sheet anchor)
    is continued around the circle, so the result is independent of the
    system's differential equation.  `state0` optionally supplies already
    tracked (roots, anchor) for the cycle.  Returns (len(forms), order+1).
    """
    if crit_values is None:
        crit_values = critical_data(H).values
    dist = min((abs(t0 - c) for c in crit_values), default=1.0)
    if dist <= 0:
        raise NearCriticalError(f"t0={t0} equals a critical value")
    rho = radius if radius is not None else 0.5 * dist
    M = nodes if nodes is not None else max(quad.circle_nodes, 8 * order)

    if state0 is None:
        bs = branch_points(H, t0)
        if bs.near_critical:
            raise NearCriticalError(f"t0={t0} too close to a critical value")
        roots0 = bs.roots
        seed0 = _anchor_seed(H, roots0, cycle, t0)
    else:
        roots0, seed0 = state0
    pairs = [(cycle.ia, cycle.ib)]
    state = (roots0, [seed0])

    ts = t0 + rho * np.exp(2j * np.pi * np.arange(M) / M)
    samples = np.empty((len(forms), M), dtype=complex)
    t_prev = t0
    for j, tj in enumerate(ts):
        state = _continue_state(H, state, t_prev, tj, pairs)
        roots_j, seeds_j = state
        samples[:, j] = integrate_many(
            H, forms, cycle, tj, quad, roots=roots_j, seed=seeds_j[0]
        )
        t_prev = tj
    # closure sanity: continue back to t0 and compare the anchor
    state_back = _continue_state(H, state, t_prev, t0, pairs)
    if abs(state_back[1][0] - seed0) > 1e-6 * max(1.0, abs(seed0)):
        raise BranchTrackingError("cycle did not return to its sheet around the circle")

    coeff = np.fft.fft(samples, axis=1) / M  # coeff[:, k] = I^(k) rho^k / k!
    ks = np.arange(order + 1)
    fact = np.cumprod(np.concatenate([[1.0], np.arange(1, order + 1)]))
    return coeff[:, : order + 1] * fact[None, :] / rho ** ks[None, :]


def cauchy_derivatives(
    H: HyperellipticHamiltonian,
    form: OneForm,
    cycle: Cycle,
    t0: complex,
    order: int,
    quad: QuadOptions = DEFAULT_QUAD,
    **kw,
) -> np.ndarray:
    return cauchy_derivatives_many(H, [form], cycle, t0, order, quad, **kw)[0]


# ---------------------------------------------------------------------------
# a homology frame continued through parameter space
# ---------------------------------------------------------------------------


class PeriodFrame:
    """A cycle basis fixed at a reference value and continued to other t.

    Periods taken through one frame are mutually consistent as sections of
    the homology bundle: determinants and Wronskians computed at different
    samples share one basis, so basis-dependent constants stay constant.
    Continuation runs along the straight segment from the last visited t to
    the requested one (with automatic substepping), so callers control the
    homotopy class by the order of their requests; paths must stay away
    from the critical values.
    """

    def __init__(
        self,
        H: HyperellipticHamiltonian,
        t_ref: complex,
        quad: QuadOptions = DEFAULT_QUAD,
    ):
        self.H = H
        self.quad = quad
        bs = branch_points(H, t_ref)
        if bs.near_critical:
            raise NearCriticalError(f"frame reference t={t_ref} is near-critical")
        self.t_ref = complex(t_ref)
        self.cycles = cycle_basis(H, t_ref, bs)
        self.pairs = [(c.ia, c.ib) for c in self.cycles]
        seeds = [_anchor_seed(H, bs.roots, c, t_ref) for c in self.cycles]
        self._t = complex(t_ref)
        self._state = (bs.roots, seeds)
        self.crit_values = critical_data(H).values

    def goto(self, t: complex) -> None:
        t = complex(t)
        if t == self._t:
            return
        self._state = _continue_state(self.H, self._state, self._t, t, self.pairs)
        self._t = t

    def integrate(self, forms: Sequence[OneForm], cycle_index: int, t: complex):
        self.goto(t)
        roots, seeds = self._state
        return integrate_many(
            self.H,
            forms,
            self.cycles[cycle_index],
            t,
            self.quad,
            roots=roots,
            seed=seeds[cycle_index],
        )

    def period_matrix(self, t: complex) -> PeriodMatrix:
        self.goto(t)
        roots, seeds = self._state
        basis = [self.H.petrov_form(i) for i in range(1, self.H.n + 1)]
        cols = [
            integrate_many(
                self.H, basis, self.cycles[j], t, self.quad,
                roots=roots, seed=seeds[j],
            )
            for j in range(self.H.n)
        ]
        entries = np.stack(cols, axis=1)
        return PeriodMatrix(
            t=complex(t),
            entries=entries,
            cycles=self.cycles,
            det=complex(np.linalg.det(entries)),
            quad=self.quad,
        )

    def derivatives(
        self,
        forms: Sequence[OneForm],
        cycle_index: int,
        t: complex,
        order: int,
        radius: Optional[float] = None,
        nodes: Optional[int] = None,
    ) -> np.ndarray:
        """Cauchy derivatives of the given forms over one frame cycle."""
        self.goto(t)
        roots, seeds = self._state
        return cauchy_derivatives_many(
            self.H,
            forms,
            self.cycles[cycle_index],
            t,
            order,
            self.quad,
            crit_values=self.crit_values,
            radius=radius,
            nodes=nodes,
            state0=(roots, seeds[cycle_index]),
        )

    def wronskian(
        self,
        form_coeffs: Sequence[complex],
        t: complex,
        order: Optional[int] = None,
        cycle_subset: Optional[Sequence[int]] = None,
    ) -> complex:
        """Wronskian of the form's periods over the frame cycles at t."""
        n = self.H.n
        order = n - 1 if order is None else order
        subset = list(range(n)) if cycle_subset is None else list(cycle_subset)
        basis = [self.H.petrov_form(i) for i in range(1, n + 1)]
        coeffs = np.asarray(form_coeffs, dtype=complex)
        cols = [coeffs @ self.derivatives(basis, j, t, order) for j in subset]
        return complex(np.linalg.det(np.stack(cols, axis=1)))


# ---------------------------------------------------------------------------
# Wronskians and multiplicity estimation
# ---------------------------------------------------------------------------


def wronskian_of_form(
    H: HyperellipticHamiltonian,
    form_coeffs: Sequence[complex],
    t: complex,
    order: Optional[int] = None,
    quad: QuadOptions = DEFAULT_QUAD,
    cycles: Optional[List[Cycle]] = None,
    crit_values: Optional[Sequence[complex]] = None,
) -> complex:
    """W(t) of the n period functions (one per basis cycle) of one form.

    The form is a constant combination of the basis forms; derivatives up to
    n-1 come from Cauchy circles per cycle.
    """
    n = H.n
    order = n - 1 if order is None else order
    bs = branch_points(H, t)
    if cycles is None:
        cycles = cycle_basis(H, t, bs)
    basis = [H.petrov_form(i) for i in range(1, n + 1)]
    cols = []
    for cyc in cycles[: len(cycles)]:
        derivs = cauchy_derivatives_many(
            H, basis, cyc, t, order, quad, crit_values=crit_values
        )
        cols.append(np.asarray(form_coeffs, dtype=complex) @ derivs)
    W = np.stack(cols, axis=1)  # rows: derivative order, cols: cycles
    return complex(np.linalg.det(W))


@dataclass
class MultiplicityEstimate:
    order: int
    flat: bool
    magnitudes: List[float]
    taylor_scales: List[float]
    bound: int
    tol: float
    exactness_hint: Optional[bool] = None

    def to_json(self):
        return {
            "order": self.order,
            "flat": self.flat,
            "magnitudes": self.magnitudes,
            "taylor_scales": self.taylor_scales,
            "bound": self.bound,
            "tol": self.tol,
            "exactness_hint": self.exactness_hint,
        }


def multiplicity_estimate(
    H: HyperellipticHamiltonian,
    form_coeffs: Sequence[complex],
    t0: complex,
    tol: float = 1e-7,
    quad: QuadOptions = DEFAULT_QUAD,
    cycle: Optional[Cycle] = None,
    extra_orders: int = 1,
) -> MultiplicityEstimate:
    """Smallest k with a non-negligible k-th derivative of the integral.

    Magnitudes are compared on the Taylor scale |I^(k)| rho^k / k! of the
    Cauchy circle, which keeps the numeric noise floor flat across orders.
    If everything up to the bound is negligible the result is flagged flat,
    and the caller may consult the exact reduction of the form (a zero class
    integrates to zero on every cycle).
    """
    from .flatness import multiplicity_bound

    n = H.n
    bound = multiplicity_bound(n)
    order = bound + extra_orders
    bs = branch_points(H, t0)
    if bs.near_critical:
        raise NearCriticalError(f"t0={t0} too close to a critical value")
    cycles = cycle_basis(H, t0, bs)
    cyc = cycle if cycle is not None else cycles[0]
    basis = [H.petrov_form(i) for i in range(1, n + 1)]
    crit = critical_data(H).values
    derivs = cauchy_derivatives_many(H, basis, cyc, t0, order, quad, crit_values=crit)
    series = np.asarray(form_coeffs, dtype=complex) @ derivs

    dist = min(abs(t0 - c) for c in crit)
    rho = 0.5 * dist
    fact = np.cumprod(np.concatenate([[1.0], np.arange(1.0, order + 1)]))
    taylor = np.abs(series) * rho ** np.arange(order + 1) / fact

    scale = max(1.0, float(np.max(taylor)))
    k_found = None
    for k in range(order + 1):
        if taylor[k] > tol * scale:
            k_found = k
            break
    flat = k_found is None
    return MultiplicityEstimate(
        order=-1 if flat else int(k_found),
        flat=flat,
        magnitudes=[float(a) for a in np.abs(series)],
        taylor_scales=[float(a) for a in taylor],
        bound=bound,
        tol=tol,
    )


def regular_samples(
    H: HyperellipticHamiltonian,
    count: int,
    seed: int = 0,
    spread: float = 1.6,
) -> List[complex]:
    """Deterministic regular parameter values, well away from critical ones."""
    crit = critical_data(H).values
    center = sum(crit) / len(crit) if crit else 0j
    scale = max([abs(c - center) for c in crit] + [1.0])
    rng = np.random.default_rng(seed)
    out: List[complex] = []
    tries = 0
    while len(out) < count and tries < 1000 * count:
        tries += 1
        ang = rng.uniform(0, 2 * np.pi)
        rad = scale * spread * (1.0 + rng.uniform(0, 1.0))
        cand = center + rad * np.exp(1j * ang)
        if min(abs(cand - c) for c in crit) > 0.3 * scale:
            out.append(complex(cand))
    if len(out) < count:
        raise RuntimeError("could not draw regular samples")
    return out
