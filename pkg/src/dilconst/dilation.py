"""Dilation constants of noncommutative tori.

The central quantity is the universal norm of h = sum_k u_k + u_k^*,
obtained as the sup over the gauge phases of an irreducible family, and

    c_Theta = 1 / min_{t in simplex} || Re sum_k t_k u_k ||,

which for constant Theta reduces to 2d / ||h||.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np
import scipy.optimize

from . import torus
from .certificate import BoundKind, CertifiedValue
from .matcore import UnitaryTuple, operator_norm
from .rotreps import (
    RationalAngle,
    ThetaMatrix,
    gauge_domain,
    irrep_base,
    rational_approximation,
    relation_residual,
    tensor_rep,
)

DEFAULT_GRID = 2e-3


class CertificateError(RuntimeError):
    """Raised when a certificate cannot meet the requested accuracy."""


def _family(angle: RationalAngle, d: int) -> UnitaryTuple:
    return irrep_base(angle, d)


def _sweep(base: UnitaryTuple, lo, hi, grid_step, workers, weights=None, certified=True) -> torus.TorusMax:
    coeffs = base.matrices if weights is None else base.matrices * np.asarray(weights)[:, None, None]
    if certified:
        return torus.maximize(coeffs, lo, hi, grid_step, workers=workers)
    return torus.local_max(coeffs, lo, hi, grid_step, workers=workers)


def h_norm_certified(
    angle: RationalAngle,
    d: int,
    grid_step: float = DEFAULT_GRID,
    reduce: bool = True,
    workers: int = 1,
) -> CertifiedValue:
    """Two-sided certificate for ||h|| over the irreducible family, d in {2, 3}."""
    if not grid_step > 0:
        raise ValueError(f"grid_step must be positive, got {grid_step}")
    if d not in (1, 2, 3):
        raise ValueError(f"certified family only for d in {{1, 2, 3}}, got {d}")
    if grid_step > 2 * math.pi / angle.n:
        raise ValueError(f"grid_step {grid_step} exceeds 2*pi/n = {2 * math.pi / angle.n:.6g}")
    if angle.n == 1 or d == 1:
        return CertifiedValue(2.0 * d, 0.0, BoundKind.TWO_SIDED, {"analytic": "commuting phases aligned"})
    lo, hi = gauge_domain(angle.n, d, reduce)
    res = _sweep(_family(angle, d), lo, hi, grid_step, workers)
    method = {
        "grid_step": grid_step,
        "lipschitz_per_phase": res.lipschitz.tolist(),
        "symmetry_reduction": bool(reduce),
        "levels": res.levels,
        "evaluations": res.evaluations,
        "lower": res.lower,
        "upper": res.upper,
        "argmax": res.argmax.tolist(),
        "angle": [angle.m, angle.n],
        "d": d,
    }
    return CertifiedValue.bracket(res.lower, res.upper, method)


def _c_from_h(h: CertifiedValue, d: int, extra: dict | None = None) -> CertifiedValue:
    method = dict(h.method)
    method.update(extra or {})
    if h.error_bound == 0:
        return CertifiedValue(2 * d / h.value, 0.0, BoundKind.TWO_SIDED, method)
    return CertifiedValue.bracket(2 * d / h.upper, 2 * d / h.lower, method)


def c_theta_constant(
    angle: RationalAngle,
    d: int,
    grid_step: float = DEFAULT_GRID,
    reduce: bool = True,
    workers: int = 1,
) -> CertifiedValue:
    """c_Theta = 2d / ||h|| for the constant matrix with angle above the diagonal."""
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    if d == 1 or angle.n == 1:
        return CertifiedValue(1.0, 0.0, BoundKind.TWO_SIDED, {"analytic": "commuting"})
    if d <= 3:
        return _c_from_h(h_norm_certified(angle, d, grid_step, reduce, workers), d)
    # no irreducible classification: a representation only bounds ||h|| from below
    rep = tensor_rep(ThetaMatrix.constant(d, angle))
    res = _sweep(rep, np.zeros(d), np.full(d, 2 * math.pi), grid_step, workers, certified=False)
    method = {"grid_step": grid_step, "heuristic": True, "representation": "tensor",
              "h_lower": res.lower}
    # only the side c <= 2d / ||h||_rep is rigorous; the trivial c >= 1 is the other side
    return CertifiedValue(2 * d / res.lower, 2 * d / res.lower - 1.0, BoundKind.CERTIFIED_UPPER, method)


def lipschitz_transfer(value: CertifiedValue, distance: float) -> CertifiedValue:
    """Widen a bracket for c_Theta to c_Theta' using |log c - log c'| <= ||Theta - Theta'|| / 4."""
    f = math.exp(distance / 4)
    method = dict(value.method)
    method["transfer_distance"] = distance
    return CertifiedValue.bracket(value.lower / f, value.upper * f, method)


@dataclass
class IrrationalResult:
    approximant: RationalAngle
    distance: float
    raw: CertifiedValue
    transferred: CertifiedValue


def c_theta_irrational(
    theta: float,
    d: int = 2,
    max_den: int = 200,
    grid_step: float | None = None,
    workers: int = 1,
) -> IrrationalResult:
    """c at an arbitrary angle through its best convergent with denominator <= max_den."""
    approx = rational_approximation(theta, max_den)
    delta = abs(((theta - approx.value) + math.pi) % (2 * math.pi) - math.pi)
    dist = delta * float(np.linalg.norm(ThetaMatrix.constant(d, 1.0).array, 2)) if d > 1 else 0.0
    step = grid_step if grid_step is not None else 2 * math.pi / approx.n
    raw = c_theta_constant(approx, d, step, workers=workers)
    return IrrationalResult(approx, dist, raw, lipschitz_transfer(raw, dist))


def _representation(theta: ThetaMatrix):
    """Representation whose gauge orbit covers all irreducibles, when one is known."""
    const = theta.constant_angle()
    if const is not None and theta.d <= 3:
        lo, hi = gauge_domain(const.n, theta.d, True)
        return _family(const, theta.d), lo, hi, True
    rep = tensor_rep(theta)
    return rep, np.zeros(theta.d), np.full(theta.d, 2 * math.pi), False


@dataclass
class SimplexSearch:
    weights: np.ndarray
    norm_upper: float
    norm_lower: float
    evaluations: int
    history: list = field(default_factory=list)


def _simplex_grid(d: int, k: int) -> np.ndarray:
    pts = [c for c in itertools.product(range(k + 1), repeat=d - 1) if sum(c) <= k]
    return np.array([list(c) + [k - sum(c)] for c in pts], dtype=float) / k


def _minorant(base: UnitaryTuple, phases: np.ndarray) -> np.ndarray:
    """g with ||Re sum t_k u_k|| >= g . t for every t (top eigenvector at the given phases)."""
    mats = base.with_phases(phases).matrices
    re = 0.5 * (mats + np.conj(np.swapaxes(mats, 1, 2)))
    _, vecs = np.linalg.eigh(re.sum(axis=0))
    xi = vecs[:, -1]
    return np.real(np.einsum("i,kij,j->k", xi.conj(), re, xi))


def minimize_over_simplex(
    base: UnitaryTuple,
    lo,
    hi,
    grid_step: float,
    coarse: int = 4,
    iterations: int = 40,
    tol: float = 1e-6,
    workers: int = 1,
    certified: bool = True,
) -> SimplexSearch:
    """min over t of sup_phases lambda_max(Re sum t_k e^{i phi_k} u_k), with a bracket.

    Upper bound: the best inner upper bound over evaluated weights (an
    estimate only when ``certified`` is False).
    Lower bound: every evaluated phase point gives a linear minorant g . t of
    the (convex) objective; the dual weights of the LP min_t max_p g_p . t
    certify min_k sum_p lambda_p g_{p,k} as a lower bound.
    """
    d = base.d
    if d == 1:
        return SimplexSearch(np.ones(1), 1.0, 1.0, 0)
    pts = list(_simplex_grid(d, coarse))
    cuts: list[np.ndarray] = []
    best_upper, best_t = math.inf, None
    lower = -math.inf
    evaluations = 0
    history = []
    seen = set()
    inner_width = 0.0
    for it in range(iterations + 1):
        for t in pts:
            seen.add(tuple(np.round(t, 9)))
            res = _sweep(base, lo, hi, grid_step, workers, weights=0.5 * t, certified=certified)
            evaluations += 1
            cuts.append(_minorant(base, res.argmax))
            if res.upper < best_upper:
                best_upper, best_t = res.upper, np.asarray(t, dtype=float)
                inner_width = res.width
        g = np.array(cuts)
        lam, t_star = _cutting_plane_lp(g)
        lower = max(lower, float(np.min(lam @ g)))
        history.append((it, lower, best_upper))
        if best_upper - lower <= tol + inner_width or tuple(np.round(t_star, 9)) in seen:
            break
        pts = [t_star]
    return SimplexSearch(best_t, best_upper, lower, evaluations, history)


def _cutting_plane_lp(g: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Solve min_{t in simplex} max_p g_p . t; returns (dual weights, minimizer)."""
    p, d = g.shape
    # variables (t_1..t_d, z): minimise z subject to g t - z <= 0, sum t = 1
    c = np.zeros(d + 1)
    c[-1] = 1.0
    a_ub = np.hstack([g, -np.ones((p, 1))])
    a_eq = np.hstack([np.ones((1, d)), np.zeros((1, 1))])
    bounds = [(0, None)] * d + [(None, None)]
    res = scipy.optimize.linprog(c, A_ub=a_ub, b_ub=np.zeros(p), A_eq=a_eq, b_eq=[1.0],
                                 bounds=bounds, method="highs")
    if res.status != 0:
        raise CertificateError(f"cutting-plane LP failed: {res.message}")
    lam = np.clip(-res.ineqlin.marginals, 0, None)
    lam = lam / lam.sum() if lam.sum() > 0 else np.full(p, 1.0 / p)
    t = np.clip(res.x[:d], 0, None)
    return lam, t / t.sum()


def c_theta_general(
    theta: ThetaMatrix,
    grid_step: float = 1e-2,
    coarse: int = 4,
    iterations: int = 40,
    tol: float = 1e-6,
    workers: int = 1,
) -> CertifiedValue:
    """c_Theta = 1 / min_t ||Re sum t_k u_k|| for rational Theta.

    Two-sided when the gauge orbit of an irreducible family is available
    (d <= 3 with constant angle); otherwise the tensor representation only
    gives a lower bound on the universal norm and the result is an upper
    bound for c_Theta.
    """
    if not theta.is_rational:
        raise TypeError("c_theta_general needs rational entries")
    if theta.d == 1 or np.all(theta.array == 0):
        return CertifiedValue(1.0, 0.0, BoundKind.TWO_SIDED, {"analytic": "commuting"})
    base, lo, hi, universal = _representation(theta)
    search = minimize_over_simplex(base, lo, hi, grid_step, coarse, iterations, tol, workers, universal)
    method = {
        "grid_step": grid_step,
        "weights": search.weights.tolist(),
        "norm_bracket": [search.norm_lower, search.norm_upper],
        "evaluations": search.evaluations,
        "representation": "irreducible family" if universal else "tensor",
        "simplex_coarse": coarse,
    }
    if universal:
        return CertifiedValue.bracket(1 / search.norm_upper, 1 / search.norm_lower, method)
    method["heuristic"] = True
    return CertifiedValue(1 / search.norm_lower, 1 / search.norm_lower - 1 / search.norm_upper,
                          BoundKind.CERTIFIED_UPPER, method)


def c_two_dim(theta_entry, grid_step: float | None = None, workers: int = 1) -> CertifiedValue:
    """c_theta for d = 2, rational or (via convergent and transfer) real."""
    if isinstance(theta_entry, RationalAngle):
        step = grid_step if grid_step is not None else min(DEFAULT_GRID * 10, 2 * math.pi / theta_entry.n)
        return c_theta_constant(theta_entry, 2, step, workers=workers)
    return c_theta_irrational(float(theta_entry), 2, grid_step=grid_step, workers=workers).transferred


def tensor_upper_bound(theta: ThetaMatrix, grid_step: float | None = None, workers: int = 1) -> float:
    """prod_{l>=2} max_{k<l} c_{theta_{k,l}}, using certified upper ends of the 2D constants."""
    cache: dict = {}
    total = 1.0
    for l in range(1, theta.d):
        col = []
        for k in range(l):
            entry = theta.rational(k, l) or theta[k, l]
            key = entry if isinstance(entry, RationalAngle) else round(float(entry), 15)
            if key not in cache:
                cache[key] = c_two_dim(entry, grid_step, workers).upper
            col.append(cache[key])
        total *= max(col)
    return total


@dataclass
class CommutingDilation:
    """N_k = c * (commuting unitaries), V an isometry with V^* N_k V = U_k."""

    normals: np.ndarray
    isometry: np.ndarray
    scale: float
    base: UnitaryTuple
    h_norm: CertifiedValue

    def commutator_residual(self) -> float:
        worst = 0.0
        for a, b in itertools.combinations(self.normals, 2):
            worst = max(worst, operator_norm(a @ b - b @ a, hermitian=False))
        return worst

    def compression_residual(self) -> float:
        v = self.isometry
        return max(
            operator_norm(v.conj().T @ n @ v - u, hermitian=False)
            for n, u in zip(self.normals, self.base.matrices)
        )

    def norm_defect(self) -> float:
        return max(abs(operator_norm(n, hermitian=False) - self.scale) for n in self.normals)

    def normality_defect(self) -> float:
        return max(
            operator_norm(n @ n.conj().T - n.conj().T @ n, hermitian=False) for n in self.normals
        )


def _cyclic_shift(w: list[np.ndarray]) -> list[np.ndarray]:
    """Apply u_k -> u_{k+1}, u_d -> u_1^* to a tuple."""
    return w[1:] + [w[0].conj().T]


def build_commuting_dilation(
    angle: RationalAngle,
    d: int,
    grid_step: float = DEFAULT_GRID,
    max_width: float | None = None,
    phases=None,
    workers: int = 1,
) -> CommutingDilation:
    """Explicit dilation of the family member at ``phases`` to c times commuting unitaries.

    A top eigenvector of h at the best phases gives a state psi on A_{-Theta}
    (through the complex conjugate representation).  After a gauge correction
    making psi(w_k) >= 0, averaging over the cyclic automorphism yields a
    vector state phi on a d-fold direct sum with phi(w_k) = alpha for all k,
    and N_k = U_k (x) Pi(w_k) / alpha.
    """
    if d not in (2, 3):
        raise ValueError(f"d must be 2 or 3, got {d}")
    h = h_norm_certified(angle, d, grid_step, workers=workers)
    width = h.upper - h.lower
    if max_width is not None and width > max_width:
        raise CertificateError(
            f"certificate width {width:.3e} exceeds requested {max_width:.3e}; use a finer grid"
        )
    from .rotreps import irrep_d2, irrep_d3_constant

    make = irrep_d2 if d == 2 else irrep_d3_constant
    base = make(angle, np.zeros(d) if phases is None else phases)
    if angle.n == 1:
        return CommutingDilation(base.matrices.copy(), np.eye(1, dtype=complex), 1.0, base, h)

    best_phases = np.asarray(h.method["argmax"])
    opt = make(angle, best_phases)
    _, vecs = np.linalg.eigh(opt.hsum())
    xi = vecs[:, -1].conj()
    w = [m.conj() for m in opt.matrices]
    for k in range(d):
        val = np.vdot(xi, w[k] @ xi)
        w[k] = w[k] * np.exp(-1j * np.angle(val))
    reps = [w]
    for _ in range(d - 1):
        reps.append(_cyclic_shift(reps[-1]))
    n = angle.n
    pi_w = []
    for k in range(d):
        block = np.zeros((d * n, d * n), dtype=complex)
        for j, rep in enumerate(reps):
            block[j * n:(j + 1) * n, j * n:(j + 1) * n] = rep[k]
        pi_w.append(block)
    eta = np.concatenate([xi] * d) / math.sqrt(d)
    alpha = float(np.real(np.vdot(eta, pi_w[0] @ eta)))
    normals = np.stack([np.kron(u, p) / alpha for u, p in zip(base.matrices, pi_w)])
    iso = np.kron(np.eye(n, dtype=complex), eta[:, None])
    return CommutingDilation(normals, iso, 1.0 / alpha, base, h)


def check_relations(u: UnitaryTuple, theta: ThetaMatrix) -> float:
    return relation_residual(u, theta)


KNOWN_LOWER = {2: 1.543, 3: 1.858}


@dataclass(frozen=True)
class ClosedForms:
    d: int
    c_uf: float
    c_f0_lower: float | None
    c_f0_upper: float | None
    C_d_upper: float
    C_d_lower_known: float
    product_defect: float

    def to_dict(self) -> dict:
        return dict(self.__dict__)


def closed_form_constants(d: int) -> ClosedForms:
    """Exact constants for free and commuting Haar unitaries.

    c(u, u_f) = d / sqrt(2d - 1); 2 sqrt(1 - 1/d) <= c(u_f, u_0) <= 2 sqrt(1 - 1/(2d))
    for d >= 2; C_d = c(u, u_0) <= sqrt(2d), and c(u, u_f) c_f0_upper = sqrt(2d).
    """
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    c_uf = d / math.sqrt(2 * d - 1)
    upper = 2 * math.sqrt(1 - 1 / (2 * d)) if d >= 2 else None
    lower = 2 * math.sqrt(1 - 1 / d) if d >= 2 else None
    root = math.sqrt(2 * d)
    defect = abs(c_uf * upper - root) if upper is not None else 0.0
    if defect > 1e-12 * root:
        raise ArithmeticError(f"c_uf * c_f0_upper differs from sqrt(2d) by {defect:.3e}")
    known = 1.0 if d == 1 else KNOWN_LOWER.get(d, math.sqrt(d))
    return ClosedForms(d, c_uf, lower, upper, root, known, defect)
