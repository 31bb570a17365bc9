"""Level-1 matrix ranges through support functions.

For a tuple A = (A_1, ..., A_d) the first level W_1(A) is a compact convex
subset of C^d, and with the pairing Re<x, c> = Re sum x_i conj(c_i)

    h_A(c) = max_{x in W_1(A)} Re<x, c> = lambda_max(Re sum conj(c_i) A_i).

A *family* is the union over a box of gauge phases of W_1 of
(e^{i phi_1} A_1, ..., e^{i phi_d} A_d); for the irreducible families of a
rational rotation algebra this is W_1 of the universal generators.  Its
support function depends only on |c_1|, ..., |c_d|.

Distances between sets use the max norm on C^d, whose dual is the l1 norm:
d_H(E, F) = sup_{||c||_1 = 1} |h_E(c) - h_F(c)|.  Each h is Lipschitz in l1
with constant max_i ||A_i||, which turns a finite direction net into a
two-sided bound.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass

import numpy as np

from . import torus
from .certificate import BoundKind, CertifiedValue
from .matcore import UnitaryTuple, operator_norm
from .rotreps import RationalAngle, gauge_domain, irrep_base

TWO_PI = 2 * math.pi
_POLYDISC_TOL = 1e-9


@dataclass
class Family:
    """Union over phases in [lo, hi] of the tuple base with phases applied."""

    base: np.ndarray
    lo: np.ndarray
    hi: np.ndarray
    label: str = ""

    def __post_init__(self):
        self.base = np.asarray(self.base.matrices if isinstance(self.base, UnitaryTuple) else self.base,
                               dtype=complex)
        self.lo = np.asarray(self.lo, dtype=float)
        self.hi = np.asarray(self.hi, dtype=float)

    @classmethod
    def rotation(cls, angle: RationalAngle, d: int) -> "Family":
        """Irreducible family of the constant-angle rotation algebra (d <= 3)."""
        lo, hi = gauge_domain(angle.n, d, True)
        return cls(irrep_base(angle, d).matrices, lo, hi, f"rotation {angle} d={d}")

    @classmethod
    def commuting(cls, d: int, radius: float = 1.0) -> "Family":
        """The universal commuting tuple u_0 (scaled by ``radius``): W_1 is a polydisc."""
        return cls(radius * np.ones((d, 1, 1), dtype=complex), np.zeros(d), np.full(d, TWO_PI),
                   f"commuting d={d} r={radius}")

    @property
    def d(self) -> int:
        return self.base.shape[0]

    @property
    def lipschitz(self) -> float:
        """max_i ||A_i||: l1-Lipschitz constant of the support function."""
        return max(operator_norm(a, hermitian=False) for a in self.base)

    @property
    def radius2(self) -> float:
        """Bound on the Euclidean radius of W_1."""
        return math.sqrt(sum(operator_norm(a, hermitian=False) ** 2 for a in self.base))


def _as_tuple(a) -> np.ndarray:
    if isinstance(a, UnitaryTuple):
        return a.matrices
    return np.asarray(a, dtype=complex)


def support_function(a, c) -> float:
    """lambda_max(Re sum conj(c_i) A_i) for a single tuple."""
    mats = _as_tuple(a)
    c = np.asarray(c, dtype=complex)
    return float(support_batch(mats, c[None])[0])


def support_batch(mats, directions) -> np.ndarray:
    mats = _as_tuple(mats)
    directions = np.atleast_2d(np.asarray(directions, dtype=complex))
    g = np.einsum("mk,kij->mij", directions.conj(), mats) / 2
    vals = np.linalg.eigvalsh(g + np.conj(np.swapaxes(g, 1, 2)))[:, -1]
    bound = np.abs(directions).sum(axis=1) * max(operator_norm(x, hermitian=False) for x in mats)
    if np.any(vals > bound + _POLYDISC_TOL):
        raise AssertionError("support exceeds the polydisc bound; input is not a contraction tuple")
    return vals


def family_support(fam: Family, moduli, grid_step: float = 1e-2) -> tuple[float, float]:
    """Certified bracket for the family support at a direction with the given moduli."""
    r = np.asarray(moduli, dtype=float)
    if np.all(r == 0):
        return 0.0, 0.0
    res = torus.maximize(fam.base * (r / 2)[:, None, None], fam.lo, fam.hi, grid_step)
    bound = float(r.sum()) * fam.lipschitz
    if res.lower > bound + _POLYDISC_TOL:
        raise AssertionError("family support exceeds the polydisc bound")
    return res.lower, min(res.upper, bound)


def family_support_grid(fam: Family, moduli, level: int = 0, base_points: int = 8) -> float:
    """Lower estimate on the nested vertex grid with base_points * 2^level points per axis.

    Grids at successive levels are nested, so the value never decreases
    under refinement.
    """
    r = np.asarray(moduli, dtype=float)
    p = base_points * 2**level
    axes = [fam.lo[i] + (fam.hi[i] - fam.lo[i]) * np.arange(p) / p for i in range(fam.d)]
    pts = np.array(list(itertools.product(*axes)))
    return float(torus.evaluate(fam.base * (r / 2)[:, None, None], pts).max())


def _family_support_lower(fam: Family, moduli, grid_step: float) -> float:
    r = np.asarray(moduli, dtype=float)
    if np.all(r == 0):
        return 0.0
    return torus.local_max(fam.base * (r / 2)[:, None, None], fam.lo, fam.hi, grid_step, budget=2000).lower


def simplex_net(d: int, k: int) -> np.ndarray:
    """Points of the standard simplex with coordinates in (1/k) Z; l1 covering radius <= d / k."""
    pts = [c for c in itertools.product(range(k + 1), repeat=d - 1) if sum(c) <= k]
    return np.array([list(c) + [k - sum(c)] for c in pts], dtype=float) / k


def l1_sphere_net(d: int, k: int, phases: int) -> tuple[np.ndarray, float]:
    """Complex directions with ||c||_1 = 1 and their l1 covering radius."""
    moduli = simplex_net(d, k)
    angles = TWO_PI * np.arange(phases) / phases
    rot = np.exp(1j * np.array(list(itertools.product(angles, repeat=d))))
    dirs = (moduli[:, None, :] * rot[None, :, :]).reshape(-1, d)
    return dirs, d / k + math.pi / phases


def _is_family(x) -> bool:
    return isinstance(x, Family)


def _same(a, b) -> bool:
    if _is_family(a) != _is_family(b):
        return False
    if _is_family(a):
        return (a.base.shape == b.base.shape and np.array_equal(a.base, b.base)
                and np.array_equal(a.lo, b.lo) and np.array_equal(a.hi, b.hi))
    ma, mb = _as_tuple(a), _as_tuple(b)
    return ma.shape == mb.shape and np.array_equal(ma, mb)


def _lipschitz(x) -> float:
    if _is_family(x):
        return x.lipschitz
    return max(operator_norm(m, hermitian=False) for m in _as_tuple(x))


def hausdorff_level1(
    a,
    b,
    resolution: int = 100,
    phases: int = 24,
    grid_step: float = 1e-2,
) -> CertifiedValue:
    """Two-sided bound on d_H(W_1(a), W_1(b)) in the max norm.

    ``a`` and ``b`` are tuples or :class:`Family` objects.  When both are
    families only the moduli simplex is sampled; otherwise a product net of
    moduli and phases is used.
    """
    d_a = a.d if _is_family(a) else _as_tuple(a).shape[0]
    d_b = b.d if _is_family(b) else _as_tuple(b).shape[0]
    if d_a != d_b:
        raise ValueError(f"tuples have different lengths {d_a} and {d_b}")
    d = d_a
    method = {"resolution": resolution, "norm": "max", "directions": "l1 sphere"}
    if _same(a, b):
        return CertifiedValue(0.0, 0.0, BoundKind.TWO_SIDED, dict(method, identical=True))
    if _is_family(a) and _is_family(b):
        moduli = simplex_net(d, resolution)
        dirs = moduli.astype(complex)
        rho = d / resolution
    else:
        dirs, rho = l1_sphere_net(d, resolution, phases)
        moduli = np.abs(dirs)
        method["phases"] = phases

    def brackets(x):
        if not _is_family(x):
            v = support_batch(x, dirs)
            return v, v
        keys, inv = np.unique(np.round(moduli, 12), axis=0, return_inverse=True)
        vals = np.array([family_support(x, m, grid_step) for m in keys])
        return vals[inv.ravel(), 0], vals[inv.ravel(), 1]

    a_lo, a_hi = brackets(a)
    b_lo, b_hi = brackets(b)
    lower = float(max(0.0, np.max(np.maximum(a_lo - b_hi, b_lo - a_hi))))
    upper = float(np.max(np.maximum(a_hi - b_lo, b_hi - a_lo))) + (_lipschitz(a) + _lipschitz(b)) * rho
    method.update(covering_radius=rho, net_size=len(dirs), grid_step=grid_step)
    return CertifiedValue.bracket(lower, max(lower, upper), method)


def orthant_face_net(dim: int, spacing: float) -> tuple[np.ndarray, float]:
    """Unit vectors of the closed positive orthant of R^dim from gridded cube faces.

    Radial projection onto the sphere does not increase distances outside the
    ball, so the Euclidean covering radius is (spacing / 2) sqrt(dim - 1).
    """
    m = int(math.ceil(1.0 / spacing))
    axis = np.linspace(0.0, 1.0, m + 1)
    pts = []
    for j in range(dim):
        for rest in itertools.product(axis, repeat=dim - 1):
            p = list(rest)
            p.insert(j, 1.0)
            pts.append(p)
    pts = np.unique(np.array(pts), axis=0)
    return pts / np.linalg.norm(pts, axis=1)[:, None], 0.5 * (1.0 / m) * math.sqrt(dim - 1)


def cube_face_net(dim: int, spacing: float) -> tuple[np.ndarray, float]:
    """Unit vectors of R^dim from gridded faces of [-1, 1]^dim."""
    m = int(math.ceil(2.0 / spacing))
    axis = np.linspace(-1.0, 1.0, m + 1)
    pts = []
    for j in range(dim):
        for s in (-1.0, 1.0):
            for rest in itertools.product(axis, repeat=dim - 1):
                p = list(rest)
                p.insert(j, s)
                pts.append(p)
    pts = np.unique(np.array(pts), axis=0)
    return pts / np.linalg.norm(pts, axis=1)[:, None], 0.5 * (2.0 / m) * math.sqrt(dim - 1)


@dataclass
class BallReport:
    delta_verified: float
    target: float
    min_support: float
    min_support_over_max_norm: float
    covering_radius: float
    net_size: int
    passes: bool

    def to_dict(self) -> dict:
        return asdict(self)


def l1_ball_containment(
    obj,
    delta: float | None = None,
    spacing: float = 0.05,
    grid_step: float = 1e-2,
    tol: float = 1e-3,
) -> BallReport:
    """Largest verified Euclidean radius delta with B_delta(0) inside W_1.

    B_delta is inside W_1 iff h(c) >= delta for every Euclidean unit c.  The
    minimum of rigorous lower bounds of h over a net, less the Lipschitz slack
    (Euclidean radius of W_1 times the covering radius), is verified.  The
    default target is 1/sqrt(d), the radius of the Euclidean ball inscribed in
    the l1 unit ball; ``min_support_over_max_norm`` estimates the largest
    multiple of the l1 ball that fits.
    """
    if _is_family(obj):
        d = obj.d
        net, rho = orthant_face_net(d, spacing) if d > 1 else (np.ones((1, 1)), 0.0)
        vals = np.array([_family_support_lower(obj, m, grid_step) for m in net])
        radius = obj.radius2
    else:
        mats = _as_tuple(obj)
        d = mats.shape[0]
        real, rho = cube_face_net(2 * d, spacing)
        net = real[:, :d] + 1j * real[:, d:]
        vals = support_batch(mats, net)
        radius = math.sqrt(sum(operator_norm(m, hermitian=False) ** 2 for m in mats))
    target = 1 / math.sqrt(d) if delta is None else delta
    verified = float(vals.min() - radius * rho)
    ratio = float(np.min(vals / np.abs(net).max(axis=1)))
    return BallReport(verified, target, float(vals.min()), ratio, rho, len(net), verified >= target - tol)


@dataclass
class AuditRow:
    theta: list
    theta_prime: list
    lower: float
    upper: float
    margin: float
    passes: bool


def angle_distance(a: RationalAngle, b: RationalAngle) -> float:
    """|theta - theta'| reduced to [0, pi]."""
    diff = abs(float(a.fraction - b.fraction)) % 1.0
    return TWO_PI * min(diff, 1.0 - diff)


def metric_inequality_audit(
    pairs,
    d: int = 2,
    resolution: int = 100,
    grid_step: float = 1e-2,
    slack: float = 0.0,
) -> list[AuditRow]:
    """Check the level-1 lower estimate of d_mr against exp(||Theta - Theta'|| / 4) - 1.

    The matrix-range distance is at least the level-1 Hausdorff distance, and
    at most max(c, c') - 1 where both constants are below exp(||Theta - Theta'|| / 4).
    """
    rows = []
    for a, b in pairs:
        dist = angle_distance(a, b) * (1.0 if d == 2 else math.sqrt(3))
        upper = math.exp(dist / 4) - 1
        if a == b:
            lower = 0.0
        else:
            lower = hausdorff_level1(Family.rotation(a, d), Family.rotation(b, d), resolution,
                                     grid_step=grid_step).lower
        rows.append(AuditRow([a.m, a.n], [b.m, b.n], lower, upper, upper - lower, lower <= upper + slack))
    return rows
