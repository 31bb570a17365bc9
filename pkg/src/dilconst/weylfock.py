"""Weyl unitaries on a truncated symmetric Fock space.

Inner products are linear in the first argument: <x, y> = sum x_j conj(y_j).
With W(z) = exp(a^dag(z) - a(z)) the Weyl relation reads

    W(y) W(z) = exp(2i Im<y, z>) W(z) W(y),

so vectors with 2 Im<x_l, x_k> = theta_{k,l} give a representation of the
noncommutative torus.  Enlarging the vectors by y_k in extra modes and
compressing back to the first m modes scales W(x_k) by exp(-||y_k||^2 / 2).
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from functools import cached_property

import numpy as np
import scipy.linalg

from .matcore import matrix_exponential, operator_norm
from .rotreps import ThetaMatrix

VECTOR_TOL = 1e-10


def inner(x, y) -> complex:
    """<x, y>, linear in x."""
    return complex(np.dot(np.asarray(x), np.conj(np.asarray(y))))


class FockContext:
    """Multi-indices (n_1, ..., n_m) with sum n_j <= cutoff, graded lexicographic."""

    def __init__(self, modes: int, cutoff: int):
        if modes < 1 or cutoff < 1:
            raise ValueError(f"modes and cutoff must be positive, got {modes}, {cutoff}")
        self.modes = modes
        self.cutoff = cutoff
        basis = []
        for total in range(cutoff + 1):
            for combo in itertools.combinations_with_replacement(range(modes), total):
                idx = [0] * modes
                for j in combo:
                    idx[j] += 1
                basis.append(tuple(idx))
        # within a grade sort lexicographically, largest first occupation first
        basis.sort(key=lambda t: (sum(t), tuple(-v for v in t)))
        self.basis = basis
        self.index = {b: i for i, b in enumerate(basis)}
        assert len(basis) == math.comb(cutoff + modes, modes)

    @property
    def dim(self) -> int:
        return len(self.basis)

    @cached_property
    def occupation(self) -> np.ndarray:
        return np.array([sum(b) for b in self.basis])

    @cached_property
    def creators(self) -> np.ndarray:
        """a_j^dag as a stack (m, D, D) of real matrices."""
        out = np.zeros((self.modes, self.dim, self.dim))
        for i, b in enumerate(self.basis):
            if sum(b) == self.cutoff:
                continue
            for j in range(self.modes):
                up = list(b)
                up[j] += 1
                out[j, self.index[tuple(up)], i] = math.sqrt(up[j])
        return out

    def low_block(self, level: int | None = None) -> np.ndarray:
        """Indices of basis states with total occupation <= level (default cutoff // 2)."""
        level = self.cutoff // 2 if level is None else level
        return np.flatnonzero(self.occupation <= level)

    def vacuum(self) -> np.ndarray:
        v = np.zeros(self.dim, dtype=complex)
        v[0] = 1.0
        return v


def weyl_generator(z, ctx: FockContext) -> np.ndarray:
    """a^dag(z) - a(z) = sum_j z_j a_j^dag - conj(z_j) a_j (anti-Hermitian)."""
    z = np.asarray(z, dtype=complex)
    if z.shape != (ctx.modes,):
        raise ValueError(f"expected a vector of length {ctx.modes}, got {z.shape}")
    g = np.einsum("j,jab->ab", z, ctx.creators)
    return g - g.conj().T


def weyl_matrix(z, ctx: FockContext) -> np.ndarray:
    return matrix_exponential(weyl_generator(z, ctx))


def weyl_commutation_defect(y, z, ctx: FockContext, level: int | None = None) -> float:
    """||P_low (W(y)W(z) - e^{2i Im<y,z>} W(z)W(y)) P_low||."""
    wy, wz = weyl_matrix(y, ctx), weyl_matrix(z, ctx)
    phase = np.exp(2j * np.imag(inner(y, z)))
    low = ctx.low_block(level)
    diff = (wy @ wz - phase * (wz @ wy))[np.ix_(low, low)]
    return operator_norm(diff, hermitian=False)


@dataclass
class VectorSystem:
    x: np.ndarray
    y: np.ndarray
    z: np.ndarray
    theta: ThetaMatrix
    theta_prime: ThetaMatrix

    @property
    def d(self) -> int:
        return self.x.shape[0]

    def defects(self) -> dict:
        """Worst violation of each defining identity."""
        d = self.d
        gram_x = self.x @ self.x.conj().T  # (k, l) entry <x_k, x_l>
        gram_z = self.z @ self.z.conj().T
        tx = 2 * np.imag(gram_x.T)  # (k, l) entry 2 Im<x_l, x_k>
        tz = 2 * np.imag(gram_z.T)
        dist = _theta_distance(self.theta, self.theta_prime)
        concat = np.concatenate([self.x, self.y], axis=1)
        return {
            "x_phases": float(np.max(np.abs(tx - self.theta.array))) if d > 1 else 0.0,
            "z_phases": float(np.max(np.abs(tz - self.theta_prime.array))) if d > 1 else 0.0,
            "y_norms": float(np.max(np.abs(np.sum(np.abs(self.y) ** 2, axis=1) - dist / 2))),
            "z_concat": float(np.max(np.abs(self.z - concat))),
        }

    def max_defect(self) -> float:
        return max(self.defects().values())

    def gram_determinant(self) -> float:
        return float(np.real(np.linalg.det(self.x @ self.x.conj().T)))


def _theta_distance(a: ThetaMatrix, b: ThetaMatrix) -> float:
    return float(np.linalg.norm(b.array - a.array, 2))


def x_vectors(theta: ThetaMatrix) -> np.ndarray:
    """x_k = e_k + x~_k in C^d with 2 Im<x_l, x_k> = theta_{k,l}.

    x~_k lies in span{e_1..e_{k-1}} and solves <x_l, x~_k> = (i/2) theta_{k,l}
    for l < k, a lower-triangular system with unit diagonal.
    """
    d = theta.d
    th = theta.array
    x = np.zeros((d, d), dtype=complex)
    for k in range(d):
        x[k, k] = 1.0
        if k == 0:
            continue
        # <x_l, w> = sum_j x_l[j] conj(w[j]); unknown c = conj(w[:k])
        a = x[:k, :k]
        rhs = 0.5j * th[k, :k]
        c = scipy.linalg.solve_triangular(a, rhs, lower=True, unit_diagonal=True)
        x[k, :k] = np.conj(c)
    return x


def y_vectors(theta: ThetaMatrix, theta_prime: ThetaMatrix, tol: float = VECTOR_TOL) -> np.ndarray:
    """Rows y_k of Y, where Y^*Y = ||D|| / 2 I + (i/2) D and D = Theta' - Theta.

    Uses the Hermitian eigen square root, so Y is Hermitian and positive.
    """
    diff = theta_prime.array - theta.array
    norm = float(np.linalg.norm(diff, 2)) if theta.d > 1 else 0.0
    target = 0.5 * norm * np.eye(theta.d) + 0.5j * diff
    w, v = np.linalg.eigh(target)
    if w.min() < -tol:
        raise ValueError(f"factor target is not positive semidefinite (min eigenvalue {w.min():.3e})")
    root = (v * np.sqrt(np.clip(w, 0, None))) @ v.conj().T
    # <y_l, y_k> = (Y^* Y)_{k,l} with y_k the k-th column of Y
    return root.T.copy()


def construct_vectors(theta: ThetaMatrix, theta_prime: ThetaMatrix) -> VectorSystem:
    if theta.d != theta_prime.d:
        raise ValueError(f"dimension mismatch: {theta.d} vs {theta_prime.d}")
    x = x_vectors(theta)
    y = y_vectors(theta, theta_prime)
    z = np.concatenate([x, y], axis=1)
    return VectorSystem(x, y, z, theta, theta_prime)


@dataclass
class CompressionReport:
    residuals: list
    scale: float
    scale_from_y: list
    commutation_defect: float
    phase_defect: float
    gauge_defect: float
    cutoff: int
    level: int

    @property
    def max_residual(self) -> float:
        return max(self.residuals) if self.residuals else 0.0

    def to_dict(self) -> dict:
        out = asdict(self)
        out["max_residual"] = self.max_residual
        return out


def verify_compression(
    sys: VectorSystem,
    cutoff: int = 10,
    tol: float | None = None,
    gauge_point=None,
) -> CompressionReport:
    """Compress W(z_k) on Gamma(C^{m+d}) to Gamma(C^m) and compare with e^{-|y_k|^2/2} W(x_k).

    Residuals are measured on the low x low block (total occupation <= cutoff / 2).
    Also reports, for the compressed family, the operator-norm defect of the
    twisted commutation relation, the phase defect |lambda_kl - e^{i theta_kl}|
    where lambda_kl is the least-squares scalar with
    P W(x_l)W(x_k) P ~ lambda_kl P W(x_k)W(x_l) P, and the gauge identity W(x)^* W(x_k) W(x) = e^{i t_k} W(x_k), with
    t_k = 2 Im<x_k, x>, at ``gauge_point`` (default: the sum of the x_k / 4).
    """
    d = sys.d
    m = sys.x.shape[1]
    big = FockContext(m + d, cutoff)
    small = FockContext(m, cutoff)
    embed = np.array([big.index[b + (0,) * d] for b in small.basis])
    low = small.low_block()
    residuals, compressed = [], []
    for k in range(d):
        wz = weyl_matrix(sys.z[k], big)
        comp = wz[np.ix_(embed, embed)]
        ref = math.exp(-0.5 * float(np.sum(np.abs(sys.y[k]) ** 2))) * weyl_matrix(sys.x[k], small)
        residuals.append(operator_norm((comp - ref)[np.ix_(low, low)], hermitian=False))
        compressed.append(ref)
    comm = phase_defect = 0.0
    wx = [weyl_matrix(sys.x[k], small) for k in range(d)]
    for k in range(d):
        for l in range(k + 1, d):
            phase = np.exp(1j * sys.theta[k, l])
            lhs = (wx[l] @ wx[k])[np.ix_(low, low)]
            rhs = (wx[k] @ wx[l])[np.ix_(low, low)]
            comm = max(comm, operator_norm(lhs - phase * rhs, hermitian=False))
            fit = np.vdot(rhs, lhs) / np.vdot(rhs, rhs)
            phase_defect = max(phase_defect, float(abs(fit - phase)))
    xg = np.asarray(gauge_point if gauge_point is not None else sys.x.sum(axis=0) / 4, dtype=complex)
    wg = weyl_matrix(xg, small)
    gauge = 0.0
    for k in range(d):
        t = 2 * np.imag(inner(sys.x[k], xg))
        diff = (wg.conj().T @ wx[k] @ wg - np.exp(1j * t) * wx[k])[np.ix_(low, low)]
        gauge = max(gauge, operator_norm(diff, hermitian=False))
    dist = _theta_distance(sys.theta, sys.theta_prime)
    report = CompressionReport(
        residuals=residuals,
        scale=math.exp(dist / 4),
        scale_from_y=[math.exp(0.5 * float(np.sum(np.abs(y) ** 2))) for y in sys.y],
        commutation_defect=comm,
        phase_defect=phase_defect,
        gauge_defect=gauge,
        cutoff=cutoff,
        level=cutoff // 2,
    )
    if tol is not None and report.max_residual > tol:
        raise ValueError(
            f"compression residual {report.max_residual:.3e} exceeds {tol:.1e}; increase the cutoff"
        )
    return report
