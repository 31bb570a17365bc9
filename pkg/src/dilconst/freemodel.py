"""Random-matrix models of free Haar unitaries.

Independent Haar unitaries of size N are asymptotically free, and operator
norms of polynomials in them converge (from below, typically) to the norms
in the reduced free group algebra.  Everything here is Monte-Carlo and
seeded: trial ``j`` draws from ``SeedSequence(seed).spawn(trials)[j]``, so
serial and threaded runs produce identical numbers.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

import numpy as np
import scipy.sparse.linalg
import scipy.stats

from . import torus
from .certificate import BoundKind, CertifiedValue
from .matcore import UnitaryTuple, operator_norm


@dataclass(frozen=True)
class SampleConfig:
    N: int
    trials: int = 1
    seed: int = 0
    d: int = 2

    def __post_init__(self):
        if self.N < 2:
            raise ValueError(f"matrix size N must be at least 2, got {self.N}")
        if self.trials < 1:
            raise ValueError(f"trials must be positive, got {self.trials}")
        if self.d < 1:
            raise ValueError(f"d must be positive, got {self.d}")
        if not 0 <= self.seed < 2**64:
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed}")


@dataclass
class MonteCarloStats:
    quantity: str
    target: float
    samples: list
    N: int
    trials: int
    seed: int
    extra: dict = field(default_factory=dict)

    @property
    def mean(self) -> float:
        return float(np.mean(self.samples))

    @property
    def max(self) -> float:
        return float(np.max(self.samples))

    @property
    def min(self) -> float:
        return float(np.min(self.samples))

    @property
    def deviation(self) -> float:
        return self.mean - self.target

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(mean=self.mean, max=self.max, min=self.min, deviation=self.deviation)
        return out


def trial_generators(seed: int, trials: int) -> list[np.random.Generator]:
    """One independent generator per trial, split from the master seed."""
    return [np.random.default_rng(s) for s in np.random.SeedSequence(seed).spawn(trials)]


def _map_trials(fn: Callable, cfg: SampleConfig, workers: int = 1) -> list:
    gens = trial_generators(cfg.seed, cfg.trials)
    if workers > 1 and cfg.trials > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            return list(pool.map(fn, gens))
    return [fn(g) for g in gens]


def haar_unitary(N: int, rng: np.random.Generator) -> np.ndarray:
    """Haar-distributed unitary via QR of a Ginibre matrix with phase correction."""
    if N < 1:
        raise ValueError(f"N must be positive, got {N}")
    z = (rng.standard_normal((N, N)) + 1j * rng.standard_normal((N, N))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r)
    return q * (diag / np.abs(diag))[None, :]


def haar_tuple(d: int, N: int, rng: np.random.Generator) -> UnitaryTuple:
    return UnitaryTuple(np.stack([haar_unitary(N, rng) for _ in range(d)]))


def _herm_norm(h: np.ndarray) -> float:
    return operator_norm(h, hermitian=True)


def estimate_hf_norm(cfg: SampleConfig, workers: int = 1) -> MonteCarloStats:
    """||sum_i U_i + U_i^*|| for d independent Haar unitaries; limit 2 sqrt(2d - 1)."""

    def one(rng):
        return _herm_norm(haar_tuple(cfg.d, cfg.N, rng).hsum())

    target = 2 * math.sqrt(2 * cfg.d - 1) if cfg.d > 1 else 2.0
    return MonteCarloStats("hf_norm", target, _map_trials(one, cfg, workers), cfg.N, cfg.trials, cfg.seed)


def build_T(v) -> np.ndarray:
    """T_1 = [[0, v_1], [v_1^*, 0]],  T_d = [[T_{d-1}, v_d], [v_d^*, -T_{d-1}]].

    Here v_d stands for the block diagonal I (x) v_d, so the coefficient
    space is the outer tensor factor: T_d(v) = sum_i b_i (x) v_i + h.c.
    """
    mats = v.matrices if isinstance(v, UnitaryTuple) else np.asarray(v, dtype=complex)
    if mats.ndim == 2:
        mats = mats[None]
    n = mats.shape[1]
    zero = np.zeros((n, n), dtype=complex)
    t = np.block([[zero, mats[0]], [mats[0].conj().T, zero]])
    for vd in mats[1:]:
        big = np.kron(np.eye(t.shape[0] // n), vd)
        t = np.block([[t, big], [big.conj().T, -t]])
    return t


def T_coefficients(d: int) -> np.ndarray:
    """Matrices b_i of size 2^d with T_d(v) = sum_i b_i (x) v_i + b_i^* (x) v_i^*."""
    out = []
    for i in range(d):
        e = np.zeros((d, 1, 1), dtype=complex)
        e[i] = 1.0
        t1 = build_T(e)
        e[i] = 1j
        ti = build_T(e)
        out.append(0.5 * (t1 - 1j * ti))
    return np.stack(out)


def T_matvec(mats: np.ndarray, x: np.ndarray) -> np.ndarray:
    """T_d(v) x without forming the 2^d n square matrix."""
    n = mats.shape[1]
    if len(mats) == 1:
        a, b = x[:n], x[n:]
        return np.concatenate([mats[0] @ b, mats[0].conj().T @ a])
    half = x.shape[0] // 2
    x1, x2 = x[:half], x[half:]
    vd = mats[-1]
    dx2 = (x2.reshape(-1, n) @ vd.T).ravel()
    dsx1 = (x1.reshape(-1, n) @ vd.conj()).ravel()
    return np.concatenate([T_matvec(mats[:-1], x1) + dx2, dsx1 - T_matvec(mats[:-1], x2)])


def T_norm(v, tol: float = 1e-10) -> float:
    """||T_d(v)|| by Lanczos with a fixed start vector (a Ritz value, so never above the norm)."""
    mats = v.matrices if isinstance(v, UnitaryTuple) else np.asarray(v, dtype=complex)
    dim = 2 ** len(mats) * mats.shape[1]
    if dim <= 2048:
        return _herm_norm(build_T(mats))
    op = scipy.sparse.linalg.LinearOperator((dim, dim), matvec=lambda x: T_matvec(mats, np.ravel(x)),
                                            dtype=complex)
    v0 = np.ones(dim, dtype=complex) / math.sqrt(dim)
    w = scipy.sparse.linalg.eigsh(op, k=1, which="LM", v0=v0, tol=tol, return_eigenvectors=False)
    return float(abs(w[0]))


def estimate_T_norm(cfg: SampleConfig, workers: int = 1) -> MonteCarloStats:
    """||T_d(U)|| for Haar tuples; limit 2 sqrt(d - 1)."""

    def one(rng):
        return T_norm(haar_tuple(cfg.d, cfg.N, rng))

    target = 2 * math.sqrt(cfg.d - 1)
    return MonteCarloStats("T_norm", target, _map_trials(one, cfg, workers), cfg.N, cfg.trials, cfg.seed)


def arcsine_cdf(x):
    """CDF of the arcsine law on [-2, 2]."""
    x = np.clip(np.asarray(x, dtype=float), -2.0, 2.0)
    return 0.5 + np.arcsin(x / 2) / math.pi


def arcsine_check(cfg: SampleConfig, phases: Sequence[float] | None = None, workers: int = 1) -> MonteCarloStats:
    """KS distance of the spectrum of U^*V + V^*U to the arcsine law.

    Also records ||U + V|| and ||VU - q UV|| for q = 1 and the given phases
    (default: three uniformly drawn ones); all tend to 2.
    """
    if cfg.d != 2:
        raise ValueError("arcsine_check uses a pair of unitaries (d = 2)")

    def one(rng):
        u, v = haar_unitary(cfg.N, rng), haar_unitary(cfg.N, rng)
        qs = [0.0] + list(phases if phases is not None else rng.uniform(0, 2 * math.pi, 3))
        w = np.linalg.eigvalsh(u.conj().T @ v + v.conj().T @ u)
        ks = scipy.stats.kstest(w, arcsine_cdf).statistic
        comm = [operator_norm(v @ u - np.exp(1j * q) * (u @ v), hermitian=False) for q in qs]
        return ks, operator_norm(u + v, hermitian=False), comm, [float(q) for q in qs]

    res = _map_trials(one, cfg, workers)
    return MonteCarloStats(
        "arcsine_ks",
        0.0,
        [float(r[0]) for r in res],
        cfg.N,
        cfg.trials,
        cfg.seed,
        {
            "sum_norm": [r[1] for r in res],
            "twisted_commutator_norm": [r[2] for r in res],
            "q_phases": [r[3] for r in res],
        },
    )


def _coefficient_stack(coeffs) -> np.ndarray:
    mats = [np.atleast_2d(np.asarray(a, dtype=complex)) for a in coeffs]
    if not mats:
        raise ValueError("need at least one coefficient")
    shape = mats[0].shape
    for a in mats:
        if a.shape != shape or shape[0] != shape[1]:
            raise ValueError(f"coefficients must be square of a common size, got {[m.shape for m in mats]}")
    return np.stack(mats)


def free_side(coeffs: np.ndarray, u: UnitaryTuple) -> float:
    """||sum_i a_i (x) U_i + a_i^* (x) U_i^*||."""
    g = sum(np.kron(a, x) for a, x in zip(coeffs, u.matrices))
    return _herm_norm(g + g.conj().T)


def commuting_side(coeffs: np.ndarray, grid_step: float = 1e-2, workers: int = 1,
                   atol: float = 1e-6) -> torus.TorusMax:
    """sup over z in T^d of ||sum_i z_i a_i + h.c.||, certified on the torus.

    Replacing z by -z negates the matrix, so the norm sup equals the
    lambda_max sup.
    """
    d = coeffs.shape[0]
    return torus.maximize(coeffs, np.zeros(d), np.full(d, 2 * math.pi), grid_step, workers=workers, atol=atol)


@dataclass
class LehnerReport:
    left: float
    right: float
    commuting: list
    slack: float
    holds: bool
    samples: list
    N: int
    trials: int
    seed: int

    def to_dict(self) -> dict:
        return asdict(self)


def lehner_inequality_check(
    coeffs,
    cfg: SampleConfig,
    allowance: float = 0.0,
    grid_step: float = 1e-2,
    workers: int = 1,
) -> LehnerReport:
    """Compare the free norm with sqrt(2d) sqrt(2d-1)/d ||sum a a^* + a^* a||^{1/2}.

    The left side is the maximum over independent Haar trials; ``holds``
    means left <= right + allowance.
    """
    a = _coefficient_stack(coeffs)
    d = a.shape[0]

    def one(rng):
        return free_side(a, haar_tuple(d, cfg.N, rng))

    samples = _map_trials(one, cfg, workers)
    left = max(samples)
    s = sum(x @ x.conj().T + x.conj().T @ x for x in a)
    right = math.sqrt(2 * d) * math.sqrt(2 * d - 1) / d * math.sqrt(max(_herm_norm(s), 0.0))
    comm = commuting_side(a, grid_step, workers)
    return LehnerReport(
        left=left,
        right=right,
        commuting=[comm.lower, comm.upper],
        slack=right - left,
        holds=left <= right + allowance,
        samples=samples,
        N=cfg.N,
        trials=cfg.trials,
        seed=cfg.seed,
    )


def _ratio(b, tuples, grid_step, workers):
    free = max(free_side(b, u) for u in tuples)
    comm = commuting_side(b, grid_step, workers)
    if comm.upper <= 0:
        return 0.0, free, comm
    return free / comm.upper, free, comm


def cf0_ratio_search(
    cfg: SampleConfig,
    coeff_dim: int = 2,
    random_starts: int = 4,
    local_steps: int = 8,
    step_size: float = 0.3,
    grid_step: float = 2e-2,
    workers: int = 1,
) -> CertifiedValue:
    """Largest ratio ||Re sum b_i (x) U_f,i|| / ||Re sum b_i (x) u_0,i|| found.

    The commuting side uses the certified upper end of the torus sweep, so
    for the sampled U each ratio is a lower estimate; the free side is a
    finite-N Monte-Carlo value, hence the result is heuristic.  The search is
    seeded with the coefficients of T_d (when they fit into ``coeff_dim``),
    followed by random complex Gaussian starts refined by greedy
    perturbation.
    """
    d = cfg.d
    gens = trial_generators(cfg.seed, cfg.trials + 1)
    tuples = [haar_tuple(d, cfg.N, g) for g in gens[:-1]]
    rng = gens[-1]

    candidates = []
    if 2**d <= coeff_dim:
        b = np.zeros((d, coeff_dim, coeff_dim), dtype=complex)
        b[:, : 2**d, : 2**d] = T_coefficients(d)
        candidates.append(("T_d", b))
    for _ in range(random_starts):
        z = rng.standard_normal((d, coeff_dim, coeff_dim)) + 1j * rng.standard_normal((d, coeff_dim, coeff_dim))
        candidates.append(("random", z))

    best = (-math.inf, None, None)
    evaluations = 0
    for label, b in candidates:
        r, free, comm = _ratio(b, tuples, grid_step, workers)
        evaluations += 1
        if label == "random":
            for _ in range(local_steps):
                pert = rng.standard_normal(b.shape) + 1j * rng.standard_normal(b.shape)
                trial = b + step_size * np.linalg.norm(b) / math.sqrt(b.size) * pert
                r2, f2, c2 = _ratio(trial, tuples, grid_step, workers)
                evaluations += 1
                if r2 > r:
                    b, r, free, comm = trial, r2, f2, c2
        if r > best[0]:
            best = (r, label, (free, comm.lower, comm.upper))
    r, label, (free, cl, cu) = best
    return CertifiedValue(
        r,
        r * (cu - cl) / cu if cu > 0 else 0.0,
        BoundKind.HEURISTIC,
        {
            "heuristic": True,
            "best_start": label,
            "free_norm": free,
            "commuting_bracket": [cl, cu],
            "N": cfg.N,
            "trials": cfg.trials,
            "seed": cfg.seed,
            "coeff_dim": coeff_dim,
            "evaluations": evaluations,
            "grid_step": grid_step,
        },
    )
