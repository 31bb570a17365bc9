"""Holder extension of maps given on the k-adic grid of [0, 1].

A map gamma defined on Gamma = union_n {j / k^n : 0 <= j <= k^n} into a
complete metric space with

    d(gamma(s), gamma(t)) <= C1 |t - s|^alpha   for adjacent s, t in each level,

is globally alpha-Holder on Gamma with constant 2 k C1 / (1 - k^{-alpha}),
so it extends uniquely to [0, 1].  The extension at t is the limit of the
values at the base-k truncations of t.

Grid points are pairs (j, n) meaning j / k^n; arithmetic is exact.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Callable

import numpy as np

from .matcore import UnitaryTuple, matrix_exponential, tuple_distance


def holder_constant(k: int, alpha: float, C1: float) -> float:
    """2 k C1 / (1 - k^{-alpha}); C1 itself in the Lipschitz case alpha = 1."""
    if k < 2:
        raise ValueError(f"k must be at least 2, got {k}")
    if not 0 < alpha <= 1:
        raise ValueError(f"alpha must lie in (0, 1], got {alpha}")
    if C1 < 0:
        raise ValueError(f"C1 must be nonnegative, got {C1}")
    if alpha == 1:
        return float(C1)
    return 2 * k * C1 / (1 - k ** (-alpha))


def _reduce(j: int, n: int, k: int) -> tuple[int, int]:
    while n > 0 and j % k == 0:
        j //= k
        n -= 1
    return j, n


@dataclass
class GridPathOracle:
    """gamma on the k-adic grid with an adjacent-point Holder bound.

    ``evaluate(j, n)`` returns gamma(j / k^n) and ``metric(p, q)`` the
    distance; both must be pure functions (they are called repeatedly and
    possibly from several threads).
    """

    k: int
    alpha: float
    C1: float
    evaluate: Callable[[int, int], Any]
    metric: Callable[[Any, Any], float]
    label: str = ""

    def __post_init__(self):
        holder_constant(self.k, self.alpha, self.C1)

    @property
    def constant(self) -> float:
        return holder_constant(self.k, self.alpha, self.C1)

    def at(self, t: Fraction) -> Any:
        t = Fraction(t)
        n = 0
        while (t * self.k**n).denominator != 1:
            n += 1
            if n > 200:
                raise ValueError(f"{t} is not a base-{self.k} grid point")
        return self.evaluate(int(t * self.k**n), n)

    def adjacent_defect(self, level: int, indices=None) -> float:
        """max over adjacent pairs of d(gamma(s), gamma(t)) - C1 |t - s|^alpha."""
        m = self.k**level
        idx = range(m) if indices is None else indices
        step = (1.0 / m) ** self.alpha
        worst = -math.inf
        for j in idx:
            dist = self.metric(self.evaluate(j, level), self.evaluate(j + 1, level))
            worst = max(worst, dist - self.C1 * step)
        return worst


@dataclass
class Extension:
    point: Any
    depth: int
    truncation: Fraction


def extend(oracle: GridPathOracle, t, eps: float) -> Extension:
    """Value within eps of the continuous extension at t in [0, 1].

    Uses the floor truncation t_n = floor(t k^n) / k^n at the first depth n
    with C |t - t_n|^alpha <= eps, or the first depth at which t_n = t.
    """
    if not eps > 0:
        raise ValueError(f"eps must be positive, got {eps}")
    t = Fraction(t)
    if not 0 <= t <= 1:
        raise ValueError(f"t must lie in [0, 1], got {t}")
    c = oracle.constant
    k = oracle.k
    n = 0
    while True:
        scale = k**n
        j = math.floor(t * scale)
        tn = Fraction(j, scale)
        gap = t - tn
        if gap == 0 or c * float(gap) ** oracle.alpha <= eps:
            return Extension(oracle.evaluate(j, n), n, tn)
        n += 1


@dataclass
class PairAudit:
    max_ratio: float
    constant: float
    worst_pair: tuple
    samples: int
    violations: int
    ratios: list = field(repr=False, default_factory=list)

    @property
    def passes(self) -> bool:
        return self.violations == 0

    def to_dict(self) -> dict:
        return {
            "max_ratio": self.max_ratio,
            "constant": self.constant,
            "worst_pair": [str(x) for x in self.worst_pair],
            "samples": self.samples,
            "violations": self.violations,
            "passes": self.passes,
        }


def random_grid_point(k: int, max_level: int, rng: np.random.Generator) -> tuple[int, int]:
    n = int(rng.integers(0, max_level + 1))
    return int(rng.integers(0, k**n + 1)), n


def audit_pair_bound(oracle: GridPathOracle, samples: int, rng: np.random.Generator, max_level: int = 8,
                     rtol: float = 1e-12) -> PairAudit:
    """Ratios d(gamma(s), gamma(t)) / |t - s|^alpha over random mixed-level grid pairs."""
    k = oracle.k
    c = oracle.constant
    best, worst_pair, violations, ratios = 0.0, (), 0, []
    for _ in range(samples):
        while True:
            (j1, n1), (j2, n2) = random_grid_point(k, max_level, rng), random_grid_point(k, max_level, rng)
            s, t = Fraction(j1, k**n1), Fraction(j2, k**n2)
            if s != t:
                break
        dist = oracle.metric(oracle.evaluate(*_reduce(j1, n1, k)), oracle.evaluate(*_reduce(j2, n2, k)))
        r = dist / float(abs(t - s)) ** oracle.alpha
        ratios.append(r)
        if r > c * (1 + rtol):
            violations += 1
        if r > best:
            best, worst_pair = r, (s, t)
    return PairAudit(best, c, worst_pair, samples, violations, ratios)


# ---- concrete oracles -------------------------------------------------------


def real_metric(a, b) -> float:
    return abs(float(a) - float(b))


def constant_oracle(k: int = 2, alpha: float = 0.5, value: float = 0.0) -> GridPathOracle:
    return GridPathOracle(k, alpha, 0.0, lambda j, n: value, real_metric, "constant")


def linear_oracle(slope: float = 1.0, k: int = 2) -> GridPathOracle:
    return GridPathOracle(k, 1.0, abs(slope), lambda j, n: slope * j / k**n, real_metric, "linear")


def power_oracle(alpha: float = 0.5, k: int = 3, centre: float = 1 / 3) -> GridPathOracle:
    """s -> |s - centre|^alpha, which is alpha-Holder with constant 1."""
    return GridPathOracle(k, alpha, 1.0, lambda j, n: abs(j / k**n - centre) ** alpha, real_metric, "power")


class RandomIncrementPath:
    """Real path built level by level: new grid points interpolate their
    neighbours on the parent level and add bounded noise.

    With parent step h the parent increment is at most C1 h^alpha, so the
    new adjacent increments are at most C1 h^alpha / k + 2 eta (h/k)^alpha,
    which stays below C1 (h/k)^alpha when eta <= C1 (1 - k^{alpha-1}) / 2.
    """

    def __init__(self, k: int = 2, alpha: float = 0.5, C1: float = 1.0, seed: int = 0):
        self.k, self.alpha, self.C1, self.seed = k, alpha, C1, seed
        self.eta = C1 * (1 - k ** (alpha - 1)) / 2
        self._cache: dict[tuple[int, int], float] = {}
        rng = np.random.default_rng(seed)
        self._ends = (0.0, float(rng.uniform(-C1, C1)))

    def _noise(self, j: int, n: int) -> float:
        rng = np.random.default_rng([self.seed, n, j])
        return float(rng.uniform(-1.0, 1.0))

    def __call__(self, j: int, n: int) -> float:
        j, n = _reduce(j, n, self.k)
        if n == 0:
            return self._ends[j]
        key = (j, n)
        if key in self._cache:
            return self._cache[key]
        k = self.k
        p = j // k
        r = j % k
        left, right = self(p, n - 1), self(p + 1, n - 1)
        val = left + (right - left) * r / k + self.eta * (1.0 / k**n) ** self.alpha * self._noise(j, n)
        self._cache[key] = val
        return val

    def oracle(self) -> GridPathOracle:
        return GridPathOracle(self.k, self.alpha, self.C1, self, real_metric, "random increments")


def unitary_oracle(alpha: float = 0.5, k: int = 2, size: int = 3, seed: int = 0) -> GridPathOracle:
    """s -> (exp(i s A), exp(i |s - 1/3|^alpha B)) with Hermitian A, B of norm 1.

    ||exp(iX) - exp(iY)|| <= ||X - Y|| and the tuple metric is a max, so the
    adjacent constant is 1 (on [0, 1] a Lipschitz increment is dominated by
    its alpha-th power).
    """
    rng = np.random.default_rng(seed)

    def herm():
        z = rng.standard_normal((size, size)) + 1j * rng.standard_normal((size, size))
        h = z + z.conj().T
        return h / np.linalg.norm(h, 2)

    a, b = herm(), herm()

    def ev(j, n):
        s = j / k**n
        return UnitaryTuple(np.stack([matrix_exponential(1j * s * a),
                                      matrix_exponential(1j * abs(s - 1 / 3) ** alpha * b)]))

    return GridPathOracle(k, alpha, 1.0, ev, tuple_distance, "unitary pair")
