"""Finite-dimensional representations of rational noncommutative tori.

Convention: a tuple (u_1, ..., u_d) represents A_Theta when
``u_l u_k = exp(i theta_{k,l}) u_k u_l`` for k < l.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .matcore import DIMENSION_CAP, DimensionCapError, UnitaryTuple

TWO_PI = 2 * math.pi


@dataclass(frozen=True)
class RationalAngle:
    """The angle 2*pi*m/n with 0 <= m < n and gcd(m, n) = 1."""

    m: int
    n: int

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"denominator must be positive, got {self.n}")
        if not 0 <= self.m < self.n or math.gcd(self.m, self.n) != 1:
            raise ValueError(f"{self.m}/{self.n} is not a reduced fraction in [0, 1)")

    @classmethod
    def of(cls, m: int, n: int) -> "RationalAngle":
        """Reduce m/n modulo 1 and to lowest terms."""
        if n == 0:
            raise ValueError("denominator must be nonzero")
        f = Fraction(m, n) % 1
        return cls(f.numerator, f.denominator)

    @classmethod
    def from_fraction(cls, f: Fraction) -> "RationalAngle":
        return cls.of(f.numerator, f.denominator)

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.m, self.n)

    @property
    def value(self) -> float:
        return TWO_PI * self.m / self.n

    @property
    def q(self) -> complex:
        return np.exp(2j * math.pi * self.m / self.n)

    def __neg__(self) -> "RationalAngle":
        return RationalAngle.of(-self.m, self.n)

    def __str__(self) -> str:
        return f"2pi*{self.m}/{self.n}"


def continued_fraction_convergents(x: float, max_den: int) -> list[Fraction]:
    """Convergents p/q of x with q <= max_den."""
    out = []
    p0, q0, p1, q1 = 0, 1, 1, 0
    y = x
    for _ in range(64):
        a = math.floor(y)
        p0, q0, p1, q1 = p1, q1, a * p1 + p0, a * q1 + q0
        if q1 > max_den:
            break
        out.append(Fraction(p1, q1))
        frac = y - a
        if frac < 1e-15:
            break
        y = 1.0 / frac
    return out


def rational_approximation(theta: float, max_den: int = 200) -> RationalAngle:
    """Last continued-fraction convergent of theta/(2 pi) with denominator <= max_den."""
    x = (theta / TWO_PI) % 1.0
    return RationalAngle.from_fraction(continued_fraction_convergents(x, max_den)[-1])


class ThetaMatrix:
    """Real antisymmetric d x d matrix, stored by its strict upper triangle.

    Entries may carry an exact :class:`RationalAngle`; ``rational`` is None
    for any entry given only in radians.
    """

    def __init__(self, d: int, upper: dict | None = None):
        if d < 1:
            raise ValueError(f"d must be positive, got {d}")
        self.d = d
        self._theta = np.zeros((d, d))
        self._rational: dict[tuple[int, int], RationalAngle | None] = {
            (k, l): RationalAngle(0, 1) for k in range(d) for l in range(k + 1, d)
        }
        for (k, l), v in (upper or {}).items():
            self.set(k, l, v)

    def set(self, k: int, l: int, value) -> None:
        if not 0 <= k < l < self.d:
            raise IndexError(f"({k}, {l}) is not a strict upper-triangle index for d={self.d}")
        if isinstance(value, RationalAngle):
            rad, rat = value.value, value
        elif isinstance(value, Fraction):
            rat = RationalAngle.from_fraction(value)
            rad = rat.value
        else:
            rad, rat = float(value), None
        self._theta[k, l] = rad
        self._theta[l, k] = -rad
        self._rational[(k, l)] = rat

    @classmethod
    def constant(cls, d: int, angle) -> "ThetaMatrix":
        return cls(d, {(k, l): angle for k in range(d) for l in range(k + 1, d)})

    @classmethod
    def from_array(cls, arr) -> "ThetaMatrix":
        arr = np.asarray(arr, dtype=float)
        d = arr.shape[0]
        if arr.shape != (d, d) or not np.allclose(arr, -arr.T, atol=1e-12):
            raise ValueError("Theta must be a square antisymmetric matrix")
        return cls(d, {(k, l): float(arr[k, l]) for k in range(d) for l in range(k + 1, d)})

    @property
    def array(self) -> np.ndarray:
        return self._theta.copy()

    def __getitem__(self, kl) -> float:
        return float(self._theta[kl])

    def rational(self, k: int, l: int) -> RationalAngle | None:
        return self._rational[(k, l)] if k < l else None

    @property
    def is_rational(self) -> bool:
        return all(v is not None for v in self._rational.values())

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self._theta, 2)) if self.d > 1 else 0.0

    def constant_angle(self) -> RationalAngle | None:
        """The common rational angle if every upper entry is the same rational."""
        vals = set(self._rational.values())
        if len(vals) == 1 and None not in vals:
            return vals.pop()
        if self.d == 1:
            return RationalAngle(0, 1)
        return None

    def minor(self) -> "ThetaMatrix":
        """Theta with its last row and column removed."""
        out = ThetaMatrix(self.d - 1)
        for k in range(self.d - 1):
            for l in range(k + 1, self.d - 1):
                v = self._rational[(k, l)]
                out.set(k, l, v if v is not None else self._theta[k, l])
        return out

    def __neg__(self) -> "ThetaMatrix":
        out = ThetaMatrix(self.d)
        for (k, l), v in self._rational.items():
            out.set(k, l, -v if v is not None else -self._theta[k, l])
        return out

    def __repr__(self) -> str:
        cells = []
        for (k, l), v in sorted(self._rational.items()):
            cells.append(f"({k},{l})={v if v is not None else self._theta[k, l]}")
        return f"ThetaMatrix(d={self.d}, {', '.join(cells)})"


def _check_phases(phases: Sequence[float], count: int) -> np.ndarray:
    ph = np.asarray(phases, dtype=float)
    if ph.shape != (count,):
        raise ValueError(f"expected {count} phases, got {ph.shape}")
    return np.mod(ph, TWO_PI)


def clock_matrix(q: complex, n: int) -> np.ndarray:
    """diag(q, q^2, ..., q^n)."""
    if abs(abs(q) - 1) > 1e-12:
        raise ValueError(f"|q| must be 1, got {abs(q)}")
    return np.diag(np.asarray(q, dtype=complex) ** np.arange(1, n + 1))


def clock_of(angle: RationalAngle) -> np.ndarray:
    """Clock matrix with exact root-of-unity entries (powers reduced mod n)."""
    n = angle.n
    k = (angle.m * np.arange(1, n + 1)) % n
    return np.diag(np.exp(2j * np.pi * k / n))


def shift_matrix(n: int) -> np.ndarray:
    """Cyclic shift: ones on the superdiagonal and at (n, 1)."""
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    return np.roll(np.eye(n, dtype=complex), 1, axis=1)


def irrep_d2(angle: RationalAngle, phases: Sequence[float] = (0.0, 0.0)) -> UnitaryTuple:
    """The pair (alpha X, beta Y) with Y X = q X Y."""
    a, b = np.exp(1j * _check_phases(phases, 2))
    x = clock_of(angle)
    y = shift_matrix(angle.n)
    return UnitaryTuple(np.stack([a * x, b * y]))


def irrep_d3_constant(angle: RationalAngle, phases: Sequence[float] = (0.0, 0.0, 0.0)) -> UnitaryTuple:
    """The triple (alpha X, beta XY, gamma Y) for constant angle theta."""
    a, b, c = np.exp(1j * _check_phases(phases, 3))
    x = clock_of(angle)
    y = shift_matrix(angle.n)
    return UnitaryTuple(np.stack([a * x, b * (x @ y), c * y]))


def irrep_base(angle: RationalAngle, d: int) -> UnitaryTuple:
    """Phase-free irreducible family member for constant angle, d in {1, 2, 3}."""
    if d == 1:
        return UnitaryTuple(np.ones((1, 1, 1), dtype=complex))
    if d == 2:
        return irrep_d2(angle)
    if d == 3:
        return irrep_d3_constant(angle)
    raise ValueError(f"irreducible family only available for d <= 3, got {d}")


def gauge_domain(n: int, d: int, reduce: bool = True) -> tuple[np.ndarray, np.ndarray]:
    """Box of phases whose gauge orbit covers the whole irreducible family.

    Conjugation by X^a Y^b shifts the phases of (X, Y) by (b, -a) and those
    of (X, XY, Y) by (b, b - a, -a), in units of theta = 2 pi m / n; as m is
    prime to n these multiples reach every multiple of 2 pi / n.  For d = 2 both
    phases can therefore be restricted to [0, 2 pi / n); for d = 3 only the
    first and last, because the product u_2 u_3^* u_1^* is central.
    """
    full = np.full(d, TWO_PI)
    lo = np.zeros(d)
    if not reduce or n == 1:
        return lo, full
    step = TWO_PI / n
    hi = full.copy()
    if d == 2:
        hi[:] = step
    elif d == 3:
        hi[0] = step
        hi[2] = step
    return lo, hi


def two_dim_pair(theta) -> tuple[np.ndarray, np.ndarray]:
    """(u, v) with v u = e^{i theta} u v, for a rational angle."""
    if not isinstance(theta, RationalAngle):
        raise TypeError("tensor representations need rational angles")
    rep = irrep_d2(theta)
    return rep[0], rep[1]


def tensor_rep(theta: ThetaMatrix, cap: int = DIMENSION_CAP) -> UnitaryTuple:
    """Recursive tensor representation of A_Theta for rational Theta.

    U^{(d)}_k = U^{(d-1)}_k (x) [u(theta_{k,d}) in slot k]     for k < d
    U^{(d)}_d = I (x) v(theta_{1,d}) (x) ... (x) v(theta_{d-1,d})
    """
    if not theta.is_rational:
        raise TypeError("tensor_rep requires every entry to be a RationalAngle")
    d = theta.d
    dims = [theta.rational(k, l).n for k in range(d) for l in range(k + 1, d)]
    required = math.prod(dims) if dims else 1
    if required > cap:
        raise DimensionCapError(required, cap)
    return _tensor_rep(theta)


def _tensor_rep(theta: ThetaMatrix) -> UnitaryTuple:
    d = theta.d
    if d == 1:
        return UnitaryTuple(np.ones((1, 1, 1), dtype=complex))
    prev = _tensor_rep(theta.minor())
    pairs = [two_dim_pair(theta.rational(k, d - 1)) for k in range(d - 1)]
    eyes = [np.eye(p[0].shape[0], dtype=complex) for p in pairs]
    out = []
    for k in range(d - 1):
        factors = [prev[k]] + [pairs[j][0] if j == k else eyes[j] for j in range(d - 1)]
        out.append(_kron_all(factors))
    factors = [np.eye(prev.n, dtype=complex)] + [p[1] for p in pairs]
    out.append(_kron_all(factors))
    return UnitaryTuple(np.stack(out))


def _kron_all(mats):
    out = mats[0]
    for m in mats[1:]:
        out = np.kron(out, m)
    return out


def relation_residual(u: UnitaryTuple, theta: ThetaMatrix) -> float:
    """max_{k<l} ||U_l U_k - e^{i theta_{kl}} U_k U_l||."""
    worst = 0.0
    for k in range(u.d):
        for l in range(k + 1, u.d):
            q = np.exp(1j * theta[k, l])
            diff = u[l] @ u[k] - q * (u[k] @ u[l])
            worst = max(worst, float(np.linalg.norm(diff, 2)))
    return worst
