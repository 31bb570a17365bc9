from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum


class BoundKind(str, Enum):
    CERTIFIED_LOWER = "certified_lower"
    CERTIFIED_UPPER = "certified_upper"
    TWO_SIDED = "two_sided"
    HEURISTIC = "heuristic"
    MONTE_CARLO = "monte_carlo"
    EXACT = "exact"


@dataclass
class CertifiedValue:
    """A number with a rigorous error statement.

    two_sided:        truth in [value - error_bound, value + error_bound]
    certified_lower:  truth >= value; truth <= value + error_bound when finite
    certified_upper:  truth <= value; truth >= value - error_bound when finite
    heuristic / monte_carlo: error_bound is an indication only

    A one-sided value whose ``method`` carries ``heuristic=True`` is rigorous
    on its stated side only; the opposite side is then an estimate.
    """

    value: float
    error_bound: float
    kind: BoundKind
    method: dict = field(default_factory=dict)

    def __post_init__(self):
        self.kind = BoundKind(self.kind)
        if not self.error_bound >= 0:
            raise ValueError(f"error_bound must be nonnegative, got {self.error_bound}")

    @classmethod
    def bracket(cls, lower: float, upper: float, method: dict | None = None) -> "CertifiedValue":
        if upper < lower:
            raise ValueError(f"empty bracket [{lower}, {upper}]")
        mid = 0.5 * (lower + upper)
        # widen by one ulp-ish so both endpoints stay inside after rounding
        err = 0.5 * (upper - lower) + 4 * math.ulp(max(abs(lower), abs(upper), 1.0))
        return cls(mid, err, BoundKind.TWO_SIDED, dict(method or {}))

    @property
    def lower(self) -> float:
        if self.kind in (BoundKind.TWO_SIDED, BoundKind.EXACT):
            return self.value - self.error_bound
        if self.kind == BoundKind.CERTIFIED_LOWER:
            return self.value
        if self.kind == BoundKind.CERTIFIED_UPPER:
            return self.value - self.error_bound
        return -math.inf

    @property
    def upper(self) -> float:
        if self.kind in (BoundKind.TWO_SIDED, BoundKind.EXACT):
            return self.value + self.error_bound
        if self.kind == BoundKind.CERTIFIED_UPPER:
            return self.value
        if self.kind == BoundKind.CERTIFIED_LOWER:
            return self.value + self.error_bound
        return math.inf

    def as_lower(self) -> "CertifiedValue":
        return CertifiedValue(self.lower, self.upper - self.lower, BoundKind.CERTIFIED_LOWER, dict(self.method))

    def as_upper(self) -> "CertifiedValue":
        return CertifiedValue(self.upper, self.upper - self.lower, BoundKind.CERTIFIED_UPPER, dict(self.method))

    def to_dict(self) -> dict:
        return {
            "value": self.value,
            "error_bound": self.error_bound,
            "kind": self.kind.value,
            "method": self.method,
        }
