import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilconst.matcore import tuple_distance
from dilconst.pathext import (
    RandomIncrementPath,
    audit_pair_bound,
    constant_oracle,
    extend,
    holder_constant,
    linear_oracle,
    power_oracle,
    unitary_oracle,
)

ORACLES = {
    "random": lambda: RandomIncrementPath(2, 0.5, 1.0, seed=3).oracle(),
    "random-k3": lambda: RandomIncrementPath(3, 0.7, 0.5, seed=4).oracle(),
    "power": lambda: power_oracle(0.5, 3),
    "unitary": lambda: unitary_oracle(0.5, 2, seed=1),
}


def test_holder_constant():
    assert holder_constant(2, 0.5, 1.0) == pytest.approx(4 / (1 - 2**-0.5))
    assert holder_constant(2, 0.5, 1.0) == pytest.approx(13.657, abs=1e-3)
    assert holder_constant(5, 1.0, 0.7) == 0.7
    assert holder_constant(3, 0.3, 0.0) == 0.0
    for bad in ((1, 0.5, 1.0), (2, 0.0, 1.0), (2, 1.5, 1.0), (2, 0.5, -1.0)):
        with pytest.raises(ValueError):
            holder_constant(*bad)


@pytest.mark.parametrize("name", sorted(ORACLES))
def test_adjacent_bounds_hold(name):
    oracle = ORACLES[name]()
    for level in range(1, 7):
        assert oracle.adjacent_defect(level) <= 1e-12


@pytest.mark.parametrize("name", sorted(ORACLES))
def test_pair_audit(name):
    oracle = ORACLES[name]()
    aud = audit_pair_bound(oracle, 1000 if name != "unitary" else 300, np.random.default_rng(0))
    assert aud.violations == 0 and aud.max_ratio <= aud.constant
    assert aud.passes and aud.to_dict()["samples"] == aud.samples


def test_constant_oracle_ratio_zero():
    aud = audit_pair_bound(constant_oracle(), 200, np.random.default_rng(1))
    assert aud.max_ratio == 0.0


def test_grid_points_short_circuit():
    oracle = ORACLES["random"]()
    ext = extend(oracle, Fraction(3, 8), 1e-9)
    assert ext.depth == 3 and ext.truncation == Fraction(3, 8)
    assert ext.point == oracle.evaluate(3, 3)
    assert oracle.at(Fraction(3, 8)) == oracle.evaluate(6, 4)
    with pytest.raises(ValueError):
        oracle.at(Fraction(1, 3))


def test_linear_extension_is_interpolation():
    oracle = linear_oracle(2.5)
    for t in (Fraction(1, 3), 0.7, Fraction(22, 7) - 3):
        ext = extend(oracle, t, 1e-6)
        assert abs(ext.point - 2.5 * float(Fraction(t))) <= 1e-6


def test_extend_validation():
    with pytest.raises(ValueError):
        extend(linear_oracle(), 0.5, 0.0)
    with pytest.raises(ValueError):
        extend(linear_oracle(), 1.5, 0.1)


@settings(max_examples=100, deadline=None)
@given(st.fractions(0, 1, max_denominator=10**6), st.floats(1e-4, 0.5), st.floats(1e-4, 0.5))
def test_extension_consistency(t, eps1, eps2):
    oracle = ORACLES["random"]()
    a, b = extend(oracle, t, eps1), extend(oracle, t, eps2)
    assert abs(a.point - b.point) <= eps1 + eps2 + 1e-12


@settings(max_examples=50, deadline=None)
@given(st.fractions(0, 1, max_denominator=10**5), st.fractions(0, 1, max_denominator=10**5))
def test_extension_is_holder(s, t):
    eps = 1e-3
    for name in ("random", "unitary"):
        oracle = ORACLES[name]()
        a, b = extend(oracle, s, eps).point, extend(oracle, t, eps).point
        dist = oracle.metric(a, b)
        assert dist <= oracle.constant * float(abs(t - s)) ** oracle.alpha + 2 * eps + 1e-12


def test_determinism():
    a = extend(RandomIncrementPath(seed=11).oracle(), Fraction(5, 13), 1e-4)
    b = extend(RandomIncrementPath(seed=11).oracle(), Fraction(5, 13), 1e-4)
    assert a.point == b.point and a.depth == b.depth
    u1 = extend(unitary_oracle(seed=2), 0.3, 1e-3).point
    u2 = extend(unitary_oracle(seed=2), 0.3, 1e-3).point
    assert tuple_distance(u1, u2) == 0.0
