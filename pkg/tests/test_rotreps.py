import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilconst.matcore import DimensionCapError, operator_norm
from dilconst.rotreps import (
    RationalAngle,
    ThetaMatrix,
    clock_matrix,
    clock_of,
    continued_fraction_convergents,
    gauge_domain,
    irrep_d2,
    irrep_d3_constant,
    rational_approximation,
    relation_residual,
    shift_matrix,
    tensor_rep,
)


@st.composite
def angles(draw, max_n=12):
    n = draw(st.integers(1, max_n))
    m = draw(st.integers(0, n - 1))
    return RationalAngle.of(m, n)


phase_vec = st.lists(st.floats(-10, 10), min_size=3, max_size=3)


def test_clock_and_shift_examples():
    assert np.allclose(clock_matrix(1, 3), np.eye(3))
    assert np.allclose(clock_matrix(-1, 2), np.diag([-1, 1]))
    q = np.exp(2j * math.pi * 3 / 7)
    assert np.allclose(np.diag(clock_matrix(q, 7)), q ** np.arange(1, 8))
    assert np.array_equal(shift_matrix(1), [[1]])
    assert np.array_equal(shift_matrix(2), [[0, 1], [1, 0]])
    x, y = clock_matrix(q, 7), shift_matrix(7)
    assert np.allclose(y @ x, q * x @ y, atol=1e-12)


def test_low_dimensional_irreps():
    u = irrep_d2(RationalAngle.of(0, 1))
    assert u.n == 1
    u = irrep_d2(RationalAngle.of(1, 2))
    assert operator_norm(u[1] @ u[0] + u[0] @ u[1]) <= 1e-12
    u = irrep_d2(RationalAngle.of(1, 3))
    assert np.allclose(u[1] @ u[0], np.exp(2j * math.pi / 3) * u[0] @ u[1])
    t = irrep_d3_constant(RationalAngle.of(0, 1))
    assert t.n == 1 and t.d == 3
    z = tensor_rep(ThetaMatrix(3))
    assert z.n == 1


@settings(max_examples=40, deadline=None)
@given(angles(), phase_vec)
def test_irreps_satisfy_relations(angle, ph):
    for u, d in ((irrep_d2(angle, ph[:2]), 2), (irrep_d3_constant(angle, ph), 3)):
        assert relation_residual(u, ThetaMatrix.constant(d, angle)) <= 1e-10
        assert u.max_unitarity_defect() <= 1e-12
    n = angle.n
    assert np.allclose(np.linalg.matrix_power(clock_of(angle), n), np.eye(n), atol=1e-12)
    assert np.allclose(np.linalg.matrix_power(shift_matrix(n), n), np.eye(n), atol=1e-12)


@settings(max_examples=30, deadline=None)
@given(angles(), phase_vec, st.integers(0, 6), st.integers(0, 6))
def test_gauge_covariance(angle, ph, a, b):
    """Conjugation by X^a Y^b shifts the d = 3 phases by (b, b - a, -a) * theta."""
    n = angle.n
    u = irrep_d3_constant(angle, ph)
    g = np.linalg.matrix_power(clock_of(angle), a) @ np.linalg.matrix_power(shift_matrix(n), b)
    conj = np.stack([g @ m @ g.conj().T for m in u.matrices])
    shifted = irrep_d3_constant(angle, np.asarray(ph) + angle.value * np.array([b, b - a, -a]))
    assert np.allclose(conj, shifted.matrices, atol=1e-10)
    h1 = conj.sum(axis=0)
    assert abs(operator_norm(h1 + h1.conj().T) - operator_norm(u.hsum())) <= 1e-10


@settings(max_examples=20, deadline=None)
@given(st.lists(angles(max_n=5), min_size=6, max_size=6))
def test_tensor_rep_relations(entries):
    theta = ThetaMatrix(4, {(0, 1): entries[0], (0, 2): entries[1], (0, 3): entries[2],
                            (1, 2): entries[3], (1, 3): entries[4], (2, 3): entries[5]})
    u = tensor_rep(theta)
    assert relation_residual(u, theta) <= 1e-10


def test_tensor_rep_cap():
    theta = ThetaMatrix.constant(4, RationalAngle.of(1, 7))
    with pytest.raises(DimensionCapError):
        tensor_rep(theta, cap=1000)
    with pytest.raises(TypeError):
        tensor_rep(ThetaMatrix(2, {(0, 1): 1.0}))


def test_gauge_domain():
    lo, hi = gauge_domain(7, 3)
    assert np.allclose(hi, [2 * math.pi / 7, 2 * math.pi, 2 * math.pi / 7]) and not lo.any()
    _, hi = gauge_domain(7, 2)
    assert np.allclose(hi, 2 * math.pi / 7)
    _, hi = gauge_domain(7, 2, reduce=False)
    assert np.allclose(hi, 2 * math.pi)


def test_rational_angles_and_convergents():
    a = RationalAngle.of(3, 7)
    assert a.value == pytest.approx(6 * math.pi / 7)
    assert RationalAngle.of(10, 7) == RationalAngle.of(3, 7)
    with pytest.raises(ValueError):
        RationalAngle.of(1, 0)
    conv = continued_fraction_convergents(math.sqrt(2) - 1, 200)
    assert conv[-1] == Fraction(70, 169)
    assert rational_approximation(2 * math.pi * (math.sqrt(2) - 1)) == RationalAngle.of(70, 169)


def test_theta_matrix():
    t = ThetaMatrix(3, {(0, 1): RationalAngle.of(1, 2), (1, 2): 0.5})
    assert np.allclose(t.array, -t.array.T)
    assert t[0, 1] == pytest.approx(math.pi)
    assert not t.is_rational
    assert ThetaMatrix.constant(3, RationalAngle.of(3, 7)).constant_angle() == RationalAngle.of(3, 7)
    assert ThetaMatrix.constant(3, 1.0).norm == pytest.approx(math.sqrt(3))
    with pytest.raises(IndexError):
        t.set(1, 0, 0.1)
    with pytest.raises(ValueError):
        ThetaMatrix.from_array(np.ones((2, 2)))
