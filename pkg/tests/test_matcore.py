import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilconst.matcore import (
    DimensionCapError,
    NonHermitianError,
    UnitaryTuple,
    direct_sum,
    hermitian_eigenvalues,
    lambda_max,
    matrix_exponential,
    operator_norm,
    tensor,
    tuple_distance,
    unitarity_defect,
)
from dilconst.rotreps import RationalAngle, clock_matrix

seeds = st.integers(0, 2**32 - 1)


def random_hermitian(rng, n):
    z = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return z + z.conj().T


def random_unitary(rng, n):
    q, r = np.linalg.qr(rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)))
    return q * (np.diag(r) / abs(np.diag(r)))


def test_trivial_spectra():
    assert np.allclose(hermitian_eigenvalues(np.diag([-1.0, 1.0])), [-1, 1])
    assert np.allclose(hermitian_eigenvalues(np.ones((2, 2))), [0, 2], atol=1e-14)
    assert operator_norm(np.eye(4)) == pytest.approx(1.0)
    assert operator_norm(np.zeros((3, 3))) == 0.0
    x = clock_matrix(-1, 2)
    assert operator_norm(x + x.conj().T) == pytest.approx(2.0)


def test_non_hermitian_rejected():
    with pytest.raises(NonHermitianError):
        hermitian_eigenvalues(np.array([[0, 1], [0, 0]]))


def test_tensor_and_exponential_examples():
    assert np.array_equal(tensor(np.eye(2), np.eye(3)), np.eye(6))
    assert np.allclose(tensor(np.diag([1, 2]), np.diag([3, 5])), np.diag([3, 5, 6, 10]))
    assert np.allclose(matrix_exponential(np.zeros((3, 3))), np.eye(3))
    assert np.allclose(matrix_exponential(np.diag([1j * np.pi, 0])), np.diag([-1, 1]))
    with pytest.raises(DimensionCapError):
        tensor(np.eye(100), np.eye(100), cap=4096)
    assert direct_sum(np.eye(1), 2 * np.eye(2)).shape == (3, 3)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 12))
def test_trace_matches_eigenvalue_sum(seed, n):
    a = random_hermitian(np.random.default_rng(seed), n)
    w = hermitian_eigenvalues(a)
    assert abs(w.sum() - np.trace(a).real) <= 1e-9 * n * operator_norm(a)
    assert lambda_max(a) == pytest.approx(w[-1])


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_norm_is_multiplicative_on_tensors(seed, n, m):
    rng = np.random.default_rng(seed)
    a = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    b = rng.standard_normal((m, m))
    assert operator_norm(tensor(a, b)) == pytest.approx(operator_norm(a) * operator_norm(b), rel=1e-9)


@settings(max_examples=25, deadline=None)
@given(seeds, st.integers(1, 8))
def test_exponential_of_antihermitian_is_unitary(seed, n):
    rng = np.random.default_rng(seed)
    u = matrix_exponential(1j * random_hermitian(rng, n))
    assert unitarity_defect(u) <= 1e-9
    assert operator_norm(u) == pytest.approx(1.0, abs=1e-9)
    v = random_unitary(rng, n)
    assert unitarity_defect(tensor(u, v)) <= 1e-9


@settings(max_examples=20, deadline=None)
@given(seeds, st.integers(1, 4), st.integers(1, 5))
def test_tuple_metric(seed, d, n):
    rng = np.random.default_rng(seed)
    a, b, c = (UnitaryTuple.from_list([random_unitary(rng, n) for _ in range(d)]) for _ in range(3))
    for u in a:
        assert operator_norm(u) == pytest.approx(1.0, abs=1e-9)
    assert tuple_distance(a, a) <= 1e-12
    assert tuple_distance(a, b) == pytest.approx(tuple_distance(b, a))
    assert tuple_distance(a, c) <= tuple_distance(a, b) + tuple_distance(b, c) + 1e-12
    assert tuple_distance(a, b) <= 2 + 1e-12


def test_unitary_tuple_validation():
    with pytest.raises(ValueError):
        UnitaryTuple.from_list([2 * np.eye(2)])
    with pytest.raises(ValueError):
        UnitaryTuple(np.eye(2))
    t = UnitaryTuple.from_list([np.eye(2), np.diag([1, -1])])
    assert t.d == 2 and t.n == 2
    assert np.allclose(t.hsum(), np.diag([4, 0]))
    assert np.allclose(t.with_phases([np.pi, 0]).matrices[0], -np.eye(2))
