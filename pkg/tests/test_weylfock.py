import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dilconst.rotreps import ThetaMatrix
from dilconst.weylfock import (
    FockContext,
    construct_vectors,
    inner,
    verify_compression,
    weyl_commutation_defect,
    weyl_matrix,
)


def theta2(t):
    return ThetaMatrix(2, {(0, 1): t})


def random_theta(rng, d, scale=math.pi):
    a = np.triu(rng.uniform(-scale, scale, (d, d)), 1)
    return ThetaMatrix.from_array(a - a.T)


def test_basis_enumeration():
    ctx = FockContext(3, 4)
    assert ctx.dim == math.comb(7, 3)
    assert ctx.basis[0] == (0, 0, 0)
    assert ctx.basis[1:4] == [(1, 0, 0), (0, 1, 0), (0, 0, 1)]
    assert list(ctx.occupation) == sorted(ctx.occupation)
    assert FockContext(3, 4).basis == ctx.basis
    assert len(ctx.low_block()) == math.comb(5, 3)
    with pytest.raises(ValueError):
        FockContext(0, 3)


def test_weyl_basic_identities():
    ctx = FockContext(2, 8)
    assert np.allclose(weyl_matrix(np.zeros(2), ctx), np.eye(ctx.dim))
    z = np.array([0.4 - 0.2j, -0.3j])
    w = weyl_matrix(z, ctx)
    assert np.max(np.abs(weyl_matrix(-z, ctx) - w.conj().T)) <= 1e-9
    assert np.max(np.abs(w.conj().T @ w - np.eye(ctx.dim))) <= 1e-9


def test_vacuum_expectation():
    ctx = FockContext(1, 12)
    for z in (0.1, 0.3j, 0.2 - 0.25j):
        val = np.vdot(ctx.vacuum(), weyl_matrix([z], ctx) @ ctx.vacuum())
        assert abs(val - math.exp(-abs(z) ** 2 / 2)) <= 1e-6


def test_coherent_state_overlaps():
    """<W(z) vac, W(y) vac> = exp(-(|z|^2 + |y|^2) / 2 + <z, y>) (linear in the first slot)."""
    ctx = FockContext(2, 14)
    y, z = np.array([0.3, -0.2j]), np.array([0.1 + 0.2j, 0.25])
    wy, wz = weyl_matrix(y, ctx) @ ctx.vacuum(), weyl_matrix(z, ctx) @ ctx.vacuum()
    expected = np.exp(-(np.vdot(z, z).real + np.vdot(y, y).real) / 2 + inner(z, y))
    assert abs(np.vdot(wy, wz) - expected) <= 1e-8


def test_weyl_relation_on_low_block():
    ctx = FockContext(2, 12)
    y, z = np.array([0.3, 0.1j]), np.array([-0.2j, 0.25])
    assert weyl_commutation_defect(y, z, ctx) <= 1e-4


def test_truncation_convergence():
    y, z = np.array([0.4, 0.3j]), np.array([0.2 - 0.5j, 0.3])
    defects = [weyl_commutation_defect(y, z, FockContext(2, c)) for c in (6, 8, 10, 12)]
    assert all(b <= 1.1 * a for a, b in zip(defects, defects[1:]))
    vs = construct_vectors(theta2(0.3), theta2(0.6))
    res = [verify_compression(vs, c) for c in (6, 8, 10, 12)]
    for key in ("max_residual", "commutation_defect", "phase_defect"):
        vals = [getattr(r, key) for r in res]
        assert all(b <= 1.1 * a for a, b in zip(vals, vals[1:])), (key, vals)


def test_vector_system_invariants_many_pairs():
    rng = np.random.default_rng(0)
    for i in range(100):
        d = 2 + i % 3
        vs = construct_vectors(random_theta(rng, d), random_theta(rng, d))
        assert vs.max_defect() <= 1e-10
        assert vs.gram_determinant() > 0


@settings(max_examples=30, deadline=None)
@given(st.integers(2, 5), st.integers(0, 2**32 - 1))
def test_vector_system_property(d, seed):
    rng = np.random.default_rng(seed)
    vs = construct_vectors(random_theta(rng, d), random_theta(rng, d))
    defects = vs.defects()
    assert max(defects.values()) <= 1e-10
    assert vs.z.shape == (d, 2 * d)


def test_vector_examples():
    vs = construct_vectors(theta2(0.7), theta2(0.7))
    assert np.all(vs.y == 0)
    assert np.allclose(vs.z[:, :2], vs.x)
    vs = construct_vectors(ThetaMatrix(2), theta2(0.8))
    assert np.allclose(np.sum(np.abs(vs.y) ** 2, axis=1), 0.4)
    with pytest.raises(ValueError):
        construct_vectors(ThetaMatrix(2), ThetaMatrix(3))


def test_compression_without_perturbation_is_exact():
    rep = verify_compression(construct_vectors(theta2(0.5), theta2(0.5)), 8)
    assert rep.scale == 1.0
    assert rep.max_residual <= 1e-12


def test_compression_scale_and_residual():
    vs = construct_vectors(theta2(0.3), theta2(0.7))
    rep = verify_compression(vs, 10)
    assert rep.scale == pytest.approx(math.exp(0.1))
    assert np.allclose(rep.scale_from_y, rep.scale, rtol=1e-12)
    assert rep.max_residual <= 1e-3
    assert rep.phase_defect <= 1e-4


def test_compression_rejects_coarse_truncation():
    vs = construct_vectors(theta2(2.5), theta2(2.0))
    with pytest.raises(ValueError, match="cutoff"):
        verify_compression(vs, 6, tol=1e-6)
