"""Dense complex linear algebra used throughout the package.

Everything is a thin, checked layer over numpy / scipy LAPACK bindings.
Matrices are plain ``numpy.ndarray`` objects of dtype ``complex128``.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np
import scipy.linalg

HERMITIAN_RTOL = 1e-12
UNITARY_TOL = 1e-10
DIMENSION_CAP = 4096


class NonHermitianError(ValueError):
    """Raised when a matrix that must be Hermitian is not."""

    def __init__(self, asymmetry: float, scale: float):
        self.asymmetry = asymmetry
        self.scale = scale
        super().__init__(
            f"matrix is not Hermitian: max|A - A*| = {asymmetry:.3e} "
            f"(allowed {HERMITIAN_RTOL:.0e} * {scale:.3e})"
        )


class DimensionCapError(ValueError):
    """Raised when a requested dense matrix would exceed the dimension cap."""

    def __init__(self, required: int, cap: int):
        self.required = required
        self.cap = cap
        super().__init__(f"required dimension {required} exceeds cap {cap}")


def as_matrix(a) -> np.ndarray:
    m = np.asarray(a, dtype=complex)
    if m.ndim == 0:
        m = m.reshape(1, 1)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d matrix, got shape {m.shape}")
    return m


def hermitian_asymmetry(a: np.ndarray) -> float:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        return float("inf")
    return float(np.max(np.abs(a - a.conj().T))) if a.size else 0.0


def check_hermitian(a: np.ndarray, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"Hermitian matrix must be square, got {a.shape}")
    scale = float(np.max(np.abs(a))) if a.size else 0.0
    asym = hermitian_asymmetry(a)
    if asym > rtol * max(scale, np.finfo(float).tiny):
        raise NonHermitianError(asym, scale)
    return a


def hermitian_eigenvalues(a, rtol: float = HERMITIAN_RTOL) -> np.ndarray:
    """Ascending eigenvalues of a Hermitian matrix.

    The input is validated against ``rtol`` relative asymmetry before the
    LAPACK call; only the lower triangle is read by the solver.
    """
    a = check_hermitian(a, rtol)
    return np.linalg.eigvalsh(a)


def hermitian_eigh(a, rtol: float = HERMITIAN_RTOL) -> tuple[np.ndarray, np.ndarray]:
    a = check_hermitian(a, rtol)
    return np.linalg.eigh(a)


def eigen_residuals(a, values: np.ndarray, vectors: np.ndarray) -> np.ndarray:
    """Per-pair residuals ||A v - lambda v||."""
    a = as_matrix(a)
    return np.linalg.norm(a @ vectors - vectors * values[None, :], axis=0)


def lambda_max(a) -> float:
    a = as_matrix(a)
    n = a.shape[0]
    if n > 256:
        return float(scipy.linalg.eigvalsh(a, subset_by_index=[n - 1, n - 1])[0])
    return float(np.linalg.eigvalsh(a)[-1])


def operator_norm(a, hermitian: bool | None = None) -> float:
    """Spectral norm sqrt(lambda_max(A* A)).

    For Hermitian input this is the largest absolute eigenvalue, which is much
    cheaper than an SVD; pass ``hermitian=False`` to force the SVD route.
    """
    a = as_matrix(a)
    if a.size == 0:
        return 0.0
    if hermitian is None:
        scale = float(np.max(np.abs(a)))
        hermitian = a.shape[0] == a.shape[1] and hermitian_asymmetry(a) <= HERMITIAN_RTOL * max(scale, 1e-300)
    if hermitian:
        w = np.linalg.eigvalsh(a)
        return float(max(abs(w[0]), abs(w[-1])))
    return float(np.linalg.norm(a, 2))


def tensor(a, b, cap: int = DIMENSION_CAP) -> np.ndarray:
    """Kronecker product with a guard on the resulting dimension."""
    a = as_matrix(a)
    b = as_matrix(b)
    rows, cols = a.shape[0] * b.shape[0], a.shape[1] * b.shape[1]
    if max(rows, cols) > cap:
        raise DimensionCapError(max(rows, cols), cap)
    return np.kron(a, b)


def tensor_all(mats: Sequence, cap: int = DIMENSION_CAP) -> np.ndarray:
    out = np.eye(1, dtype=complex)
    for m in mats:
        out = tensor(out, m, cap)
    return out


def direct_sum(*mats) -> np.ndarray:
    return scipy.linalg.block_diag(*[as_matrix(m) for m in mats]).astype(complex)


def matrix_exponential(a) -> np.ndarray:
    """exp(A) by scaling and squaring with Pade approximants (scipy.linalg.expm)."""
    a = as_matrix(a)
    if a.shape[0] != a.shape[1]:
        raise ValueError(f"exponential needs a square matrix, got {a.shape}")
    return scipy.linalg.expm(a)


def hermitian_part(a) -> np.ndarray:
    a = as_matrix(a)
    return 0.5 * (a + a.conj().T)


def unitarity_defect(u) -> float:
    u = as_matrix(u)
    return float(np.linalg.norm(u.conj().T @ u - np.eye(u.shape[0]), 2))


@dataclass(frozen=True)
class UnitaryTuple:
    """An ordered d-tuple of n x n unitaries, stacked as an array (d, n, n)."""

    matrices: np.ndarray

    def __post_init__(self):
        mats = np.asarray(self.matrices, dtype=complex)
        if mats.ndim != 3 or mats.shape[1] != mats.shape[2] or mats.shape[0] < 1:
            raise ValueError(f"expected shape (d, n, n) with d >= 1, got {mats.shape}")
        mats.setflags(write=False)
        object.__setattr__(self, "matrices", mats)

    @classmethod
    def from_list(cls, mats: Sequence, check: bool = True, tol: float = UNITARY_TOL) -> "UnitaryTuple":
        arr = np.stack([as_matrix(m) for m in mats])
        out = cls(arr)
        if check:
            out.check_unitary(tol)
        return out

    @property
    def d(self) -> int:
        return self.matrices.shape[0]

    @property
    def n(self) -> int:
        return self.matrices.shape[1]

    def __len__(self) -> int:
        return self.d

    def __getitem__(self, k: int) -> np.ndarray:
        return self.matrices[k]

    def __iter__(self):
        return iter(self.matrices)

    def max_unitarity_defect(self) -> float:
        return max(unitarity_defect(u) for u in self.matrices)

    def check_unitary(self, tol: float = UNITARY_TOL) -> "UnitaryTuple":
        defect = self.max_unitarity_defect()
        if defect > tol:
            raise ValueError(f"tuple member not unitary: ||U*U - I|| = {defect:.3e} > {tol:.0e}")
        return self

    def conj(self) -> "UnitaryTuple":
        return UnitaryTuple(self.matrices.conj())

    def with_phases(self, phases: Sequence[float]) -> "UnitaryTuple":
        ph = np.exp(1j * np.asarray(phases, dtype=float))
        return UnitaryTuple(self.matrices * ph[:, None, None])

    def hsum(self) -> np.ndarray:
        """sum_k U_k + U_k^*."""
        s = self.matrices.sum(axis=0)
        return s + s.conj().T


def tuple_distance(a: UnitaryTuple, b: UnitaryTuple) -> float:
    """max_k ||A_k - B_k||, the tuple operator-norm metric."""
    return max(operator_norm(x - y, hermitian=False) for x, y in zip(a.matrices, b.matrices))
