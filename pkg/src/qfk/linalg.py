"""Dense complex matrix helpers, superoperators and complete-positivity tests.

Matrices are plain ``numpy`` arrays of dtype ``complex128``. Superoperators
on ``M_n`` are ``n**2 x n**2`` matrices acting on column-stacked vectors, so
that ``vec(A X B) = (B^T kron A) vec(X)``. This convention is used everywhere
in the package.
"""
from __future__ import annotations

from typing import Callable, Sequence

import numpy as np
import scipy.linalg

HERMITIAN_TOL = 1e-12
UNITARY_TOL = 1e-10

SIGMA_X = np.array([[0, 1], [1, 0]], dtype=complex)
SIGMA_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
SIGMA_Z = np.array([[1, 0], [0, -1]], dtype=complex)

MatrixMap = Callable[[np.ndarray], np.ndarray]


def as_matrix(a) -> np.ndarray:
    """Return ``a`` as a 2-d complex array (copying only when needed)."""
    m = np.asarray(a, dtype=complex)
    if m.ndim != 2:
        raise ValueError(f"expected a 2-d array, got shape {m.shape}")
    return m


def identity(n: int) -> np.ndarray:
    return np.eye(n, dtype=complex)


def adjoint(a) -> np.ndarray:
    return as_matrix(a).conj().T


def kron(a, b) -> np.ndarray:
    return np.kron(as_matrix(a), as_matrix(b))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    m = as_matrix(a)
    return m.shape[0] == m.shape[1] and np.max(np.abs(m - m.conj().T), initial=0.0) <= tol


def is_unitary(a, tol: float = UNITARY_TOL) -> bool:
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        return False
    return spectral_norm(m.conj().T @ m - np.eye(m.shape[0])) <= tol


def hermitian(a, tol: float = HERMITIAN_TOL) -> np.ndarray:
    """Validate that ``a`` is Hermitian and return it as an array."""
    m = as_matrix(a)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian")
    return m


def unitary(a, tol: float = UNITARY_TOL) -> np.ndarray:
    """Validate that ``a`` is unitary and return it as an array."""
    m = as_matrix(a)
    if not is_unitary(m, tol):
        raise ValueError("matrix is not unitary")
    return m


def matrix_exp(a) -> np.ndarray:
    """Matrix exponential (Pade scaling-and-squaring, via scipy)."""
    m = as_matrix(a)
    if m.shape[0] != m.shape[1]:
        raise ValueError(f"matrix_exp needs a square matrix, got shape {m.shape}")
    return scipy.linalg.expm(m)


def spectral_norm(a) -> float:
    """Largest singular value."""
    m = as_matrix(a)
    if m.size == 0:
        return 0.0
    return float(np.linalg.norm(m, 2))


def vec(a) -> np.ndarray:
    """Column-stacking vectorisation."""
    return as_matrix(a).T.reshape(-1)


def unvec(v, n: int | None = None) -> np.ndarray:
    v = np.asarray(v, dtype=complex).reshape(-1)
    if n is None:
        n = int(round(np.sqrt(v.size)))
    return v.reshape(n, n).T


def matrix_unit(n: int, i: int, j: int) -> np.ndarray:
    e = np.zeros((n, n), dtype=complex)
    e[i, j] = 1.0
    return e


def superop_from_map(phi: MatrixMap, n: int) -> np.ndarray:
    """Sample a linear map on matrix units and return its superoperator."""
    cols = [vec(phi(unvec(e, n))) for e in np.eye(n * n, dtype=complex)]
    return np.stack(cols, axis=1)


def superop_from_sandwich(left, right) -> np.ndarray:
    """Superoperator of ``x -> left @ x @ right``."""
    left, right = as_matrix(left), as_matrix(right)
    if left.shape != right.shape or left.shape[0] != left.shape[1]:
        raise ValueError("sandwich factors must be square with matching shapes")
    return np.kron(right.T, left)


def apply_superop(s, x) -> np.ndarray:
    x = as_matrix(x)
    return unvec(as_matrix(s) @ vec(x), x.shape[0])


def choi_matrix(phi: MatrixMap, n: int) -> np.ndarray:
    """Choi matrix ``sum_ij E_ij kron phi(E_ij)``; PSD iff ``phi`` is CP."""
    blocks = [[as_matrix(phi(matrix_unit(n, i, j))) for j in range(n)] for i in range(n)]
    return np.block(blocks)


def choi_from_superop(s, n: int) -> np.ndarray:
    return choi_matrix(lambda x: apply_superop(s, x), n)


def hermitian_eigvals(a, tol: float = 1e-10) -> np.ndarray:
    """Eigenvalues of a Hermitian matrix in ascending order.

    The Hermitian part is diagonalised with LAPACK ``heevd`` after checking
    that the anti-Hermitian part is below ``tol``.
    """
    m = as_matrix(a)
    if not is_hermitian(m, tol):
        raise ValueError("matrix is not Hermitian within tolerance")
    return np.linalg.eigvalsh(0.5 * (m + m.conj().T))


def assert_psd(a, tol: float = 1e-10) -> bool:
    """True iff the smallest eigenvalue of Hermitian ``a`` is at least ``-tol``."""
    return bool(hermitian_eigvals(a, tol)[0] >= -tol)


def min_choi_eigenvalue(phi: MatrixMap, n: int) -> float:
    c = choi_matrix(phi, n)
    return float(hermitian_eigvals(c, 1e-8)[0])


def commutator(a, b) -> np.ndarray:
    return a @ b - b @ a


def anticommutator(a, b) -> np.ndarray:
    return a @ b + b @ a


def random_matrix(rng: np.random.Generator, n: int, m: int | None = None) -> np.ndarray:
    m = n if m is None else m
    return (rng.standard_normal((n, m)) + 1j * rng.standard_normal((n, m))) / np.sqrt(2)


def random_hermitian(rng: np.random.Generator, n: int) -> np.ndarray:
    a = random_matrix(rng, n)
    return 0.5 * (a + a.conj().T)


def random_unitary(rng: np.random.Generator, n: int) -> np.ndarray:
    """Haar-random unitary from the QR decomposition of a Ginibre matrix."""
    q, r = np.linalg.qr(random_matrix(rng, n))
    return q * (np.diag(r) / np.abs(np.diag(r)))


def random_vector(rng: np.random.Generator, n: int) -> np.ndarray:
    return rng.standard_normal(n) + 1j * rng.standard_normal(n)


def block_diag(*blocks: Sequence[np.ndarray]) -> np.ndarray:
    return scipy.linalg.block_diag(*blocks).astype(complex)
