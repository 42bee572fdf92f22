import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfk import linalg
from qfk.linalg import SIGMA_X, SIGMA_Y, SIGMA_Z

seeds = st.integers(min_value=0, max_value=2**32 - 1)


def taylor_exp(a, terms=20):
    out = np.eye(a.shape[0], dtype=complex)
    term = np.eye(a.shape[0], dtype=complex)
    for k in range(1, terms):
        term = term @ a / k
        out = out + term
    return out


def test_pauli_algebra():
    assert np.allclose(SIGMA_X @ SIGMA_Y, 1j * SIGMA_Z)
    assert np.allclose(linalg.commutator(SIGMA_Z, SIGMA_X), 2j * SIGMA_Y)
    assert np.allclose(linalg.anticommutator(SIGMA_X, SIGMA_X), 2 * np.eye(2))


def test_exp_of_rotation_matches_series():
    a = 1j * math.pi / 2 * SIGMA_X
    assert np.abs(linalg.matrix_exp(a) - 1j * SIGMA_X).max() < 1e-12
    assert np.abs(taylor_exp(a) - 1j * SIGMA_X).max() < 1e-12


def test_exp_rejects_rectangular():
    with pytest.raises(ValueError):
        linalg.matrix_exp(np.zeros((2, 3)))


def test_exp_of_zero_and_nilpotent():
    assert np.array_equal(linalg.matrix_exp(np.zeros((3, 3))), np.eye(3))
    nil = np.array([[0, 1], [0, 0]])
    assert np.allclose(linalg.matrix_exp(nil), [[1, 1], [0, 1]])


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_exp_commuting_sum(seed):
    rng = np.random.default_rng(seed)
    v = linalg.random_unitary(rng, 4)
    a = v @ np.diag(rng.standard_normal(4) + 1j * rng.standard_normal(4)) @ v.conj().T
    b = v @ np.diag(rng.standard_normal(4)) @ v.conj().T
    lhs = linalg.matrix_exp(a + b)
    rhs = linalg.matrix_exp(a) @ linalg.matrix_exp(b)
    assert linalg.spectral_norm(lhs - rhs) <= 1e-10 * max(1.0, linalg.spectral_norm(lhs))


@settings(max_examples=30, deadline=None)
@given(seeds)
def test_kron_identities(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (linalg.random_matrix(rng, k) for k in (2, 3, 2))
    assert np.abs(linalg.kron(linalg.kron(a, b), c) - linalg.kron(a, linalg.kron(b, c))).max() < 1e-14
    assert np.allclose(linalg.adjoint(linalg.kron(a, b)), linalg.kron(linalg.adjoint(a), linalg.adjoint(b)))


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_spectral_norm_submultiplicative(seed):
    rng = np.random.default_rng(seed)
    a, b = linalg.random_matrix(rng, 4), linalg.random_matrix(rng, 4)
    assert linalg.spectral_norm(a @ b) <= linalg.spectral_norm(a) * linalg.spectral_norm(b) + 1e-9


def test_spectral_norm_values():
    assert linalg.spectral_norm(np.diag([3, -4j])) == pytest.approx(4.0)
    assert linalg.spectral_norm(np.zeros((0, 0))) == 0.0


def test_validators():
    assert linalg.hermitian(SIGMA_Y) is not None
    with pytest.raises(ValueError):
        linalg.hermitian(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        linalg.unitary(2 * np.eye(2))
    assert linalg.is_unitary(linalg.random_unitary(np.random.default_rng(1), 5))


def test_vec_is_column_stacking():
    a = np.array([[1, 2], [3, 4]])
    assert np.array_equal(linalg.vec(a), [1, 3, 2, 4])
    assert np.array_equal(linalg.unvec(linalg.vec(a)), a)


def test_sandwich_superop(rng):
    l, r, x = (linalg.random_matrix(rng, 3) for _ in range(3))
    s = linalg.superop_from_sandwich(l, r)
    assert np.allclose(linalg.apply_superop(s, x), l @ x @ r)
    assert np.allclose(s, linalg.superop_from_map(lambda y: l @ y @ r, 3))


def test_transpose_is_not_cp():
    choi = linalg.choi_matrix(lambda x: x.T, 2)
    assert linalg.hermitian_eigvals(choi)[0] == pytest.approx(-1.0)
    assert not linalg.assert_psd(choi)


@settings(max_examples=50, deadline=None)
@given(seeds)
def test_conjugation_is_cp(seed):
    rng = np.random.default_rng(seed)
    v = linalg.random_matrix(rng, 3)
    assert linalg.min_choi_eigenvalue(lambda x: v.conj().T @ x @ v, 3) >= -1e-10


def test_eigvals_reject_non_hermitian():
    with pytest.raises(ValueError):
        linalg.hermitian_eigvals(np.array([[0, 1], [0, 0]]))
    assert np.allclose(linalg.hermitian_eigvals(SIGMA_X), [-1, 1])
