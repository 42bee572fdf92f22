import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from qfk import classical, linalg
from qfk.structure import (HPGenerator, MultiplierCoeff, ampliate, blocks, delta_projection, phi_from_hp,
                           psi_from_hp, tau_block, tau_gen, tau_superop, unitary_conj_coeff,
                           unitary_conj_generator)

seeds = st.integers(min_value=0, max_value=2**32 - 1)
dims = st.sampled_from([(1, 1), (2, 1), (2, 2), (3, 1)])


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_cocycle_condition(seed, nd):
    gen = HPGenerator.random(np.random.default_rng(seed), *nd)
    assert max(gen.cocycle_residuals()) <= 1e-10


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_phi_is_a_structure_map(seed, nd):
    rng = np.random.default_rng(seed)
    n, d = nd
    phi = phi_from_hp(HPGenerator.random(rng, n, d))
    x, y = linalg.random_matrix(rng, n), linalg.random_matrix(rng, n)
    Delta = delta_projection(n, d)
    lhs = phi(x @ y)
    rhs = phi(x) @ ampliate(y, d) + ampliate(x, d) @ phi(y) + phi(x) @ Delta @ phi(y)
    assert linalg.spectral_norm(lhs - rhs) <= 1e-10
    assert linalg.spectral_norm(phi(x).conj().T - phi(x.conj().T)) <= 1e-12
    assert linalg.spectral_norm(phi(np.eye(n))) <= 1e-12


@settings(max_examples=40, deadline=None)
@given(seeds, dims)
def test_lower_left_block(seed, nd):
    rng = np.random.default_rng(seed)
    gen = HPGenerator.random(rng, *nd)
    phi = phi_from_hp(gen)
    x = linalg.random_matrix(rng, gen.n)
    assert linalg.spectral_norm(phi.delta0(x) - (gen.r @ x - gen.pi(x) @ gen.r)) <= 1e-12


def test_psi_adds_delta_ampliation(rng):
    gen = HPGenerator.random(rng, 2, 2)
    x = linalg.random_matrix(rng, 2)
    diff = psi_from_hp(gen)(x) - phi_from_hp(gen)(x)
    assert np.allclose(diff, delta_projection(2, 2) @ ampliate(x, 2))
    assert np.allclose(psi_from_hp(gen).pi0(x), gen.pi(x))


def test_tau_gen_block_agree_100(rng):
    worst = 0.0
    for _ in range(100):
        n, d = rng.integers(1, 4), rng.integers(1, 3)
        psi = psi_from_hp(HPGenerator.random(rng, n, d))
        c, dd = MultiplierCoeff.random(rng, n, d), MultiplierCoeff.random(rng, n, d)
        x = linalg.random_matrix(rng, n)
        worst = max(worst, linalg.spectral_norm(tau_gen(psi, c, dd, x) - tau_block(psi, c, dd, x)))
    assert worst <= 1e-12


def test_tau_hermiticity(rng):
    for _ in range(20):
        psi = psi_from_hp(HPGenerator.random(rng, 2, 2))
        c, d = MultiplierCoeff.random(rng, 2, 2), MultiplierCoeff.random(rng, 2, 2)
        x = linalg.random_matrix(rng, 2)
        lhs = tau_gen(psi, c, d, x).conj().T
        assert linalg.spectral_norm(lhs - tau_gen(psi, d, c, x.conj().T)) <= 1e-12


def test_zero_coefficients_give_tau0(rng):
    psi = psi_from_hp(HPGenerator.random(rng, 3, 1))
    z = MultiplierCoeff.zero(3)
    x = linalg.random_matrix(rng, 3)
    assert np.allclose(tau_gen(psi, z, z, x), psi.tau0(x), atol=1e-12)


def test_gaussian_reductions_50(rng):
    worst = {"half": 0.0, "ls": 0.0, "bp": 0.0}
    for _ in range(50):
        Ht = linalg.random_hermitian(rng, 2)
        b = linalg.random_hermitian(rng, 2)
        ag = classical.AutomorphismGroup(Ht)
        psi = psi_from_hp(HPGenerator.gaussian_subordination(Ht))
        x = linalg.random_matrix(rng, 2)
        z = MultiplierCoeff.zero(2)
        worst["half"] = max(worst["half"], linalg.spectral_norm(
            tau_gen(psi, z, z, x) - classical.half_delta_squared(ag, x)))
        bl = linalg.random_matrix(rng, 2)
        worst["ls"] = max(worst["ls"], linalg.spectral_norm(
            tau_gen(psi, z, MultiplierCoeff.creation([bl]), x) - classical.ls_generator(ag, bl, x)))
        bp = MultiplierCoeff.bahn_park(b)
        worst["bp"] = max(worst["bp"], linalg.spectral_norm(
            tau_gen(psi, bp, bp, x) - classical.bp_generator(ag, b, x)))
    assert max(worst.values()) <= 1e-12


def test_unitary_conjugation_50(rng):
    for _ in range(50):
        gen = HPGenerator.random(rng, 2, 2)
        psi = psi_from_hp(gen)
        h = linalg.random_hermitian(rng, 2)
        l = [linalg.random_matrix(rng, 2) for _ in range(2)]
        c = unitary_conj_coeff(h, l)
        x = linalg.random_matrix(rng, 2)
        assert linalg.spectral_norm(tau_gen(psi, c, c, x) - unitary_conj_generator(psi, h, l, x)) <= 1e-12
        assert linalg.spectral_norm(tau_gen(psi, c, c, np.eye(2))) <= 1e-12


def test_gaussian_sign_convention():
    psi = psi_from_hp(HPGenerator.gaussian_subordination(linalg.SIGMA_Z))
    x = linalg.SIGMA_X
    assert np.allclose(psi.delta0(x), 1j * linalg.commutator(linalg.SIGMA_Z, x))
    assert np.allclose(psi.delta0_dag(x), psi.delta0(x))


def test_validation():
    with pytest.raises(ValueError):
        HPGenerator(np.array([[0, 1], [0, 0]]), (np.zeros((2, 2)),), np.eye(2))
    with pytest.raises(ValueError):
        HPGenerator(np.zeros((2, 2)), (np.zeros((2, 2)),), 2 * np.eye(2))
    with pytest.raises(ValueError):
        MultiplierCoeff.bahn_park(np.array([[0, 1], [0, 0]]))
    psi = psi_from_hp(HPGenerator.trivial(2, 1))
    with pytest.raises(ValueError):
        tau_gen(psi, MultiplierCoeff.zero(2, 2), MultiplierCoeff.zero(2, 2), np.eye(2))


def test_trivial_flow_superop_is_zero():
    psi = psi_from_hp(HPGenerator.trivial(2, 1))
    z = MultiplierCoeff.zero(2)
    assert not np.any(tau_superop(psi, z, z))
    assert blocks(psi(np.eye(2)), 2)[0].shape == (2, 2)
