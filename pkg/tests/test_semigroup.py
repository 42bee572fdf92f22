import numpy as np
import pytest

from qfk import linalg
from qfk.lattice import LatticeParams
from qfk.semigroup import (PerturbedSemigroup, contractivity_report, convergence_study, cp_check, cp_sweep,
                           generator_fd, oracle_semigroup, semigroup_element, semigroup_law_sweep,
                           semigroup_property_check, semigroup_superops)
from qfk.structure import HPGenerator, MultiplierCoeff, unitary_conj_coeff

X, Z = linalg.SIGMA_X, linalg.SIGMA_Z


def gaussian():
    return HPGenerator.gaussian_subordination(Z)


def test_law_non_symmetric(rng):
    gen = HPGenerator.random(rng, 2, 2)
    ps = PerturbedSemigroup.build(gen, LatticeParams(2, 2, 6, 0.05), MultiplierCoeff.random(rng, 2, 2),
                                  MultiplierCoeff.random(rng, 2, 2))
    assert not ps.symmetric
    assert semigroup_law_sweep(ps) <= 1e-9
    assert semigroup_property_check(ps, 2, 3) <= 1e-9


def test_dressed_equals_direct(rng):
    ps = PerturbedSemigroup.build(gaussian(), LatticeParams(2, 1, 5, 0.1), MultiplierCoeff.bahn_park(X),
                                  MultiplierCoeff.random(rng, 2))
    a = linalg.random_matrix(rng, 2)
    for t in range(6):
        assert np.abs(semigroup_element(ps, a, t) - semigroup_element(ps, a, t, "direct")).max() <= 1e-12
    with pytest.raises(ValueError):
        semigroup_element(ps, a, 1, "euler")


def test_time_zero_is_identity(rng):
    ps = PerturbedSemigroup.build(gaussian(), LatticeParams(2, 1, 3, 0.1), MultiplierCoeff.random(rng, 2))
    assert np.allclose(semigroup_superops(ps, 0)[0], np.eye(4))


@pytest.mark.parametrize("coeff", [MultiplierCoeff.zero(2), MultiplierCoeff.bahn_park(X),
                                   unitary_conj_coeff(Z, [X])])
def test_cp_every_time(coeff):
    ps = PerturbedSemigroup.build(gaussian(), LatticeParams(2, 1, 10, 0.05), coeff)
    assert min(cp_sweep(ps)) >= -1e-9


def test_cp_rejects_asymmetric(rng):
    ps = PerturbedSemigroup.build(gaussian(), LatticeParams(2, 1, 3, 0.1), MultiplierCoeff.zero(2),
                                  MultiplierCoeff.creation([X]))
    with pytest.raises(ValueError):
        cp_check(ps, 1)


def test_hermiticity_swaps_coefficients(rng):
    gen = HPGenerator.random(rng, 2, 1)
    c, d = MultiplierCoeff.random(rng, 2), MultiplierCoeff.random(rng, 2)
    p = LatticeParams(2, 1, 4, 0.1)
    cd = PerturbedSemigroup.build(gen, p, c, d)
    dc = PerturbedSemigroup.build(gen, p, d, c)
    x = linalg.random_matrix(rng, 2)
    lhs = semigroup_element(cd, x, 4).conj().T
    assert np.abs(lhs - semigroup_element(dc, x.conj().T, 4)).max() <= 1e-10


def test_bahn_park_generator_schemes():
    ps = PerturbedSemigroup.build(gaussian(), LatticeParams(2, 1, 1, 0.025), MultiplierCoeff.bahn_park(X))
    rich = generator_fd(ps, "richardson")
    assert rich.error <= 0.05
    coarse = generator_fd(ps.with_step(0.05), "euler").error
    ratio = coarse / generator_fd(ps, "euler").error
    assert 1.6 <= ratio <= 2.5
    with pytest.raises(ValueError):
        generator_fd(ps, "midpoint")


def test_convergence_first_order(rng):
    table = convergence_study(gaussian(), MultiplierCoeff.bahn_park(X), MultiplierCoeff.bahn_park(X), X, 0.4,
                              [0.1, 0.05, 0.025])
    assert not table.exact
    assert all(0.7 <= o <= 1.3 for o in table.orders)
    assert len(table.rows()) == 3


def test_convergence_trivial_is_exact():
    z = MultiplierCoeff.zero(2)
    table = convergence_study(HPGenerator.trivial(2), z, z, X, 0.2, [0.1, 0.05, 0.025])
    assert table.exact and max(table.errors) <= 1e-12


def test_convergence_alignment():
    with pytest.raises(ValueError):
        convergence_study(gaussian(), MultiplierCoeff.zero(2), MultiplierCoeff.zero(2), X, 0.25, [0.1, 0.05, 0.025])


def test_oracle_semigroup_zero_time(rng):
    a = linalg.random_matrix(rng, 2)
    assert np.allclose(oracle_semigroup(np.ones((4, 4)), 0.0, a), a)


def test_contractivity_reported(rng):
    ps = PerturbedSemigroup.build(gaussian(), LatticeParams(2, 1, 4, 0.1), unitary_conj_coeff(Z, [X]))
    rep = contractivity_report(ps, 4, 10, rng)
    assert set(rep) == {"max_ratio", "norm_of_unit"}
    assert rep["norm_of_unit"] > 0
