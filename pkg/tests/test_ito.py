import numpy as np
import pytest

from qfk import linalg
from qfk.flow import Adaptedness, FlowHandle, flow_apply
from qfk.ito import (BlockIntegrand, adjoint_residual, discrete_integral, exponential_matrix_element,
                     inside_integral_check, ito_product_integrand, ito_triple_integrand, ito_verify,
                     norm_estimate_check, positivity_check, product_residual)
from qfk.lattice import LatticeParams, discrete_exponential, product_vector, random_state, vacuum_vector
from qfk.structure import HPGenerator

P = LatticeParams(2, 1, 5, 0.1)


def rand_integrand(rng, p=P, creation_only=False):
    m = linalg.random_matrix(rng, (1 + p.d) * p.n)
    if creation_only:
        m[:, p.n:] = 0
    return BlockIntegrand.from_matrices(p, m)


def test_zero_integrand(rng):
    v = random_state(P, rng)
    assert discrete_integral(BlockIntegrand.zero(P), 5, v).norm() == 0.0


def test_pure_time_block_riemann_sum(rng):
    x = linalg.random_matrix(rng, 2)
    G = BlockIntegrand.from_blocks(P, k=x)
    u, v = linalg.random_vector(rng, 2), linalg.random_vector(rng, 2)
    lhs = vacuum_vector(P, u).inner(discrete_integral(G, 5, vacuum_vector(P, v)))
    assert abs(lhs - 0.5 * np.vdot(u, x @ v)) <= 1e-12


def test_exponential_vector_matrix_elements(rng):
    p = LatticeParams(2, 2, 4, 0.1)
    G = BlockIntegrand.from_matrices(p, [linalg.random_matrix(rng, 6) for _ in range(4)])
    f, g = rng.standard_normal((4, 2)), rng.standard_normal((4, 2)) + 0.5j
    u, v = linalg.random_vector(rng, 2), linalg.random_vector(rng, 2)
    ef = product_vector(p, u, discrete_exponential(p, f))
    eg = product_vector(p, v, discrete_exponential(p, g))
    for t in range(5):
        lhs = ef.inner(discrete_integral(G, t, eg))
        assert abs(lhs - exponential_matrix_element(G, t, u, f, v, g)) <= 1e-12


def test_norm_estimate_100(rng):
    for _ in range(100):
        observed, bound = norm_estimate_check(rand_integrand(rng), 5, 2, rng)
        assert observed <= bound


def test_component_norms():
    G = BlockIntegrand.from_blocks(P, k=np.eye(2), nn=2 * np.eye(2))
    norms = G.component_norms(5)
    assert norms["k"] == pytest.approx(0.5) and norms["n"] == pytest.approx(2.0)
    assert norms["l"] == 0.0 and G.norm(5) == pytest.approx(2.5)


def test_adjoint_relation(rng):
    assert adjoint_residual(rand_integrand(rng), 5, 4, rng) <= 1e-10


def test_product_with_zero(rng):
    G = rand_integrand(rng)
    H = ito_product_integrand(G, BlockIntegrand.zero(P))
    assert product_residual([G, BlockIntegrand.zero(P)], H, 5, 3, rng) == 0.0
    assert ito_verify([G, BlockIntegrand.zero(P)], 0.5, 2, rng) == (0.0, 0.0)


def test_time_blocks_follow_product_rule(rng):
    x, y = linalg.random_matrix(rng, 2), linalg.random_matrix(rng, 2)
    G, Gp = BlockIntegrand.from_blocks(P, k=x), BlockIntegrand.from_blocks(P, k=y)
    # no Ito correction: the lattice residual is the Riemann-sum diagonal term
    H = ito_product_integrand(G, Gp)
    v = vacuum_vector(P, linalg.random_vector(rng, 2))
    diff = discrete_integral(G, 5, discrete_integral(Gp, 5, v)) - discrete_integral(H, 5, v)
    expected = P.h**2 * 5 * np.linalg.norm(x @ y @ v.amplitudes.reshape(2, -1)[:, 0])
    assert diff.norm() == pytest.approx(expected)


def test_creation_squared_has_no_contraction(rng):
    b = linalg.random_matrix(rng, 2)
    G = BlockIntegrand.from_blocks(P, l=b)
    H_cont = ito_product_integrand(G, G)
    H_exact = ito_product_integrand(G, G, lattice_exact=True)
    v = random_state(P, rng)
    assert (discrete_integral(H_cont, 5, v) - discrete_integral(H_exact, 5, v)).norm() <= 1e-12


def test_lattice_exact_table(rng):
    G, Gp = rand_integrand(rng), rand_integrand(rng)
    H = ito_product_integrand(G, Gp, lattice_exact=True)
    assert product_residual([G, Gp], H, 5, 3, rng) <= 1e-12


def test_two_and_three_factor_order(rng):
    G1, G2, G3 = (rand_integrand(rng) for _ in range(3))
    r1, r2 = ito_verify([G1, G2], 0.5, 3, rng)
    assert 1.5 <= r1 / r2 <= 2.8
    r1, r2 = ito_verify([G1, G2, G3], 0.5, 3, rng)
    assert 1.5 <= r1 / r2 <= 2.8
    H = ito_triple_integrand(G1, G2, G3)
    assert product_residual([G1, G2, G3], H, 5, 2, rng) > 0


def test_inside_integral(rng):
    G = rand_integrand(rng, creation_only=True)
    fh = FlowHandle.build(HPGenerator.random(rng, 2, 1), P, Adaptedness.VACUUM)
    a = linalg.random_matrix(rng, 2)
    X = lambda v: flow_apply(fh, a, 2, v)
    assert inside_integral_check(G, X, 2, 5, 3, rng) <= 1e-10
    assert inside_integral_check(G, lambda v: v * 1.0, 0, 5, 3, rng) <= 1e-10
    assert inside_integral_check(G, X, 3, 3, 3, rng) == 0.0
    with pytest.raises(ValueError):
        inside_integral_check(rand_integrand(rng), X, 2, 5, 1, rng)


def test_positivity(rng):
    assert positivity_check(rand_integrand(rng), 5, 8, rng) >= -1e-10


def test_misaligned_lattices(rng):
    other = BlockIntegrand.zero(LatticeParams(2, 1, 5, 0.05))
    with pytest.raises(ValueError):
        ito_product_integrand(rand_integrand(rng), other)
    with pytest.raises(IndexError):
        discrete_integral(rand_integrand(rng), 6, random_state(P, rng))
    with pytest.raises(ValueError):
        BlockIntegrand.from_matrices(P, np.eye(3))
