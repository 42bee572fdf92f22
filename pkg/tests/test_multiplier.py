import math

import numpy as np
import pytest

from qfk import linalg
from qfk.flow import FlowHandle, apply_unitary_cocycle
from qfk.lattice import LatticeParams, random_state, vacuum_projection, vacuum_vector
from qfk.multiplier import (MultiplierProcess, continuity_constant, dressed_multiplier, multiplier_apply,
                            multiplier_cocycle_check, norm_bound, norm_bound_check, picard_apply, picard_terms)
from qfk.structure import HPGenerator, MultiplierCoeff


def make(rng, n=2, d=1, N=6, h=0.1, scale=1.0):
    fh = FlowHandle.build(HPGenerator.random(rng, n, d), LatticeParams(n, d, N, h))
    return MultiplierProcess(MultiplierCoeff.random(rng, n, d, scale), fh)


def test_starts_at_identity(rng):
    mp = make(rng)
    v = random_state(mp.flow.params, rng)
    assert np.array_equal(multiplier_apply(mp, 0, v).amplitudes, v.amplitudes)


def test_zero_coefficient_is_identity(rng):
    mp = make(rng)
    mp = MultiplierProcess(MultiplierCoeff.zero(2), mp.flow)
    v = random_state(mp.flow.params, rng)
    assert np.array_equal(multiplier_apply(mp, 6, v).amplitudes, v.amplitudes)


def test_commutes_with_vacuum_projection(rng):
    mp = make(rng, d=2, N=5)
    v = random_state(mp.flow.params, rng, (2,))
    for t in range(6):
        lhs = multiplier_apply(mp, t, vacuum_projection(t, v))
        rhs = vacuum_projection(t, multiplier_apply(mp, t, v))
        assert (lhs - rhs).norm().max() <= 1e-10


def test_cocycle_all_aligned(rng):
    mp = make(rng, d=2, N=6)
    worst = max(multiplier_cocycle_check(mp, s, t, 3, rng) for s in range(7) for t in range(7 - s))
    assert worst <= 1e-9


def test_cocycle_horizon(rng):
    mp = make(rng, N=4)
    with pytest.raises(IndexError):
        multiplier_cocycle_check(mp, 3, 2, 1, rng)


def test_picard_matches_recursion(rng):
    mp = make(rng, N=8)
    v = vacuum_vector(mp.flow.params, linalg.random_vector(rng, 2))
    diff = picard_apply(mp, 8, v, 20) - (multiplier_apply(mp, 8, v) - v)
    assert diff.norm() <= 1e-10


def test_picard_terms_decay(rng):
    mp = make(rng, N=8)
    v = vacuum_vector(mp.flow.params, linalg.random_vector(rng, 2))
    norms = [float(x.norm()) for x in picard_terms(mp, 8, v, 8)]
    # iterated integrals of order m need m distinct slices
    assert norms[-1] == 0.0
    assert all(b <= a * 1.5 for a, b in zip(norms[1:6], norms[2:7]))


def test_dressed_sweep_matches_direct(rng):
    mp = make(rng, d=2, N=4)
    v = vacuum_vector(mp.flow.params, np.eye(2))
    for t, w in enumerate(dressed_multiplier(mp, 4, v)):
        direct = apply_unitary_cocycle(mp.flow, t, multiplier_apply(mp, t, v))
        assert (w - direct).norm().max() <= 1e-12


def test_norm_bound_holds(rng):
    mp = make(rng, N=8, scale=1.5)
    for t in (1, 4, 8):
        observed, bound = norm_bound_check(mp, t, 100, rng)
        assert observed <= bound * (1 + 1e-6)


def test_norm_bound_values():
    c = MultiplierCoeff(np.zeros((1, 1)), (np.ones((1, 1)),))
    assert norm_bound(c, 1.0) == pytest.approx(math.sqrt(2) * math.exp(2))
    assert norm_bound(MultiplierCoeff.zero(2), 3.0) == 0.0


def test_norm_continuity(rng):
    mp = make(rng, N=8)
    p = mp.flow.params
    C = continuity_constant(mp.coeff, p.T, p.h)
    v = random_state(p, rng, (10,), vacuum_from=0)
    prev = v
    for t in range(1, 9):
        cur = multiplier_apply(mp, t, v)
        ratio = ((cur - prev).norm() / (math.sqrt(p.h) * v.norm())).max()
        assert ratio <= C
        prev = cur
