"""Averaging an automorphism group over Brownian motion.

The lattice flow with L = -i Htilde is a discrete Brownian rotation. Its vacuum
expectation should damp the off-diagonal entries of an observable, in the
eigenbasis of Htilde, like exp(-(gap**2) t / 2). We compare four routes to the
same matrix: closed form, Gauss-Hermite quadrature, Monte Carlo sampling and
the lattice.
"""
import numpy as np

from qfk import linalg
from qfk.classical import AutomorphismGroup, gauss_hermite_check, gaussian_semigroup, monte_carlo_semigroup
from qfk.lattice import LatticeParams
from qfk.semigroup import PerturbedSemigroup, semigroup_element
from qfk.structure import HPGenerator, MultiplierCoeff

Htilde = linalg.SIGMA_Z
a = linalg.SIGMA_X
t = 0.5
ag = AutomorphismGroup(Htilde)

closed = gaussian_semigroup(ag, t, a)
print("closed form, off-diagonal entry:", closed[0, 1].real, "(exp(-1) =", np.exp(-1), ")")

quad = gauss_hermite_check(ag, t, a, nodes=40)
print("40-node quadrature error:", linalg.spectral_norm(quad - closed))

mc = monte_carlo_semigroup(ag, t, a, samples=2000, rng=np.random.default_rng(0))
print("Monte Carlo (2000 paths) error:", linalg.spectral_norm(mc - closed))

gen = HPGenerator.gaussian_subordination(Htilde)
zero = MultiplierCoeff.zero(2)
for N in (5, 10, 20):
    ps = PerturbedSemigroup.build(gen, LatticeParams(2, 1, N, t / N), zero)
    err = linalg.spectral_norm(semigroup_element(ps, a, N) - closed)
    print(f"lattice N={N:2d}: error {err:.4e}")
print("the lattice error halves with h: a first-order scheme.")
