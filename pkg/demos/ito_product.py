"""The product of two stochastic integrals is an integral.

Z = int G and Z' = int G' multiply to int H, where H adds a gauge-sector
contraction G Delta G'. On the lattice the contraction also has an h-sized
vacuum part, so the continuous formula is off by O(h). Keeping that part makes
the identity exact.
"""
import numpy as np

from qfk import linalg
from qfk.ito import BlockIntegrand, ito_product_integrand, ito_verify, product_residual
from qfk.lattice import LatticeParams

rng = np.random.default_rng(7)
p = LatticeParams(2, 1, 5, 0.1)
G = BlockIntegrand.from_matrices(p, linalg.random_matrix(rng, 4))
Gp = BlockIntegrand.from_matrices(p, linalg.random_matrix(rng, 4))

coarse, fine = ito_verify([G, Gp], 0.5, 4, rng)
print(f"continuous table: residual {coarse:.4f} at h=0.1, {fine:.4f} at h=0.05, ratio {coarse / fine:.2f}")

H = ito_product_integrand(G, Gp, lattice_exact=True)
print("discrete table residual:", product_residual([G, Gp], H, 5, 4, rng))

G3 = BlockIntegrand.from_matrices(p, linalg.random_matrix(rng, 4))
coarse, fine = ito_verify([G, Gp, G3], 0.5, 4, rng)
print(f"three factors: ratio {coarse / fine:.2f}")
