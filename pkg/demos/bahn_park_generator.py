"""Reading off a perturbed generator from the lattice.

With c = d = (-b^2/2; b) on the Gaussian flow, the perturbed semigroup should
be generated by delta^2/2 + b delta + delta b + b x b - (b^2 x + x b^2)/2.
One lattice step gives (T_h - I)/h, off by O(h); extrapolating two steps
removes that term.
"""
from qfk import linalg
from qfk.classical import AutomorphismGroup, bp_generator
from qfk.lattice import LatticeParams
from qfk.semigroup import PerturbedSemigroup, generator_fd
from qfk.structure import HPGenerator, MultiplierCoeff, psi_from_hp, tau_gen

b = linalg.SIGMA_X
gen = HPGenerator.gaussian_subordination(linalg.SIGMA_Z)
coeff = MultiplierCoeff.bahn_park(b)

x = linalg.SIGMA_Y
psi = psi_from_hp(gen)
ag = AutomorphismGroup(linalg.SIGMA_Z)
print("generator formula vs classical expression:",
      linalg.spectral_norm(tau_gen(psi, coeff, coeff, x) - bp_generator(ag, b, x)))

print(" h        euler      richardson")
for h in (0.1, 0.05, 0.025, 0.0125):
    ps = PerturbedSemigroup.build(gen, LatticeParams(2, 1, 1, h), coeff)
    e = generator_fd(ps, "euler").error
    r = generator_fd(ps, "richardson").error
    print(f"{h:<8} {e:.4e} {r:.4e}")
