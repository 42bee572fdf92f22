"""Multiplier processes restart cleanly.

M_{s+t} = J_s(M_t) M_s: running the multiplier for s steps and then a fresh
copy, shifted by s and dressed by the flow, is the same as running it for s+t
steps. On the lattice this holds to rounding error. The Picard series of the
recursion terminates because an m-fold iterated sum needs m distinct slices.
"""
import numpy as np

from qfk import linalg
from qfk.flow import FlowHandle
from qfk.lattice import LatticeParams, vacuum_vector
from qfk.multiplier import (MultiplierProcess, multiplier_apply, multiplier_cocycle_check, norm_bound_check,
                            picard_apply, picard_terms)
from qfk.structure import HPGenerator, MultiplierCoeff

rng = np.random.default_rng(4)
p = LatticeParams(2, 2, 8, 0.05)
flow = FlowHandle.build(HPGenerator.random(rng, 2, 2), p)
mp = MultiplierProcess(MultiplierCoeff.random(rng, 2, 2), flow)

worst = max(multiplier_cocycle_check(mp, s, t, 3, rng) for s in range(9) for t in range(9 - s))
print("worst cocycle residual over all s + t <= 8:", worst)

v = vacuum_vector(p, linalg.random_vector(rng, 2))
norms = [float(x.norm()) for x in picard_terms(mp, 8, v, 9)]
print("Picard term norms:", " ".join(f"{n:.2e}" for n in norms))
print("sum vs recursion:", float((picard_apply(mp, 8, v, 9) - (multiplier_apply(mp, 8, v) - v)).norm()))

observed, bound = norm_bound_check(mp, 8, 100, rng)
print(f"||(M_t - I) v|| / ||v||: observed {observed:.3f}, bound {bound:.3f}")
