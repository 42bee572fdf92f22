"""Feynman-Kac perturbations of quantum stochastic flows on a repeated-interaction lattice."""

__version__ = "0.1.0"

from .lattice import LatticeParams, StateVector, vacuum_vector
from .structure import HPGenerator, MultiplierCoeff, psi_from_hp, tau_block, tau_gen
from .flow import Adaptedness, FlowHandle, flow_apply
from .multiplier import MultiplierProcess, multiplier_apply
from .semigroup import PerturbedSemigroup, convergence_study, generator_fd, semigroup_element
from .classical import AutomorphismGroup, gaussian_semigroup
from .ito import BlockIntegrand, discrete_integral, ito_product_integrand

__all__ = [
    "Adaptedness", "AutomorphismGroup", "BlockIntegrand", "FlowHandle", "HPGenerator",
    "LatticeParams", "MultiplierCoeff", "MultiplierProcess", "PerturbedSemigroup", "StateVector",
    "convergence_study", "discrete_integral", "flow_apply", "gaussian_semigroup", "generator_fd",
    "ito_product_integrand", "multiplier_apply", "psi_from_hp", "semigroup_element", "tau_block",
    "tau_gen", "vacuum_vector",
]
