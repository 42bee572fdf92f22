"""Closed-form references from Gaussian subordination of an inner automorphism group.

``alpha_s = Ad(exp(i s Htilde))`` has generator ``delta = i[Htilde, .]``.
Averaging ``alpha_{B_t}`` over Brownian motion gives the semigroup with
generator ``delta**2 / 2``; in the eigenbasis of ``Htilde`` it damps entry
``(j, k)`` by ``exp(-(lambda_j - lambda_k)**2 t / 2)``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg


@dataclass(frozen=True)
class AutomorphismGroup:
    Htilde: np.ndarray
    eigenvalues: np.ndarray = field(init=False, repr=False)
    eigenbasis: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        H = linalg.hermitian(self.Htilde)
        w, V = np.linalg.eigh(H)
        object.__setattr__(self, "Htilde", H)
        object.__setattr__(self, "eigenvalues", w)
        object.__setattr__(self, "eigenbasis", V)

    @property
    def n(self) -> int:
        return self.Htilde.shape[0]

    def alpha(self, s: float, a) -> np.ndarray:
        """``exp(i s Htilde) a exp(-i s Htilde)`` from the eigen-decomposition."""
        V, w = self.eigenbasis, self.eigenvalues
        u = (V * np.exp(1j * s * w)) @ V.conj().T
        return u @ linalg.as_matrix(a) @ u.conj().T


def delta_apply(ag: AutomorphismGroup, x) -> np.ndarray:
    x = linalg.as_matrix(x)
    return 1j * (ag.Htilde @ x - x @ ag.Htilde)


def gaussian_semigroup(ag: AutomorphismGroup, t: float, a) -> np.ndarray:
    if t < 0:
        raise ValueError("t must be non-negative")
    V, w = ag.eigenbasis, ag.eigenvalues
    a_eig = V.conj().T @ linalg.as_matrix(a) @ V
    gap = w[:, None] - w[None, :]
    return V @ (np.exp(-0.5 * gap**2 * t) * a_eig) @ V.conj().T


def gauss_hermite_check(ag: AutomorphismGroup, t: float, a, nodes: int = 40) -> np.ndarray:
    """``E[alpha_{B_t}(a)]`` by Gauss-Hermite quadrature for ``B_t ~ N(0, t)``."""
    if nodes < 20:
        raise ValueError("use at least 20 quadrature nodes")
    x, wts = np.polynomial.hermite_e.hermegauss(nodes)
    wts = wts / np.sqrt(2 * np.pi)
    s = np.sqrt(t) * x
    return sum(wk * ag.alpha(sk, a) for sk, wk in zip(s, wts))


def monte_carlo_semigroup(ag: AutomorphismGroup, t: float, a, samples: int,
                          rng: np.random.Generator) -> np.ndarray:
    """Sample average of ``alpha_{B_t}(a)``. For illustration only."""
    s = rng.normal(0.0, np.sqrt(t), samples)
    return sum(ag.alpha(sk, a) for sk in s) / samples


def half_delta_squared(ag: AutomorphismGroup, x) -> np.ndarray:
    return 0.5 * delta_apply(ag, delta_apply(ag, x))


def ls_generator(ag: AutomorphismGroup, b, x) -> np.ndarray:
    """``delta**2 / 2 + rho_b delta``."""
    b = linalg.as_matrix(b)
    return half_delta_squared(ag, x) + delta_apply(ag, x) @ b


def bp_generator(ag: AutomorphismGroup, b, x) -> np.ndarray:
    """``delta**2/2 + lambda_b delta + rho_b delta + lambda_b rho_b - lambda_{b^2}/2 - rho_{b^2}/2``."""
    b = linalg.hermitian(b)
    x = linalg.as_matrix(x)
    dx = delta_apply(ag, x)
    b2 = b @ b
    return half_delta_squared(ag, x) + b @ dx + dx @ b + b @ x @ b - 0.5 * b2 @ x - 0.5 * x @ b2
