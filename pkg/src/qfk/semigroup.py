"""Feynman-Kac perturbed semigroups ``T_t(a) = E[(M^c_t)* j_t(a) M^d_t]`` on the lattice.

Matrix elements are ``<u, T_t(a) v> = <M^c_t u Omega, j_t(a) M^d_t v Omega>``.
The exact reference is the superoperator exponential of the bounded
generator built by :func:`qfk.structure.tau_gen`.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import linalg
from .flow import FlowHandle, flow_apply
from .lattice import LatticeParams, vacuum_vector
from .multiplier import MultiplierProcess, dressed_multiplier, multiplier_apply
from .structure import HPGenerator, MultiplierCoeff, psi_from_hp, tau_superop


@dataclass(frozen=True)
class PerturbedSemigroup:
    flow: FlowHandle
    left: MultiplierProcess
    right: MultiplierProcess

    @classmethod
    def build(cls, gen: HPGenerator, params: LatticeParams, c: MultiplierCoeff,
              d: MultiplierCoeff | None = None) -> "PerturbedSemigroup":
        fh = FlowHandle.build(gen, params)
        d = c if d is None else d
        return cls(fh, MultiplierProcess(c, fh), MultiplierProcess(d, fh))

    @property
    def params(self) -> LatticeParams:
        return self.flow.params

    @property
    def symmetric(self) -> bool:
        a, b = self.left.coeff, self.right.coeff
        return np.array_equal(a.column, b.column)

    def with_step(self, h: float, N: int | None = None) -> "PerturbedSemigroup":
        p = self.params
        params = LatticeParams(p.n, p.d, p.N if N is None else N, h)
        return PerturbedSemigroup.build(self.flow.gen, params, self.left.coeff, self.right.coeff)

    def tau_exact(self) -> np.ndarray:
        return tau_superop(psi_from_hp(self.flow.gen), self.left.coeff, self.right.coeff)


@dataclass(frozen=True)
class GeneratorEstimate:
    tau_hat: np.ndarray
    tau_exact: np.ndarray
    error: float
    h: float


def _check_time(ps: PerturbedSemigroup, t_idx: int) -> None:
    if not 0 <= t_idx <= ps.params.N:
        raise IndexError(f"time index {t_idx} out of range for N={ps.params.N}")


def _dressed_sweep(ps: PerturbedSemigroup, t_max: int):
    """Yield the superoperator of ``T_t`` for ``t = 0..t_max``."""
    p = ps.params.with_slices(t_max)
    basis = vacuum_vector(p, np.eye(p.n))
    left = dressed_multiplier(ps.left, t_max, basis)
    if ps.symmetric:
        pairs = ((w, w) for w in left)
    else:
        pairs = zip(left, dressed_multiplier(ps.right, t_max, basis))
    n = p.n
    for wl, wr in pairs:
        al = wl.amplitudes.reshape(n, n, p.noise_dim).conj()
        ar = wr.amplitudes.reshape(n, n, p.noise_dim)
        # T_t(a)_{pq} = sum_{u,v,r} conj(w_p[u,r]) a[u,v] w_q[v,r]
        gram = np.einsum("pur,qvr->puqv", al, ar)
        yield linalg.superop_from_map(lambda a: np.einsum("puqv,uv->pq", gram, a), n)


def semigroup_superops(ps: PerturbedSemigroup, t_max: int) -> list[np.ndarray]:
    """Superoperators of ``T_t`` for ``t = 0, ..., t_max`` (one forward sweep)."""
    _check_time(ps, t_max)
    return list(_dressed_sweep(ps, t_max))


def semigroup_superop(ps: PerturbedSemigroup, t_idx: int) -> np.ndarray:
    _check_time(ps, t_idx)
    for S in _dressed_sweep(ps, t_idx):
        pass
    return S


def semigroup_element(ps: PerturbedSemigroup, a, t_idx: int, method: str = "dressed") -> np.ndarray:
    """``T_t(a)``.

    ``method="dressed"`` uses the one-sweep recursion for ``U_t M_t``;
    ``method="direct"`` applies ``M^c_t``, ``M^d_t`` and ``j_t`` literally.
    """
    _check_time(ps, t_idx)
    a = linalg.as_matrix(a)
    if method == "dressed":
        return linalg.apply_superop(semigroup_superop(ps, t_idx), a)
    if method != "direct":
        raise ValueError(f"unknown method {method!r}")
    p = ps.params.with_slices(t_idx)
    basis = vacuum_vector(p, np.eye(p.n))
    ml = multiplier_apply(ps.left, t_idx, basis)
    mr = multiplier_apply(ps.right, t_idx, basis)
    return ml.amplitudes.conj() @ flow_apply(ps.flow, a, t_idx, mr).amplitudes.T


def semigroup_law_residual(superops: list[np.ndarray], s_idx: int, t_idx: int) -> float:
    """``max_ij ||T_{s+t}(E_ij) - T_s(T_t(E_ij))||``."""
    S = superops
    n = int(round(math.sqrt(S[0].shape[0])))
    lhs, rhs = S[s_idx + t_idx], S[s_idx] @ S[t_idx]
    return max(linalg.spectral_norm(linalg.unvec((lhs - rhs)[:, j], n)) for j in range(n * n))


def semigroup_property_check(ps: PerturbedSemigroup, s_idx: int, t_idx: int) -> float:
    _check_time(ps, s_idx + t_idx)
    return semigroup_law_residual(semigroup_superops(ps, s_idx + t_idx), s_idx, t_idx)


def semigroup_law_sweep(ps: PerturbedSemigroup, t_max: int | None = None) -> float:
    """Worst semigroup-law residual over all ``s + t <= t_max``."""
    t_max = ps.params.N if t_max is None else t_max
    S = semigroup_superops(ps, t_max)
    return max((semigroup_law_residual(S, s, t)
                for s in range(t_max + 1) for t in range(t_max + 1 - s)), default=0.0)


def cp_check(ps: PerturbedSemigroup, t_idx: int) -> float:
    """Smallest Choi eigenvalue of ``T_t``; only defined when ``c == d``."""
    if not ps.symmetric:
        raise ValueError("complete positivity is only guaranteed for c == d")
    S = semigroup_superop(ps, t_idx)
    return float(linalg.hermitian_eigvals(linalg.choi_from_superop(S, ps.params.n), 1e-8)[0])


def cp_sweep(ps: PerturbedSemigroup) -> list[float]:
    """Smallest Choi eigenvalue at every lattice time ``0..N``."""
    if not ps.symmetric:
        raise ValueError("complete positivity is only guaranteed for c == d")
    n = ps.params.n
    return [float(linalg.hermitian_eigvals(linalg.choi_from_superop(S, n), 1e-8)[0])
            for S in semigroup_superops(ps, ps.params.N)]


def _one_step_quotient(ps: PerturbedSemigroup, h: float) -> np.ndarray:
    S = semigroup_superop(ps.with_step(h, N=1), 1)
    return (S - np.eye(S.shape[0])) / h


def generator_fd(ps: PerturbedSemigroup, scheme: str = "euler") -> GeneratorEstimate:
    """Finite-difference generator at ``t = 0`` sampled on matrix units.

    ``euler``: ``(T_h - I) / h``. ``richardson``: ``2 D(h) - D(2h)`` where
    ``D(2h)`` is the one-step quotient of the lattice with step ``2h``; this
    cancels the ``O(h)`` term of the one-step expansion.
    """
    h = ps.params.h
    scheme = scheme.lower()
    if scheme == "euler":
        tau_hat = _one_step_quotient(ps, h)
    elif scheme == "richardson":
        tau_hat = 2 * _one_step_quotient(ps, h) - _one_step_quotient(ps, 2 * h)
    else:
        raise ValueError(f"unknown scheme {scheme!r}")
    tau = ps.tau_exact()
    return GeneratorEstimate(tau_hat, tau, linalg.spectral_norm(tau_hat - tau), h)


def oracle_semigroup(tau, t: float, a) -> np.ndarray:
    """``exp(t tau)(a)`` for a bounded generator given as a superoperator."""
    return linalg.apply_superop(linalg.matrix_exp(t * linalg.as_matrix(tau)), a)


@dataclass(frozen=True)
class ConvergenceTable:
    hs: tuple
    errors: tuple
    orders: tuple
    exact: bool

    def rows(self):
        orders = (None,) + self.orders
        return list(zip(self.hs, self.errors, orders))


EXACT_TOL = 1e-12


def fitted_orders(errors) -> tuple:
    return tuple(math.log2(e0 / e1) if e0 > 0 and e1 > 0 else float("nan")
                 for e0, e1 in zip(errors, errors[1:]))


def convergence_study(gen: HPGenerator, c: MultiplierCoeff, d: MultiplierCoeff, a, t: float,
                      hs) -> ConvergenceTable:
    """Lattice ``T_t(a)`` against ``exp(t tau)(a)`` over a ladder of steps."""
    hs = tuple(float(h) for h in hs)
    a = linalg.as_matrix(a)
    n = a.shape[0]
    tau = tau_superop(psi_from_hp(gen), c, d)
    exact = oracle_semigroup(tau, t, a)
    errors = []
    for h in hs:
        N = round(t / h)
        if N < 1 or abs(N * h - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"t={t} is not a multiple of h={h}")
        ps = PerturbedSemigroup.build(gen, LatticeParams(n, gen.d, N, h), c, d)
        errors.append(linalg.spectral_norm(semigroup_element(ps, a, N) - exact))
    is_exact = all(e <= EXACT_TOL for e in errors)
    orders = tuple(float("nan") for _ in errors[1:]) if is_exact else fitted_orders(errors)
    return ConvergenceTable(hs, tuple(errors), orders, is_exact)


def contractivity_report(ps: PerturbedSemigroup, t_idx: int, samples: int,
                         rng: np.random.Generator) -> dict:
    """Observed ``||T_t(x)|| / ||x||`` over random ``x`` and ``||T_t(I)||``."""
    S = semigroup_superop(ps, t_idx)
    n = ps.params.n
    ratios = []
    for _ in range(samples):
        x = linalg.random_matrix(rng, n)
        ratios.append(linalg.spectral_norm(linalg.apply_superop(S, x)) / linalg.spectral_norm(x))
    return {"max_ratio": max(ratios),
            "norm_of_unit": linalg.spectral_norm(linalg.apply_superop(S, np.eye(n)))}
