"""Multiplier processes driven by a flow.

For a column ``c = (c_0; c_1..c_d)`` the multiplier solves, slice by slice,

    M_{i+1} = M_i + h j_i(c_0) P_i M_i + sqrt(h) sum_k A+_k(i) j_i(c_k) P_i M_i,

starting from ``M_0 = I``. Only the time and creation components appear, so
``M - I`` is vacuum adapted by construction. Operators are never
materialised; everything is applied to (batched) state vectors.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterator

import numpy as np

from . import linalg
from .flow import Direction, FlowHandle, apply_unitary_cocycle, shifted_operator_apply
from .lattice import (StateVector, apply_initial, apply_local, create, random_state,
                      vacuum_projection, vacuum_vector, zeros)
from .structure import MultiplierCoeff


@dataclass(frozen=True)
class MultiplierProcess:
    coeff: MultiplierCoeff
    flow: FlowHandle

    def __post_init__(self):
        if (self.coeff.n, self.coeff.d) != (self.flow.params.n, self.flow.params.d):
            raise ValueError("coefficient dimensions do not match the flow")


def _check_range(v: StateVector, t_idx: int) -> None:
    if not 0 <= t_idx <= v.params.N:
        raise IndexError(f"time index {t_idx} out of range for N={v.params.N}")


def increment(mp: MultiplierProcess, i: int, v: StateVector) -> StateVector:
    """``h j_i(c_0) P_i v + sqrt(h) sum_k A+_k(i) j_i(c_k) P_i v``."""
    h = v.params.h
    w = apply_unitary_cocycle(mp.flow, i, vacuum_projection(i, v))
    out = apply_unitary_cocycle(mp.flow, i, apply_initial(mp.coeff.c0, w), Direction.ADJOINT) * h
    for k, ck in enumerate(mp.coeff.ck, start=1):
        jc = apply_unitary_cocycle(mp.flow, i, apply_initial(ck, w), Direction.ADJOINT)
        out = out + create(i, k, jc)
    return out


def multiplier_apply(mp: MultiplierProcess, t_idx: int, v: StateVector) -> StateVector:
    """``M_t v`` by the left-point recursion (defined for every ``v``)."""
    _check_range(v, t_idx)
    for i in range(t_idx):
        v = v + increment(mp, i, v)
    return v


def dressed_multiplier(mp: MultiplierProcess, t_max: int, v: StateVector) -> Iterator[StateVector]:
    """Yield ``U_t M_t v`` for ``t = 0..t_max`` in a single forward sweep.

    Since ``U_i`` acts on slices below ``i``, it commutes with ``P_i`` and
    with creation in slice ``i``, and ``U_i j_i(c) = (c (x) I) U_i``. Hence
    ``w_{i+1} = G^(i) (w_i + h c_0 P_i w_i + sqrt(h) sum_k A+_k(i) c_k P_i w_i)``
    costs one slice operation per step instead of ``O(i)``.
    """
    _check_range(v, t_max)
    G = mp.flow.cocycle.one_step
    h = v.params.h
    w = v
    yield w
    for i in range(t_max):
        pw = vacuum_projection(i, w)
        nxt = w + apply_initial(mp.coeff.c0, pw) * h
        for k, ck in enumerate(mp.coeff.ck, start=1):
            nxt = nxt + create(i, k, apply_initial(ck, pw))
        w = apply_local(G, i, nxt)
        yield w


def picard_terms(mp: MultiplierProcess, t_idx: int, v: StateVector, n_iter: int) -> list[StateVector]:
    """Iterated integrals ``[X^(0)_t v, ..., X^(n_iter)_t v]``.

    ``X^(0)_t = sum_{i<t} inc_i`` and ``X^(m+1)_t v = sum_{i<t} inc_i(X^(m)_i v)``.
    """
    _check_range(v, t_idx)
    if n_iter < 0:
        raise ValueError("n_iter must be non-negative")
    # prev[i] = X^(m)_i v for i = 0..t_idx
    prev = [v] * (t_idx + 1)
    terms = []
    for m in range(n_iter + 1):
        cur = [zeros(v.params, v.batch_shape)]
        acc = cur[0]
        for i in range(t_idx):
            acc = acc + increment(mp, i, prev[i])
            cur.append(acc)
        terms.append(cur[t_idx])
        prev = cur
    return terms


def picard_apply(mp: MultiplierProcess, t_idx: int, v: StateVector, n_iter: int) -> StateVector:
    """Partial Picard sum; tends to ``(M_t - I) v``."""
    terms = picard_terms(mp, t_idx, v, n_iter)
    out = terms[0]
    for term in terms[1:]:
        out = out + term
    return out


def multiplier_cocycle_check(mp: MultiplierProcess, s_idx: int, t_idx: int, trials: int,
                             rng: np.random.Generator) -> float:
    """Max over random ``u`` of ``||M_{s+t} u Omega - J_s(M_t) M_s u Omega||``.

    The right-hand side runs the recursion for ``M_t`` on the lattice of
    slices ``[s, N)`` seen through ``J_s``, independently of ``M_{s+t}``.
    """
    params = mp.flow.params
    if s_idx < 0 or t_idx < 0 or s_idx + t_idx > params.N:
        raise IndexError("s + t exceeds the lattice horizon")
    u = rng.standard_normal((trials, params.n)) + 1j * rng.standard_normal((trials, params.n))
    u /= np.linalg.norm(u, axis=1, keepdims=True)
    v = vacuum_vector(params, u)
    lhs = multiplier_apply(mp, s_idx + t_idx, v)
    ms = multiplier_apply(mp, s_idx, v)
    rhs = shifted_operator_apply(mp.flow, s_idx, lambda sub: multiplier_apply(mp, t_idx, sub), ms)
    return float(np.max((lhs - rhs).norm()))


def norm_bound(coeff: MultiplierCoeff, t: float) -> float:
    """``sqrt(2) ||X||_{inf,t} exp(2 ||l||_{2,t}^2 + 2 ||k||_{1,t}^2)`` with constant
    ``k = ||c_0||``, ``l = (sum_k ||c_k||^2)^(1/2)`` and
    ``||X||_{inf,t} <= t k + sqrt(t) l``; flow homomorphisms are contractive."""
    k = linalg.spectral_norm(coeff.c0)
    l = math.sqrt(sum(linalg.spectral_norm(c) ** 2 for c in coeff.ck))
    x_norm = t * k + math.sqrt(t) * l
    return math.sqrt(2) * x_norm * math.exp(2 * t * l**2 + 2 * (t * k) ** 2)


def norm_bound_check(mp: MultiplierProcess, t_idx: int, trials: int,
                     rng: np.random.Generator) -> tuple[float, float]:
    """``(observed, bound)`` with ``observed = max ||(M_t - I) v|| / ||v||``
    over random ``v`` that are vacuum from slice ``t`` on."""
    params = mp.flow.params
    v = random_state(params, rng, (trials,), vacuum_from=t_idx)
    diff = multiplier_apply(mp, t_idx, v) - v
    observed = float(np.max(diff.norm() / v.norm()))
    return observed, norm_bound(mp.coeff, t_idx * params.h)


def continuity_constant(coeff: MultiplierCoeff, T: float, h: float) -> float:
    """Bound on ``||(M_{t+h} - M_t) v|| / (sqrt(h) ||v||)`` for ``t + h <= T``."""
    k = linalg.spectral_norm(coeff.c0)
    l = math.sqrt(sum(linalg.spectral_norm(c) ** 2 for c in coeff.ck))
    growth = math.exp(T * k + 0.5 * T * l**2)
    return (math.sqrt(h) * k + l) * growth
