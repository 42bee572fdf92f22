"""Discrete quantum stochastic flows as repeated-interaction unitary cocycles.

Slice ``i`` interacts with the initial space once, through the one-step
unitary ``G_h``. The cocycle is ``U_t = G^(t-1) ... G^(0)`` (slice 0 acts
first) and the flow is the conjugation

    j_t(a) = U_t* (a (x) I) U_t                      (identity adapted)
    j_t(a) = P_t U_t* (a (x) I) U_t P_t              (vacuum adapted)

``G_h = exp(Y_h) (I (+) W)`` with ``Y_h = [[-i h H, -sqrt(h) L*], [sqrt(h) L, 0]]``.
Placing ``W`` to the right of the exponential makes the one-step
conjugation reproduce the structure map with ``r = -W* L`` and
``pi = W* (I (x) .) W`` exactly at the block level, and the parity of
``sqrt(h)`` powers in the blocks makes the one-step error ``O(h**2)``.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .lattice import (LatticeParams, Operator, StateVector, apply_initial, apply_local,
                      merge_past, random_state, split_past, vacuum_projection, vacuum_vector)
from .structure import HPGenerator


class Adaptedness(enum.Enum):
    IDENTITY = "identity"
    VACUUM = "vacuum"


class Direction(enum.Enum):
    FORWARD = "forward"
    ADJOINT = "adjoint"


def build_one_step(gen: HPGenerator, h: float) -> np.ndarray:
    if not h > 0:
        raise ValueError(f"time step must be positive, got {h}")
    n, d = gen.n, gen.d
    L = gen.L_blk
    sh = math.sqrt(h)
    Y = np.block([[-1j * h * gen.H, -sh * L.conj().T],
                  [sh * L, np.zeros((d * n, d * n))]])
    gauge = linalg.block_diag(np.eye(n), gen.W)
    G = linalg.matrix_exp(Y) @ gauge
    return linalg.unitary(G)


@dataclass(frozen=True)
class DiscreteCocycle:
    gen: HPGenerator
    params: LatticeParams
    one_step: np.ndarray = field(init=False, repr=False)

    def __post_init__(self):
        if (self.params.n, self.params.d) != (self.gen.n, self.gen.d):
            raise ValueError("lattice dimensions do not match the generator")
        object.__setattr__(self, "one_step", build_one_step(self.gen, self.params.h))


@dataclass(frozen=True)
class FlowHandle:
    cocycle: DiscreteCocycle
    adaptedness: Adaptedness = Adaptedness.IDENTITY

    @property
    def params(self) -> LatticeParams:
        return self.cocycle.params

    @property
    def gen(self) -> HPGenerator:
        return self.cocycle.gen

    def with_adaptedness(self, adaptedness: Adaptedness) -> "FlowHandle":
        return FlowHandle(self.cocycle, adaptedness)

    @classmethod
    def build(cls, gen: HPGenerator, params: LatticeParams,
              adaptedness: Adaptedness = Adaptedness.IDENTITY) -> "FlowHandle":
        return cls(DiscreteCocycle(gen, params), adaptedness)


def _check_lattice(fh: FlowHandle, v: StateVector, t_idx: int) -> None:
    p, q = fh.params, v.params
    if (p.n, p.d, p.h) != (q.n, q.d, q.h):
        raise ValueError("state lattice is incompatible with the flow")
    if not 0 <= t_idx <= q.N:
        raise IndexError(f"time index {t_idx} out of range for N={q.N}")


def apply_unitary_cocycle(fh: FlowHandle, t_idx: int, v: StateVector,
                          direction: Direction = Direction.FORWARD, start: int = 0) -> StateVector:
    """``U_t v`` (or ``U_t* v``), optionally only over slices ``[start, t_idx)``."""
    _check_lattice(fh, v, t_idx)
    G = fh.cocycle.one_step
    if direction is Direction.FORWARD:
        for i in range(start, t_idx):
            v = apply_local(G, i, v)
    else:
        Gs = G.conj().T
        for i in reversed(range(start, t_idx)):
            v = apply_local(Gs, i, v)
    return v


def flow_apply(fh: FlowHandle, a, t_idx: int, v: StateVector) -> StateVector:
    _check_lattice(fh, v, t_idx)
    vacuum = fh.adaptedness is Adaptedness.VACUUM
    if vacuum:
        v = vacuum_projection(t_idx, v)
    w = apply_unitary_cocycle(fh, t_idx, v)
    w = apply_initial(a, w)
    w = apply_unitary_cocycle(fh, t_idx, w, Direction.ADJOINT)
    if vacuum:
        w = vacuum_projection(t_idx, w)
    return w


def flow_operator(fh: FlowHandle, a, t_idx: int) -> Operator:
    return lambda v: flow_apply(fh, a, t_idx, v)


def flow_homomorphism_check(fh: FlowHandle, a, b, t_idx: int, trials: int,
                            rng: np.random.Generator) -> float:
    """Max of ``||j_t(ab) v - j_t(a) j_t(b) v||`` over random unit vectors."""
    v = random_state(fh.params, rng, (trials,))
    v = v * (1.0 / v.norm())[:, None]
    lhs = flow_apply(fh, a @ b, t_idx, v)
    rhs = flow_apply(fh, a, t_idx, flow_apply(fh, b, t_idx, v))
    return float(np.max((lhs - rhs).norm()))


def vacuum_semigroup_element(fh: FlowHandle, a, t_idx: int) -> np.ndarray:
    """Matrix ``[<e_p Omega, j_t(a) e_q Omega>]_{pq}``."""
    p = fh.params.with_slices(max(t_idx, 0))
    basis = vacuum_vector(p, np.eye(p.n))
    return _matrix_elements(basis, flow_apply(fh, a, t_idx, basis))


def _matrix_elements(left: StateVector, right: StateVector) -> np.ndarray:
    """``M[p, q] = <left_p, right_q>`` for batched vectors."""
    return left.amplitudes.conj() @ right.amplitudes.T


def vacuum_semigroup_superops(fh: FlowHandle, t_max: int) -> list[np.ndarray]:
    """Superoperators of ``E j_t`` for ``t = 0, ..., t_max`` in one forward sweep."""
    p = fh.params.with_slices(t_max)
    n = p.n
    w = vacuum_vector(p, np.eye(n))
    out = []
    for t in range(t_max + 1):
        if t:
            w = apply_local(fh.cocycle.one_step, t - 1, w)
        amps = w.amplitudes.reshape(n, n, p.noise_dim)
        # T_t(a)_{pq} = sum_{u,v,r} conj(w_p[u,r]) a[u,v] w_q[v,r]
        out.append(linalg.superop_from_map(
            lambda a: np.einsum("pur,uv,qvr->pq", amps.conj(), a, amps), n))
    return out


def shifted_operator_apply(fh: FlowHandle, s_idx: int, op: Operator, v: StateVector) -> StateVector:
    """``J_s(op) v = U_s* sigma_s(op) U_s v``.

    ``op`` acts on a lattice of ``N - s`` slices; ``sigma_s`` places it on
    slices ``[s, N)`` with slices ``[0, s)`` as spectators.
    """
    _check_lattice(fh, v, s_idx)
    w = apply_unitary_cocycle(fh, s_idx, v)
    sub = split_past(s_idx, w)
    w = merge_past(s_idx, op(sub), v.params)
    return apply_unitary_cocycle(fh, s_idx, w, Direction.ADJOINT)
