"""Vacuum-adapted stochastic integrals of step integrands on the lattice.

An integrand is a block operator ``G_i`` per slice, read through the slice-``i``
letter: block ``(alpha, beta)`` sends letter ``beta`` to letter ``alpha``.
The increment is

    dZ_i = P_{i+1} S_i G_i S_i P_{i+1},

where ``S_i`` multiplies the slice-``i`` vacuum letter by ``sqrt(h)``. This
gives the time block weight ``h``, creation and annihilation ``sqrt(h)`` and
gauge 1. Blocks may be lattice operators acting on the initial space and the
slices below ``i``, which is how running integrals enter product integrands.

For the product of two integrals, the lattice identity is

    Z_t Z'_t = sum_i dZ_i Z'_i + Z_i dZ'_i + dZ_i dZ'_i,

and the last term equals the gauge contraction ``G Delta G'`` plus
``h G Delta^perp G'``. The continuous Ito table drops the second piece, so the
continuous product integrand reproduces ``Z Z'`` up to ``O(h)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from . import linalg
from .lattice import (LatticeParams, StateVector, apply_local, lower, random_state, raise_letter,
                      scale_vacuum_letter, vacuum_projection, zeros)
from .structure import blocks

SliceAction = Callable[[int, StateVector], StateVector]
Operator = Callable[[StateVector], StateVector]


@dataclass(frozen=True)
class BlockIntegrand:
    """Step integrand on a lattice.

    ``action(i, v)`` applies ``G_i`` (unscaled, on slice ``i``). ``matrices``
    holds the per-slice ``(1+d)n`` block matrices when the blocks are
    initial-space constants; only then are component norms available.
    """

    params: LatticeParams
    action: SliceAction
    matrices: tuple | None = None

    @classmethod
    def from_matrices(cls, params: LatticeParams, mats) -> "BlockIntegrand":
        """One matrix (constant in time) or a sequence of ``N`` matrices."""
        size = (1 + params.d) * params.n
        mats = np.asarray(mats, dtype=complex)
        if mats.shape == (size, size):
            mats = np.broadcast_to(mats, (params.N, size, size))
        if mats.shape != (params.N, size, size):
            raise ValueError(f"need {params.N} block matrices of size {size}")
        mats = tuple(np.array(m) for m in mats)
        return cls(params, lambda i, v: apply_local(mats[i], i, v), mats)

    @classmethod
    def from_blocks(cls, params: LatticeParams, k=None, l=None, m=None, nn=None) -> "BlockIntegrand":
        """Constant integrand from ``k`` (n x n), ``l`` (dn x n), ``m`` (n x dn), ``nn`` (dn x dn)."""
        n, d = params.n, params.d
        k = np.zeros((n, n)) if k is None else k
        l = np.zeros((d * n, n)) if l is None else l
        m = np.zeros((n, d * n)) if m is None else m
        nn = np.zeros((d * n, d * n)) if nn is None else nn
        return cls.from_matrices(params, np.block([[k, m], [l, nn]]))

    @classmethod
    def zero(cls, params: LatticeParams) -> "BlockIntegrand":
        return cls.from_matrices(params, np.zeros(((1 + params.d) * params.n,) * 2))

    @property
    def has_matrices(self) -> bool:
        return self.matrices is not None

    def component_norms(self, t_idx: int) -> dict:
        """``||k||_1``, ``||l||_2``, ``||m||_2``, ``||n||_inf`` over slices ``[0, t)``."""
        if self.matrices is None:
            raise ValueError("component norms need matrix blocks")
        h, n = self.params.h, self.params.n
        parts = [blocks(g, n) for g in self.matrices[:t_idx]]
        nk = [linalg.spectral_norm(p[0]) for p in parts]
        nm = [linalg.spectral_norm(p[1]) for p in parts]
        nl = [linalg.spectral_norm(p[2]) for p in parts]
        nn = [linalg.spectral_norm(p[3]) for p in parts]
        return {"k": h * sum(nk),
                "l": math.sqrt(h * sum(x**2 for x in nl)),
                "m": math.sqrt(h * sum(x**2 for x in nm)),
                "n": max(nn, default=0.0)}

    def norm(self, t_idx: int) -> float:
        """``||G||_t``."""
        return sum(self.component_norms(t_idx).values())

    def adjoint(self) -> "BlockIntegrand":
        if self.matrices is None:
            raise ValueError("adjoint integrand needs matrix blocks")
        return BlockIntegrand.from_matrices(self.params, [g.conj().T for g in self.matrices])

    def gauge_free(self, tol: float = 0.0) -> bool:
        """``G Delta == 0``: no annihilation or gauge columns."""
        if self.matrices is None:
            raise ValueError("column test needs matrix blocks")
        n = self.params.n
        return all(np.max(np.abs(g[:, n:]), initial=0.0) <= tol for g in self.matrices)


def _check_params(*items) -> LatticeParams:
    p = items[0].params
    for it in items[1:]:
        if it.params != p:
            raise ValueError("integrands live on different lattices")
    return p


def _check_range(p: LatticeParams, t_idx: int) -> None:
    if not 0 <= t_idx <= p.N:
        raise IndexError(f"time index {t_idx} out of range for N={p.N}")


def _sandwich(i: int, v: StateVector, core: Operator) -> StateVector:
    """``P_{i+1} S_i core(S_i P_{i+1} v)``."""
    sh = math.sqrt(v.params.h)
    w = scale_vacuum_letter(i, sh, vacuum_projection(i + 1, v))
    return vacuum_projection(i + 1, scale_vacuum_letter(i, sh, core(w)))


def increment(G: BlockIntegrand, i: int, v: StateVector) -> StateVector:
    return _sandwich(i, v, lambda w: G.action(i, w))


def discrete_integral(G: BlockIntegrand, t_idx: int, v: StateVector, start: int = 0) -> StateVector:
    """``(int_s^t G dLambda) v`` as a sum of slice increments."""
    _check_range(G.params, t_idx)
    if v.params != G.params:
        raise ValueError("state and integrand live on different lattices")
    out = zeros(v.params, v.batch_shape)
    for i in range(start, t_idx):
        out = out + increment(G, i, v)
    return out


def integral_operator(G: BlockIntegrand, t_idx: int, start: int = 0) -> Operator:
    return lambda v: discrete_integral(G, t_idx, v, start)


def ampliated(i: int, op: Operator, v: StateVector) -> StateVector:
    """``(I_{k^} (x) X) v`` with ``X`` acting below slice ``i``: ``sum_a raise_a X lower_a``."""
    out = op(lower(i, 0, v))
    for a in range(1, v.params.D):
        out = out + raise_letter(i, a, op(lower(i, a, v)))
    return out


def _vacuum_column(i: int, v: StateVector) -> StateVector:
    """``Delta^perp`` on slice ``i``."""
    return raise_letter(i, 0, lower(i, 0, v))


def ito_product_integrand(G: BlockIntegrand, Gp: BlockIntegrand, lattice_exact: bool = False) -> BlockIntegrand:
    """``H = (I (x) Z) Delta^perp G' + G Delta^perp (I (x) Z') + G Delta G'``.

    ``Z``, ``Z'`` are the running integrals of ``G``, ``G'``, evaluated
    lazily at each slice. With ``lattice_exact`` the contraction uses the
    discrete table ``G (Delta + h Delta^perp) G'``, which makes
    ``int H = Z Z'`` an identity on the lattice.
    """
    p = _check_params(G, Gp)
    h = p.h

    def action(i: int, v: StateVector) -> StateVector:
        gpv = Gp.action(i, v)
        out = ampliated(i, integral_operator(G, i), _vacuum_column(i, gpv))
        zp = ampliated(i, integral_operator(Gp, i), v)
        out = out + G.action(i, _vacuum_column(i, zp))
        contraction = gpv - _vacuum_column(i, gpv)
        if lattice_exact:
            contraction = contraction + _vacuum_column(i, gpv) * h
        return out + G.action(i, contraction)

    return BlockIntegrand(p, action)


def ito_triple_integrand(G1: BlockIntegrand, G2: BlockIntegrand, G3: BlockIntegrand) -> BlockIntegrand:
    """Integrand of ``Z_1 Z_2 Z_3``: the two-factor rule applied to ``(Z_1 Z_2) Z_3``."""
    return ito_product_integrand(ito_product_integrand(G1, G2), G3)


def _random_vacuum_rooted(p: LatticeParams, t_idx: int, trials: int, rng: np.random.Generator) -> StateVector:
    v = random_state(p, rng, (trials,), vacuum_from=t_idx)
    return v * (1.0 / v.norm())[:, None]


def product_residual(factors: Sequence[BlockIntegrand], H: BlockIntegrand, t_idx: int, trials: int,
                     rng: np.random.Generator) -> float:
    """Max over random vacuum-rooted unit ``v`` of ``||Z_1 ... Z_k v - (int H) v||``."""
    p = _check_params(H, *factors)
    _check_range(p, t_idx)
    v = _random_vacuum_rooted(p, t_idx, trials, rng)
    lhs = v
    for G in reversed(factors):
        lhs = discrete_integral(G, t_idx, lhs)
    rhs = discrete_integral(H, t_idx, v)
    return float(np.max((lhs - rhs).norm()))


def _on_lattice(G: BlockIntegrand, params: LatticeParams) -> BlockIntegrand:
    if G.matrices is None:
        raise ValueError("resolution change needs matrix blocks")
    if len({m.tobytes() for m in G.matrices}) > 1:
        raise ValueError("resolution change needs constant blocks")
    return BlockIntegrand.from_matrices(params, G.matrices[0])


def ito_verify(factors: Sequence[BlockIntegrand], t: float, trials: int,
               rng: np.random.Generator) -> tuple[float, float]:
    """Product-formula residuals at the factors' step ``h`` and at ``h/2``.

    Factors must be constant matrix integrands; each run uses a lattice of
    exactly ``t/h`` slices. Two or three factors.
    """
    p = _check_params(*factors)
    if len(factors) not in (2, 3):
        raise ValueError("ito_verify handles two or three factors")
    out = []
    for h in (p.h, p.h / 2):
        N = round(t / h)
        if N < 1 or abs(N * h - t) > 1e-9 * max(1.0, t):
            raise ValueError(f"t={t} is not a multiple of h={h}")
        q = LatticeParams(p.n, p.d, N, h)
        fs = [_on_lattice(G, q) for G in factors]
        H = ito_product_integrand(*fs) if len(fs) == 2 else ito_triple_integrand(*fs)
        out.append(product_residual(fs, H, N, trials, rng))
    return out[0], out[1]


def inside_integral_check(G: BlockIntegrand, X: Operator, s_idx: int, t_idx: int, trials: int,
                          rng: np.random.Generator) -> float:
    """``||(int_s^t G) X v - (int_s^t G (I (x) X)) v||`` for ``G Delta == 0``.

    ``X`` must be vacuum adapted at ``s``: ``X = P_s X P_s``, acting below slice ``s``.
    """
    p = G.params
    if not G.gauge_free():
        raise ValueError("G Delta must vanish: no annihilation or gauge columns")
    if not 0 <= s_idx <= t_idx <= p.N:
        raise IndexError("need 0 <= s <= t <= N")
    GX = BlockIntegrand(p, lambda i, v: G.action(i, ampliated(i, X, v)))
    v = random_state(p, rng, (trials,))
    v = v * (1.0 / v.norm())[:, None]
    lhs = discrete_integral(G, t_idx, X(v), start=s_idx)
    rhs = discrete_integral(GX, t_idx, v, start=s_idx)
    return float(np.max((lhs - rhs).norm()))


def adjoint_residual(G: BlockIntegrand, t_idx: int, trials: int, rng: np.random.Generator) -> float:
    """``max |<Z u, v> - <u, Z^dagger v>|`` with ``Z^dagger = int G^dagger``."""
    p = G.params
    u = random_state(p, rng, (trials,))
    v = random_state(p, rng, (trials,))
    lhs = discrete_integral(G, t_idx, u).inner(v)
    rhs = u.inner(discrete_integral(G.adjoint(), t_idx, v))
    return float(np.max(np.abs(lhs - rhs)))


def norm_estimate_check(G: BlockIntegrand, t_idx: int, trials: int,
                        rng: np.random.Generator) -> tuple[float, float]:
    """``(max ||(int G) v||, ||G||_t)`` over random unit ``v``."""
    p = G.params
    v = random_state(p, rng, (trials,))
    v = v * (1.0 / v.norm())[:, None]
    observed = float(np.max(discrete_integral(G, t_idx, v).norm()))
    return observed, G.norm(t_idx)


def positivity_check(G: BlockIntegrand, t_idx: int, trials: int, rng: np.random.Generator) -> float:
    """Smallest ``<v, (int H) v>`` for ``H`` the lattice-exact product integrand of ``G^dagger, G``."""
    H = ito_product_integrand(G.adjoint(), G, lattice_exact=True)
    v = random_state(G.params, rng, (trials,))
    v = v * (1.0 / v.norm())[:, None]
    vals = v.inner(discrete_integral(H, t_idx, v))
    return float(np.min(vals.real))


def exponential_matrix_element(G: BlockIntegrand, t_idx: int, u, f, v, g) -> complex:
    """``h sum_i <eps(f_{<i}), eps(g_{<i})> <u, fhat_i* G_i ghat_i v>`` for matrix blocks.

    ``f``, ``g`` have shape ``(N, d)``; ``fhat = (1; f)``. This is the
    Riemann sum of the exponential-vector formula and agrees with
    ``<u eps(f), (int G) v eps(g)>`` exactly on the lattice.
    """
    if G.matrices is None:
        raise ValueError("matrix elements need matrix blocks")
    p = G.params
    n, h = p.n, p.h
    f = np.asarray(f, dtype=complex).reshape(p.N, p.d)
    g = np.asarray(g, dtype=complex).reshape(p.N, p.d)
    u = np.asarray(u, dtype=complex)
    v = np.asarray(v, dtype=complex)
    total = 0j
    overlap = 1.0 + 0j
    for i in range(t_idx):
        fh = np.kron(np.concatenate(([1.0], f[i])), np.eye(n))
        gh = np.kron(np.concatenate(([1.0], g[i])), np.eye(n))
        core = fh.conj() @ G.matrices[i] @ gh.T
        total += h * overlap * (u.conj() @ core @ v)
        overlap *= 1.0 + h * np.vdot(f[i], g[i])
    return total
