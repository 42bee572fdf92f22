"""Repeated-interaction model of Boson Fock space.

The noise is chopped into ``N`` slices of length ``h``. Each slice carries a
copy of ``C^(1+d)``: letter 0 is the vacuum, letter ``k >= 1`` one particle of
colour ``k``. A state lives on ``C^n (x) (C^(1+d))^(x N)`` and is stored flat
with the initial-space index slowest and slice 0 fastest, i.e.

    flat = p * D**N + sum_i w_i * D**i,        D = 1 + d.

Amplitude arrays may carry leading batch axes; every operation here acts on
the last axis only. Batches are how several initial vectors, or the spectator
slices of a shifted operator, are pushed through one call.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

MAX_AMPLITUDES = 2**26


@dataclass(frozen=True)
class LatticeParams:
    n: int
    d: int
    N: int
    h: float

    def __post_init__(self):
        if self.n < 1:
            raise ValueError(f"initial dimension n must be positive, got {self.n}")
        if self.d < 1:
            raise ValueError(f"multiplicity d must be positive, got {self.d}")
        if self.N < 0:
            raise ValueError(f"slice count N must be non-negative, got {self.N}")
        if not self.h > 0:
            raise ValueError(f"time step h must be positive, got {self.h}")
        if self.dim > MAX_AMPLITUDES:
            raise MemoryError(
                f"lattice needs n*(1+d)**N = {self.dim} amplitudes; budget is {MAX_AMPLITUDES}"
            )

    @property
    def D(self) -> int:
        return 1 + self.d

    @property
    def noise_dim(self) -> int:
        return self.D**self.N

    @property
    def dim(self) -> int:
        return self.n * self.D**self.N

    @property
    def T(self) -> float:
        return self.N * self.h

    def with_slices(self, N: int) -> "LatticeParams":
        return LatticeParams(self.n, self.d, N, self.h)

    def with_step(self, h: float) -> "LatticeParams":
        return LatticeParams(self.n, self.d, self.N, h)

    def index(self, p: int, word) -> int:
        """Flat index of ``(p, word)``; ``word[i]`` is the letter in slice ``i``."""
        if len(word) != self.N:
            raise ValueError("word length must equal the slice count")
        return p * self.noise_dim + sum(int(w) * self.D**i for i, w in enumerate(word))

    def unindex(self, idx: int) -> tuple[int, tuple[int, ...]]:
        p, rest = divmod(int(idx), self.noise_dim)
        word = []
        for _ in range(self.N):
            rest, w = divmod(rest, self.D)
            word.append(w)
        return p, tuple(word)


@dataclass(frozen=True)
class StateVector:
    params: LatticeParams
    amplitudes: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=complex)
        if amps.ndim == 0 or amps.shape[-1] != self.params.dim:
            raise ValueError(
                f"amplitude array of shape {amps.shape} does not match dimension {self.params.dim}"
            )
        object.__setattr__(self, "amplitudes", amps)

    @property
    def batch_shape(self) -> tuple[int, ...]:
        return self.amplitudes.shape[:-1]

    def _like(self, amps) -> "StateVector":
        return StateVector(self.params, amps)

    def __add__(self, other: "StateVector") -> "StateVector":
        _check_same(self, other)
        return self._like(self.amplitudes + other.amplitudes)

    def __sub__(self, other: "StateVector") -> "StateVector":
        _check_same(self, other)
        return self._like(self.amplitudes - other.amplitudes)

    def __mul__(self, scalar) -> "StateVector":
        return self._like(self.amplitudes * scalar)

    __rmul__ = __mul__

    def __neg__(self) -> "StateVector":
        return self._like(-self.amplitudes)

    def norm(self):
        return np.linalg.norm(self.amplitudes, axis=-1)

    def inner(self, other: "StateVector"):
        """``<self, other>``, conjugate-linear in ``self``; batched."""
        _check_same(self, other)
        return np.sum(self.amplitudes.conj() * other.amplitudes, axis=-1)


Operator = Callable[[StateVector], StateVector]


def _check_same(u: StateVector, v: StateVector) -> None:
    if u.params != v.params:
        raise ValueError("state vectors live on different lattices")


def zeros(params: LatticeParams, batch: tuple[int, ...] = ()) -> StateVector:
    return StateVector(params, np.zeros(batch + (params.dim,), dtype=complex))


def _check_slice(params: LatticeParams, i: int) -> None:
    if not 0 <= i < params.N:
        raise IndexError(f"slice {i} out of range for N={params.N}")


def _slice_view(v: StateVector, i: int) -> np.ndarray:
    """Reshape to ``(B, n, D**(N-i-1), D, D**i)`` exposing slice ``i``."""
    p = v.params
    return v.amplitudes.reshape(-1, p.n, p.D ** (p.N - i - 1), p.D, p.D**i)


def _from_view(v: StateVector, arr: np.ndarray) -> StateVector:
    return v._like(arr.reshape(v.amplitudes.shape))


def vacuum_vector(params: LatticeParams, u) -> StateVector:
    """``u (x) Omega``; ``u`` of shape ``(..., n)`` gives a batch."""
    u = np.asarray(u, dtype=complex)
    if u.shape[-1] != params.n:
        raise ValueError(f"initial vector must have length {params.n}")
    amps = np.zeros(u.shape[:-1] + (params.n, params.noise_dim), dtype=complex)
    amps[..., 0] = u
    return StateVector(params, amps.reshape(u.shape[:-1] + (params.dim,)))


def product_vector(params: LatticeParams, u, noise) -> StateVector:
    """``u (x) noise`` for a noise factor of length ``D**N``."""
    u = np.asarray(u, dtype=complex)
    noise = np.asarray(noise, dtype=complex)
    if noise.shape != (params.noise_dim,):
        raise ValueError("noise factor has the wrong length")
    amps = u[..., :, None] * noise
    return StateVector(params, amps.reshape(u.shape[:-1] + (params.dim,)))


def random_state(params: LatticeParams, rng: np.random.Generator,
                 batch: tuple[int, ...] = (), vacuum_from: int | None = None) -> StateVector:
    """Gaussian random state; with ``vacuum_from=t`` it is projected by ``P_t``."""
    shape = batch + (params.dim,)
    v = StateVector(params, rng.standard_normal(shape) + 1j * rng.standard_normal(shape))
    if vacuum_from is not None:
        v = vacuum_projection(vacuum_from, v)
    return v


def vacuum_projection(i: int, v: StateVector) -> StateVector:
    """``P_i``: keep only words whose slices ``i, ..., N-1`` are all vacuum."""
    p = v.params
    if not 0 <= i <= p.N:
        raise IndexError(f"projection index {i} out of range for N={p.N}")
    arr = v.amplitudes.reshape(-1, p.n, p.D ** (p.N - i), p.D**i)
    out = np.zeros_like(arr)
    out[:, :, 0, :] = arr[:, :, 0, :]
    return _from_view(v, out)


@dataclass(frozen=True)
class SliceOperatorKind:
    """Fundamental slice operator: creation, annihilation, gauge or time."""

    kind: str
    color: int = 0
    color_in: int = 0

    @classmethod
    def create(cls, k: int) -> "SliceOperatorKind":
        return cls("create", k)

    @classmethod
    def annihilate(cls, k: int) -> "SliceOperatorKind":
        return cls("annihilate", k)

    @classmethod
    def gauge(cls, k_out: int, k_in: int) -> "SliceOperatorKind":
        return cls("gauge", k_out, k_in)

    @classmethod
    def time(cls) -> "SliceOperatorKind":
        return cls("time")


def _move_letter(v: StateVector, i: int, src: int, dst: int, factor) -> StateVector:
    view = _slice_view(v, i)
    out = np.zeros_like(view)
    out[:, :, :, dst, :] = factor * view[:, :, :, src, :]
    return _from_view(v, out)


def apply_slice(kind: SliceOperatorKind, i: int, v: StateVector) -> StateVector:
    """Apply a fundamental slice operator with Ito scalings ``sqrt(h)``, ``sqrt(h)``, 1, ``h``."""
    p = v.params
    _check_slice(p, i)
    if kind.kind == "time":
        return v * p.h
    colors = [kind.color] if kind.kind != "gauge" else [kind.color, kind.color_in]
    for k in colors:
        if not 1 <= k <= p.d:
            raise ValueError(f"colour {k} outside 1..{p.d}")
    if kind.kind == "create":
        return _move_letter(v, i, 0, kind.color, math.sqrt(p.h))
    if kind.kind == "annihilate":
        return _move_letter(v, i, kind.color, 0, math.sqrt(p.h))
    if kind.kind == "gauge":
        return _move_letter(v, i, kind.color_in, kind.color, 1.0)
    raise ValueError(f"unknown slice operator {kind.kind!r}")


def create(i: int, k: int, v: StateVector) -> StateVector:
    return apply_slice(SliceOperatorKind.create(k), i, v)


def annihilate(i: int, k: int, v: StateVector) -> StateVector:
    return apply_slice(SliceOperatorKind.annihilate(k), i, v)


def lower(i: int, letter: int, v: StateVector) -> StateVector:
    """Keep the slice-``i`` letter ``letter`` component, relabelled as vacuum."""
    _check_slice(v.params, i)
    return _move_letter(v, i, letter, 0, 1.0)


def raise_letter(i: int, letter: int, v: StateVector) -> StateVector:
    """Put the slice-``i`` vacuum component into letter ``letter``."""
    _check_slice(v.params, i)
    return _move_letter(v, i, 0, letter, 1.0)


def scale_vacuum_letter(i: int, factor: float, v: StateVector) -> StateVector:
    """Multiply the slice-``i`` vacuum component by ``factor``."""
    _check_slice(v.params, i)
    view = _slice_view(v, i).copy()
    view[:, :, :, 0, :] *= factor
    return _from_view(v, view)


def apply_initial(a, v: StateVector) -> StateVector:
    """``a (x) I``."""
    p = v.params
    a = np.asarray(a, dtype=complex)
    if a.shape != (p.n, p.n):
        raise ValueError(f"initial-space operator must be {p.n}x{p.n}")
    arr = v.amplitudes.reshape(-1, p.n, p.noise_dim)
    return _from_view(v, np.einsum("uv,bvr->bur", a, arr))


def apply_local(g, i: int, v: StateVector) -> StateVector:
    """Apply a ``(1+d)n`` square matrix to slice ``i`` (x) initial space.

    Rows and columns of ``g`` are ordered letter-major: index ``alpha*n + p``.
    """
    p = v.params
    _check_slice(p, i)
    g = np.asarray(g, dtype=complex)
    if g.shape != (p.D * p.n, p.D * p.n):
        raise ValueError(f"local operator must be {(p.D * p.n,) * 2}, got {g.shape}")
    g4 = g.reshape(p.D, p.n, p.D, p.n)
    out = np.einsum("aubv,zvxbw->zuxaw", g4, _slice_view(v, i), optimize=True)
    return _from_view(v, out)


def discrete_exponential(params: LatticeParams, f) -> np.ndarray:
    """Noise factor ``(x)_i (1, sqrt(h) f_1(i), ..., sqrt(h) f_d(i))``.

    ``f`` has shape ``(N, d)``; the result has length ``D**N`` in the
    package's slice-0-fastest ordering.
    """
    f = np.asarray(f, dtype=complex).reshape(params.N, params.d)
    out = np.ones(1, dtype=complex)
    sh = math.sqrt(params.h)
    for i in range(params.N):
        local = np.concatenate(([1.0 + 0j], sh * f[i]))
        out = np.kron(local, out)
    return out


def shift_slices(s: int, v: StateVector) -> StateVector:
    """Second-quantised right shift by ``s`` slices.

    Slice ``i`` content moves to slice ``i + s`` and the first ``s`` slices
    become vacuum. Content in the last ``s`` slices would leave the lattice
    and is rejected.
    """
    p = v.params
    if not 0 <= s <= p.N:
        raise IndexError(f"shift {s} out of range for N={p.N}")
    if s == 0:
        return v
    arr = v.amplitudes.reshape(-1, p.n, p.D**s, p.D ** (p.N - s))
    if np.any(arr[:, :, 1:, :] != 0):
        raise ValueError("state has non-vacuum content in the last slices; cannot shift")
    out = np.zeros_like(arr)
    # word (w_0..w_{N-1}) -> (0^s, w_0..w_{N-s-1}): low index block moves up by D**s
    low = arr[:, :, 0, :].reshape(-1, p.n, p.D ** (p.N - s))
    out = out.reshape(-1, p.n, p.D ** (p.N - s), p.D**s)
    out[:, :, :, 0] = low
    return _from_view(v, out)


def split_past(s: int, v: StateVector) -> StateVector:
    """View slices ``[s, N)`` as a lattice of ``N - s`` slices.

    The words on slices ``[0, s)`` become a new leading batch axis of length
    ``D**s``, appended after the existing batch axes.
    """
    p = v.params
    if not 0 <= s <= p.N:
        raise IndexError(f"split index {s} out of range for N={p.N}")
    sub = p.with_slices(p.N - s)
    arr = v.amplitudes.reshape(v.batch_shape + (p.n, sub.noise_dim, p.D**s))
    arr = np.moveaxis(arr, -1, -3)
    return StateVector(sub, arr.reshape(v.batch_shape + (p.D**s, sub.dim)))


def merge_past(s: int, sub: StateVector, params: LatticeParams) -> StateVector:
    """Inverse of :func:`split_past`."""
    batch = sub.batch_shape[:-1]
    arr = sub.amplitudes.reshape(batch + (params.D**s, params.n, sub.params.noise_dim))
    arr = np.moveaxis(arr, -3, -1)
    return StateVector(params, arr.reshape(batch + (params.dim,)))


def conditional_expectation(i: int, u: StateVector, w: StateVector, op: Operator):
    """``<u, P_i op(P_i w)>``."""
    return u.inner(vacuum_projection(i, op(vacuum_projection(i, w))))
