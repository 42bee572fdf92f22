"""Block-matrix calculus on ``k^ (x) C^n`` with ``k^ = C (+) C^d``.

Block matrices are ``(1+d)n`` square and ordered letter-major: the row index
``alpha*n + p`` pairs a letter ``alpha`` of ``k^`` (0 is the vacuum
direction) with an initial-space index ``p``. Columns in ``|k^> (x) M_n`` are
``(1+d)n x n`` stacks ``(c_0; c_1; ...; c_d)``.

A flow is parametrised by ``(H, L, W)``: a Hermitian ``H``, a column ``L`` of
``d`` matrices and a unitary ``W`` on ``C^d (x) C^n``. The identity-adapted
structure map is

    phi(x) = F* i(x) + i(x) F + F* Delta i(x) Delta F,
    F = [[-iH - L*L/2, -L* W], [L, W - I]],     i(x) = I (x) x,

which has the standard block form with ``r = -W* L`` and
``pi(x) = W* (I_d (x) x) W``. The vacuum-adapted map is
``psi(x) = phi(x) + Delta (x) x``.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import linalg

COCYCLE_TOL = 1e-10


def delta_projection(n: int, d: int) -> np.ndarray:
    """``Delta``: projection onto the particle letters, amplified to ``C^n``."""
    return np.kron(np.diag([0.0] + [1.0] * d), np.eye(n)).astype(complex)


def vacuum_projection_block(n: int, d: int) -> np.ndarray:
    """``Delta^perp``."""
    return np.eye((1 + d) * n, dtype=complex) - delta_projection(n, d)


def e_vac(n: int, d: int) -> np.ndarray:
    """``E_omega``: the ``(1+d)n x n`` embedding of the vacuum letter."""
    e = np.zeros(((1 + d) * n, n), dtype=complex)
    e[:n, :] = np.eye(n)
    return e


def ampliate(x, d: int) -> np.ndarray:
    """``I_{k^} (x) x``."""
    return np.kron(np.eye(1 + d), x).astype(complex)


def blocks(m: np.ndarray, n: int):
    """Split a block matrix into ``(top-left, top-right, bottom-left, bottom-right)``."""
    return m[:n, :n], m[:n, n:], m[n:, :n], m[n:, n:]


def stack_column(parts: Sequence[np.ndarray]) -> np.ndarray:
    return np.concatenate([np.asarray(p, dtype=complex) for p in parts], axis=0)


@dataclass(frozen=True)
class HPGenerator:
    """Flow data ``(H, L, W)``; ``L`` is a sequence of ``d`` matrices ``n x n``."""

    H: np.ndarray
    L: tuple
    W: np.ndarray

    def __post_init__(self):
        H = linalg.hermitian(self.H)
        n = H.shape[0]
        L = tuple(linalg.as_matrix(l) for l in self.L)
        if not L:
            raise ValueError("need at least one noise channel")
        if any(l.shape != (n, n) for l in L):
            raise ValueError("every L_k must be n x n")
        W = linalg.as_matrix(self.W)
        if W.shape != (len(L) * n,) * 2:
            raise ValueError(f"W must be {len(L) * n} square")
        linalg.unitary(W)
        object.__setattr__(self, "H", H)
        object.__setattr__(self, "L", L)
        object.__setattr__(self, "W", W)

    @property
    def n(self) -> int:
        return self.H.shape[0]

    @property
    def d(self) -> int:
        return len(self.L)

    @property
    def L_blk(self) -> np.ndarray:
        return stack_column(self.L)

    @property
    def r(self) -> np.ndarray:
        return -self.W.conj().T @ self.L_blk

    def F(self) -> np.ndarray:
        L = self.L_blk
        K = -1j * self.H - 0.5 * L.conj().T @ L
        M = -L.conj().T @ self.W
        return np.block([[K, M], [L, self.W - np.eye(self.d * self.n)]])

    def cocycle_residuals(self) -> tuple[float, float]:
        """Spectral norms of ``F + F* + F* Delta F`` and ``F + F* + F Delta F*``."""
        F = self.F()
        Delta = delta_projection(self.n, self.d)
        Fs = F.conj().T
        return (linalg.spectral_norm(F + Fs + Fs @ Delta @ F),
                linalg.spectral_norm(F + Fs + F @ Delta @ Fs))

    def pi(self, x) -> np.ndarray:
        return pi_apply(self.W, x)

    @classmethod
    def trivial(cls, n: int, d: int = 1) -> "HPGenerator":
        return cls(np.zeros((n, n)), tuple(np.zeros((n, n)) for _ in range(d)), np.eye(d * n))

    @classmethod
    def gaussian_subordination(cls, Htilde) -> "HPGenerator":
        """``d = 1``, ``H = 0``, ``W = I``, ``L = -i Htilde``: ``tau_0 = delta**2 / 2``."""
        Ht = linalg.hermitian(Htilde)
        n = Ht.shape[0]
        return cls(np.zeros((n, n)), (-1j * Ht,), np.eye(n))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, d: int = 1, scale: float = 1.0) -> "HPGenerator":
        H = scale * linalg.random_hermitian(rng, n)
        L = tuple(scale * linalg.random_matrix(rng, n) for _ in range(d))
        W = linalg.random_unitary(rng, d * n)
        return cls(H, L, W)


def pi_apply(W, x) -> np.ndarray:
    """``pi(x) = W* (I_d (x) x) W``."""
    W = linalg.as_matrix(W)
    x = linalg.as_matrix(x)
    n = x.shape[0]
    if W.shape[0] % n or W.shape[0] != W.shape[1]:
        raise ValueError("W does not match the dimension of x")
    d = W.shape[0] // n
    return W.conj().T @ np.kron(np.eye(d), x) @ W


@dataclass(frozen=True)
class StructureBlocks:
    """A block map ``x -> (1+d)n`` square, with component extractors.

    ``vacuum`` marks the vacuum-adapted form ``psi``; otherwise it is the
    identity-adapted ``phi``.
    """

    gen: HPGenerator
    vacuum: bool = False
    _delta: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_delta", delta_projection(self.gen.n, self.gen.d))

    @property
    def n(self) -> int:
        return self.gen.n

    @property
    def d(self) -> int:
        return self.gen.d

    def __call__(self, x) -> np.ndarray:
        x = linalg.as_matrix(x)
        F = self.gen.F()
        Fs = F.conj().T
        ix = ampliate(x, self.d)
        out = Fs @ ix + ix @ F + Fs @ self._delta @ ix @ self._delta @ F
        if self.vacuum:
            out = out + self._delta @ ix
        return out

    def tau0(self, x) -> np.ndarray:
        return blocks(self(x), self.n)[0]

    def delta0_dag(self, x) -> np.ndarray:
        return blocks(self(x), self.n)[1]

    def delta0(self, x) -> np.ndarray:
        return blocks(self(x), self.n)[2]

    def pi0(self, x) -> np.ndarray:
        return blocks(self(x), self.n)[3]


def phi_from_hp(gen: HPGenerator, tol: float = COCYCLE_TOL) -> StructureBlocks:
    res = gen.cocycle_residuals()
    if max(res) > tol:
        raise ValueError(f"generator violates the unitary cocycle condition: residuals {res}")
    return StructureBlocks(gen, vacuum=False)


def psi_from_phi(phi: StructureBlocks) -> StructureBlocks:
    return StructureBlocks(phi.gen, vacuum=True)


def psi_from_hp(gen: HPGenerator) -> StructureBlocks:
    return psi_from_phi(phi_from_hp(gen))


@dataclass(frozen=True)
class MultiplierCoeff:
    """Column ``c = (c_0; c_1; ...; c_d)`` of ``n x n`` matrices."""

    c0: np.ndarray
    ck: tuple

    def __post_init__(self):
        c0 = linalg.as_matrix(self.c0)
        ck = tuple(linalg.as_matrix(c) for c in self.ck)
        if c0.shape[0] != c0.shape[1] or any(c.shape != c0.shape for c in ck):
            raise ValueError("multiplier coefficients must be square and of equal size")
        if not ck:
            raise ValueError("need at least one creation coefficient")
        object.__setattr__(self, "c0", c0)
        object.__setattr__(self, "ck", ck)

    @property
    def n(self) -> int:
        return self.c0.shape[0]

    @property
    def d(self) -> int:
        return len(self.ck)

    @property
    def column(self) -> np.ndarray:
        return stack_column((self.c0,) + self.ck)

    @property
    def l_blk(self) -> np.ndarray:
        return stack_column(self.ck)

    def is_zero(self) -> bool:
        return not np.any(self.column)

    @classmethod
    def zero(cls, n: int, d: int = 1) -> "MultiplierCoeff":
        return cls(np.zeros((n, n)), tuple(np.zeros((n, n)) for _ in range(d)))

    @classmethod
    def creation(cls, b: Sequence[np.ndarray], c0=None) -> "MultiplierCoeff":
        b = tuple(linalg.as_matrix(x) for x in b)
        n = b[0].shape[0]
        return cls(np.zeros((n, n)) if c0 is None else c0, b)

    @classmethod
    def bahn_park(cls, b) -> "MultiplierCoeff":
        """``(-b**2 / 2; b)`` for Hermitian ``b``."""
        b = linalg.hermitian(b)
        return cls(-0.5 * b @ b, (b,))

    @classmethod
    def random(cls, rng: np.random.Generator, n: int, d: int = 1, scale: float = 1.0) -> "MultiplierCoeff":
        return cls(scale * linalg.random_matrix(rng, n),
                   tuple(scale * linalg.random_matrix(rng, n) for _ in range(d)))


def _check_dims(psi: StructureBlocks, *coeffs: MultiplierCoeff) -> None:
    for c in coeffs:
        if (c.n, c.d) != (psi.n, psi.d):
            raise ValueError(
                f"coefficient dimensions (n={c.n}, d={c.d}) do not match (n={psi.n}, d={psi.d})"
            )


def tau_gen(psi: StructureBlocks, c: MultiplierCoeff, d: MultiplierCoeff, x) -> np.ndarray:
    """Perturbed generator assembled from whole block matrices:

        E^w psi E_w + c* D psi E_w + E^w psi D d + c* D psi D d + c* E_w x + x E^w d
    """
    _check_dims(psi, c, d)
    n, dd = psi.n, psi.d
    x = linalg.as_matrix(x)
    P = psi(x)
    Ew = e_vac(n, dd)
    Delta = delta_projection(n, dd)
    cs = c.column.conj().T
    dc = d.column
    return (Ew.conj().T @ P @ Ew + cs @ Delta @ P @ Ew + Ew.conj().T @ P @ Delta @ dc
            + cs @ Delta @ P @ Delta @ dc + cs @ Ew @ x + x @ Ew.conj().T @ dc)


def tau_block(psi: StructureBlocks, c: MultiplierCoeff, d: MultiplierCoeff, x) -> np.ndarray:
    """The same generator from the components ``(tau_0, delta_0, delta_0^dag, pi_0)``."""
    _check_dims(psi, c, d)
    x = linalg.as_matrix(x)
    l1 = c.l_blk
    l2 = d.l_blk
    return (psi.tau0(x) + l1.conj().T @ psi.delta0(x) + psi.delta0_dag(x) @ l2
            + l1.conj().T @ psi.pi0(x) @ l2 + c.c0.conj().T @ x + x @ d.c0)


def tau_superop(psi: StructureBlocks, c: MultiplierCoeff, d: MultiplierCoeff) -> np.ndarray:
    return linalg.superop_from_map(lambda x: tau_gen(psi, c, d, x), psi.n)


def unitary_conj_coeff(h, l: Sequence[np.ndarray]) -> MultiplierCoeff:
    """``(-i h - sum_k l_k* l_k / 2; l_1, ..., l_d)``."""
    h = linalg.hermitian(h)
    l = tuple(linalg.as_matrix(x) for x in l)
    lsq = sum(x.conj().T @ x for x in l)
    return MultiplierCoeff(-1j * h - 0.5 * lsq, l)


def unitary_conj_generator(psi: StructureBlocks, h, l: Sequence[np.ndarray], x) -> np.ndarray:
    """Generator of the flow conjugated by the unitary process driven by ``(h, l)``,
    written out term by term (left/right multiplications of the structure maps)."""
    x = linalg.as_matrix(x)
    lb = stack_column(l)
    lsq = lb.conj().T @ lb
    return (psi.tau0(x) + lb.conj().T @ psi.delta0(x) + psi.delta0_dag(x) @ lb
            + lb.conj().T @ psi.pi0(x) @ lb + 1j * linalg.commutator(h, x)
            - 0.5 * linalg.anticommutator(lsq, x))
