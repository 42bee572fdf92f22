"""Experiment configuration: ``key = value`` text files plus overrides."""
from __future__ import annotations

import ast
import math
from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .lattice import LatticeParams

PRESETS = ("gaussian-subordination", "lindsay-sinha", "bahn-park", "unitary-conjugation",
           "random-structure")

NAMED = {
    "sigma_x": linalg.SIGMA_X,
    "sigma_y": linalg.SIGMA_Y,
    "sigma_z": linalg.SIGMA_Z,
}

DEFAULT_TOLERANCES = {
    "exact": 1e-12,
    "structural": 1e-10,
    "semigroup_law": 1e-9,
    "cp": 1e-9,
    "generator": 0.05,
    "oracle_constant": 1.0,
    "quadrature": 1e-8,
    "ito_ratio_low": 1.5,
    "ito_ratio_high": 2.8,
}


class ConfigError(ValueError):
    pass


def parse_text(text: str) -> dict[str, str]:
    """``key = value`` lines; ``#`` starts a comment."""
    out = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected key = value")
        key, value = (s.strip() for s in line.split("=", 1))
        if not key:
            raise ConfigError(f"line {lineno}: empty key")
        out[key] = value
    return out


def parse_matrix(text: str, n: int) -> np.ndarray:
    """``sigma_x``, ``identity``, ``zero``, ``0.5*sigma_z`` or a literal like ``[[0, 1j], [-1j, 0]]``."""
    text = text.strip()
    scale = 1.0
    if "*" in text and not text.startswith("["):
        head, text = text.split("*", 1)
        try:
            scale = complex(ast.literal_eval(head.strip()))
        except (ValueError, SyntaxError) as exc:
            raise ConfigError(f"bad scalar {head!r}") from exc
        text = text.strip()
    if text in NAMED:
        m = NAMED[text]
    elif text == "identity":
        m = np.eye(n, dtype=complex)
    elif text == "zero":
        m = np.zeros((n, n), dtype=complex)
    else:
        try:
            m = np.array(ast.literal_eval(text), dtype=complex)
        except (ValueError, SyntaxError) as exc:
            raise ConfigError(f"cannot parse matrix {text!r}") from exc
    m = scale * m
    if m.shape != (n, n):
        raise ConfigError(f"matrix {text!r} must be {n}x{n}, got shape {m.shape}")
    return m


def _int(raw: dict, key: str, default=None) -> int:
    if key not in raw:
        if default is None:
            raise ConfigError(f"missing required key {key!r}")
        return default
    try:
        return int(raw[key], 0)
    except ValueError as exc:
        raise ConfigError(f"{key} must be an integer, got {raw[key]!r}") from exc


def _float(raw: dict, key: str):
    if key not in raw:
        return None
    try:
        return float(raw[key])
    except ValueError as exc:
        raise ConfigError(f"{key} must be a number, got {raw[key]!r}") from exc


@dataclass(frozen=True)
class ExperimentConfig:
    preset: str
    n: int
    d: int
    N: int
    h: float
    seed: int
    matrices: dict = field(default_factory=dict)
    tolerances: dict = field(default_factory=dict)
    trivial_flow: bool = False
    out_dir: str | None = None

    @property
    def T(self) -> float:
        return self.N * self.h

    def lattice(self) -> LatticeParams:
        return LatticeParams(self.n, self.d, self.N, self.h)

    def tol(self, name: str) -> float:
        return self.tolerances.get(name, DEFAULT_TOLERANCES[name])

    def echo(self) -> dict:
        """Plain, JSON-ready description."""
        return {
            "preset": self.preset, "n": self.n, "d": self.d, "N": self.N, "h": self.h,
            "T": self.T, "seed": self.seed, "trivial_flow": self.trivial_flow,
            "matrices": {k: [[[z.real, z.imag] for z in row] for row in m.tolist()]
                         for k, m in sorted(self.matrices.items())},
            "tolerances": {k: self.tol(k) for k in sorted(DEFAULT_TOLERANCES)},
        }


MATRIX_KEYS = {
    "gaussian-subordination": {"Htilde": "sigma_z"},
    "lindsay-sinha": {"Htilde": "sigma_z", "b": "sigma_x"},
    "bahn-park": {"Htilde": "sigma_z", "b": "sigma_x"},
    "unitary-conjugation": {"Htilde": "sigma_z", "ham": "sigma_z", "l": "sigma_x"},
    "random-structure": {},
}


def build_config(raw: dict[str, str], seed: int | None = None) -> ExperimentConfig:
    """Validate a raw mapping. ``seed`` overrides the file."""
    preset = raw.get("preset")
    if preset not in PRESETS:
        raise ConfigError(f"preset must be one of {', '.join(PRESETS)}; got {preset!r}")
    n = _int(raw, "n", 2)
    d = _int(raw, "d", 1)
    if preset != "random-structure" and d != 1:
        raise ConfigError(f"preset {preset} has one noise channel; d must be 1")
    if n < 1 or d < 1:
        raise ConfigError("n and d must be positive")
    h, T = _float(raw, "h"), _float(raw, "T")
    if "N" in raw:
        N = _int(raw, "N")
    elif h is not None and T is not None:
        N = round(T / h)
    else:
        raise ConfigError("need N, or both h and T")
    if N < 1:
        raise ConfigError(f"invariant N >= 1 violated: N={N}")
    if h is None and T is None:
        raise ConfigError("need h or T")
    if h is None:
        h = T / N
    if not h > 0:
        raise ConfigError(f"invariant h > 0 violated: h={h}")
    if T is not None and abs(N * h - T) > 1e-12:
        raise ConfigError(f"invariant N*h == T violated: {N}*{h} != {T}")
    seed_val = seed if seed is not None else _int(raw, "seed", 0)
    if not 0 <= seed_val < 2**64:
        raise ConfigError("seed must be a 64-bit unsigned integer")

    matrices = {}
    for key, default in MATRIX_KEYS[preset].items():
        matrices[key] = parse_matrix(raw.get(key, default), n)
    if "Htilde" in matrices and not linalg.is_hermitian(matrices["Htilde"]):
        raise ConfigError("Htilde must be Hermitian")
    if preset == "bahn-park" and not linalg.is_hermitian(matrices["b"]):
        raise ConfigError("bahn-park requires a Hermitian b")
    if preset == "unitary-conjugation" and not linalg.is_hermitian(matrices["ham"]):
        raise ConfigError("unitary-conjugation requires a Hermitian ham")

    tolerances = {}
    for key, value in raw.items():
        if key.startswith("tol."):
            name = key[4:]
            if name not in DEFAULT_TOLERANCES:
                raise ConfigError(f"unknown tolerance {name!r}")
            tolerances[name] = _float(raw, key)
    trivial = raw.get("flow", "preset").strip().lower()
    if trivial not in ("preset", "trivial"):
        raise ConfigError("flow must be 'preset' or 'trivial'")
    # keys the parser knows about; anything else is a typo
    known = {"preset", "n", "d", "N", "h", "T", "seed", "flow", "out"} | set(MATRIX_KEYS[preset])
    unknown = [k for k in raw if k not in known and not k.startswith("tol.")]
    if unknown:
        raise ConfigError(f"unknown keys for preset {preset}: {', '.join(sorted(unknown))}")
    try:
        LatticeParams(n, d, N, h)
    except (ValueError, MemoryError) as exc:
        raise ConfigError(str(exc)) from exc
    if math.isnan(h):
        raise ConfigError("h is not a number")
    return ExperimentConfig(preset, n, d, N, h, seed_val, matrices, tolerances,
                            trivial == "trivial", raw.get("out"))


def load_config(path: str, seed: int | None = None) -> ExperimentConfig:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}") from exc
    return build_config(parse_text(text), seed)
