"""Deterministic hashing for cell placement and decode checksums.

Everything in this module is a pure function of (seed, input), with the
arithmetic pinned bit-exactly: two parties that construct tables from the
same seed and geometry must end up with identical cells, otherwise sketch
subtraction between them is meaningless. Nothing here may change without
bumping the wire-format version.

Scalar functions operate on Python ints; the ``*_vec`` variants operate on
``numpy.uint64`` arrays and return the same values elementwise.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1

# SplitMix64 finalizer constants.
_GOLDEN = 0x9E3779B97F4A7C15
_MIX_A = 0xBF58476D1CE4E5B9
_MIX_B = 0x94D049BB133111EB

# Seed salts for the key/value decode checksums. Part of the wire contract.
KEY_CHECKSUM_SALT = 0x4B1D_0000_0000_0001
VALUE_CHECKSUM_SALT = 0x4B1D_0000_0000_0002

# Subtable i mixes with seed XOR (SUBTABLE_SALT_STEP * i + 1).
SUBTABLE_SALT_STEP = 0xA5A5

MIN_K = 2
MAX_K = 16

_U64_GOLDEN = np.uint64(_GOLDEN)
_U64_MIX_A = np.uint64(_MIX_A)
_U64_MIX_B = np.uint64(_MIX_B)
_SH30 = np.uint64(30)
_SH27 = np.uint64(27)
_SH31 = np.uint64(31)


def mix64(seed_variant: int, x: int) -> int:
    """Avalanche-mix ``x`` under ``seed_variant``; both taken mod 2**64."""
    z = (x + seed_variant + _GOLDEN) & MASK64
    z = ((z ^ (z >> 30)) * _MIX_A) & MASK64
    z = ((z ^ (z >> 27)) * _MIX_B) & MASK64
    return z ^ (z >> 31)


def mix64_vec(seed_variant: int, xs: np.ndarray) -> np.ndarray:
    """Elementwise :func:`mix64` over a ``uint64`` array."""
    z = xs + np.uint64((seed_variant + _GOLDEN) & MASK64)
    z = (z ^ (z >> _SH30)) * _U64_MIX_A
    z = (z ^ (z >> _SH27)) * _U64_MIX_B
    return z ^ (z >> _SH31)


@dataclass(frozen=True)
class HashConfig:
    """Geometry and seed fixing all cell placement and checksums.

    The table's m cells are split into ``k`` subtables of ``subtable_size``
    cells each; hash function i picks one cell, uniformly, from subtable i,
    so the k indices for a key are always pairwise distinct.
    """

    seed: int
    k: int
    subtable_size: int

    def __post_init__(self) -> None:
        if not MIN_K <= self.k <= MAX_K:
            raise ValueError(f"k must be in [{MIN_K}, {MAX_K}], got {self.k}")
        if self.subtable_size < 1:
            raise ValueError(f"subtable_size must be >= 1, got {self.subtable_size}")
        if not 0 <= self.seed <= MASK64:
            raise ValueError("seed must fit in 64 bits")

    @property
    def m(self) -> int:
        return self.k * self.subtable_size


def subtable_seed(seed: int, i: int) -> int:
    """Seed variant feeding the index hash for subtable ``i``."""
    return seed ^ (SUBTABLE_SALT_STEP * i + 1)


def cell_indices(key: int, cfg: HashConfig) -> tuple[int, ...]:
    """The k global cell indices for ``key``, one per subtable, ascending."""
    size = cfg.subtable_size
    return tuple(
        i * size + mix64(subtable_seed(cfg.seed, i), key) % size
        for i in range(cfg.k)
    )


def cell_indices_vec(keys: np.ndarray, cfg: HashConfig) -> np.ndarray:
    """Row-per-key matrix of cell indices; shape ``(len(keys), k)``, int64."""
    size = np.uint64(cfg.subtable_size)
    out = np.empty((len(keys), cfg.k), dtype=np.int64)
    for i in range(cfg.k):
        col = mix64_vec(subtable_seed(cfg.seed, i), keys) % size
        out[:, i] = col.astype(np.int64) + i * cfg.subtable_size
    return out


def key_checksum(key: int, seed: int) -> int:
    """64-bit decode checksum of a key (summed into checked-mode cells)."""
    return mix64(seed ^ KEY_CHECKSUM_SALT, key)


def value_checksum(value: int, seed: int) -> int:
    """64-bit decode checksum of a value (summed into checked-mode cells)."""
    return mix64(seed ^ VALUE_CHECKSUM_SALT, value)


def key_checksum_vec(keys: np.ndarray, seed: int) -> np.ndarray:
    return mix64_vec(seed ^ KEY_CHECKSUM_SALT, keys)


def value_checksum_vec(values: np.ndarray, seed: int) -> np.ndarray:
    return mix64_vec(seed ^ VALUE_CHECKSUM_SALT, values)
