"""Accumulator strategies for cell sum fields.

Each strategy is an abelian group on 64-bit words, so cell contents stay a
homomorphic image of the signed multiset of pairs hashed there:

* ``WRAPPING_SUM`` — addition mod 2**64; overflow is graceful by design.
* ``PRIME_SUM`` — addition mod p = 2**61 - 1; the only strategy where
  division by a multiplicity j is well defined, hence required for
  duplicate handling. Inputs must be < p.
* ``XOR`` — bitwise xor; self-inverse, so multiplicities collapse mod 2
  and duplicates cannot be supported.

Scalar ops work on Python ints; the ``p61_*``/scatter helpers operate on
``numpy.uint64`` arrays and are written to never overflow 64-bit
intermediates (bounds noted inline).
"""

from __future__ import annotations

from enum import Enum

import numpy as np

MASK64 = (1 << 64) - 1
PRIME = (1 << 61) - 1

_P = np.uint64(PRIME)
_SH61 = np.uint64(61)
_SH32 = np.uint64(32)
_SH29 = np.uint64(29)
_SH3 = np.uint64(3)
_LOW32 = np.uint64(0xFFFFFFFF)
_LOW29 = np.uint64((1 << 29) - 1)


class Accumulator(Enum):
    WRAPPING_SUM = "wrapping"
    PRIME_SUM = "prime"
    XOR = "xor"


# ---------------------------------------------------------------------------
# Scalar group operations (Python ints).

def add(acc: Accumulator, a: int, b: int) -> int:
    if acc is Accumulator.WRAPPING_SUM:
        return (a + b) & MASK64
    if acc is Accumulator.PRIME_SUM:
        return (a + b) % PRIME
    return a ^ b


def neg(acc: Accumulator, a: int) -> int:
    if acc is Accumulator.WRAPPING_SUM:
        return (-a) & MASK64
    if acc is Accumulator.PRIME_SUM:
        return (PRIME - a) % PRIME
    return a


def sub(acc: Accumulator, a: int, b: int) -> int:
    return add(acc, a, neg(acc, b))


def scale(acc: Accumulator, a: int, j: int) -> int:
    """``j`` signed copies of ``a`` combined: j*a in the group."""
    if acc is Accumulator.WRAPPING_SUM:
        return (a * j) & MASK64
    if acc is Accumulator.PRIME_SUM:
        return (a * (j % PRIME)) % PRIME
    return a if j & 1 else 0


def reduce_word(acc: Accumulator, a: int) -> int:
    """Map a raw 64-bit word into the accumulator's value domain."""
    return a % PRIME if acc is Accumulator.PRIME_SUM else a & MASK64


def prime_div(a: int, j: int) -> int:
    """a / j mod p; ``j`` is a signed nonzero multiplicity."""
    return (a * pow(j % PRIME, PRIME - 2, PRIME)) % PRIME


# ---------------------------------------------------------------------------
# Vectorized mod-p arithmetic on uint64 arrays.

def p61_fold(x: np.ndarray) -> np.ndarray:
    """Reduce any uint64 array mod p. (x>>61) <= 7, so one fold suffices."""
    r = (x & _P) + (x >> _SH61)
    return np.where(r >= _P, r - _P, r)


def p61_add(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return p61_fold(a + b)  # both < p, sum < 2**62: no wrap

def p61_neg(a: np.ndarray) -> np.ndarray:
    return np.where(a == 0, np.uint64(0), _P - a)


def p61_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    return p61_fold(a + (_P - b))


def p61_mul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """a*b mod p without 128-bit intermediates (a, b < p < 2**61)."""
    a0 = a & _LOW32
    a1 = a >> _SH32  # < 2**29
    b0 = b & _LOW32
    b1 = b >> _SH32
    # a*b = a1*b1*2**64 + (a1*b0 + a0*b1)*2**32 + a0*b0, and 2**64 = 8 mod p.
    hi = p61_fold((a1 * b1) << _SH3)  # a1*b1 < 2**58, shifted < 2**61
    mid = a1 * b0 + a0 * b1  # < 2**62
    # mid*2**32 = (mid>>29)*2**61 + (mid&low29)*2**32 = (mid>>29) + low<<32 mod p
    mid = p61_fold((mid >> _SH29) + ((mid & _LOW29) << _SH32))
    lo = p61_fold(a0 * b0)  # < 2**64, no wrap
    return p61_fold(hi + mid + lo)  # < 3p < 2**63


def p61_scale(a: np.ndarray, j: np.ndarray) -> np.ndarray:
    """Elementwise j*a mod p for signed int64 multiplicities j."""
    jm = np.mod(j, np.int64(PRIME)).astype(np.uint64)
    return p61_mul(a, jm)


def p61_inverse_map(js: np.ndarray) -> np.ndarray:
    """Elementwise modular inverse of signed nonzero multiplicities."""
    uniq, inverse = np.unique(js, return_inverse=True)
    invs = np.array(
        [pow(int(j) % PRIME, PRIME - 2, PRIME) for j in uniq], dtype=np.uint64
    )
    return invs[inverse]


def p61_scatter_add(acc: np.ndarray, idx: np.ndarray, vals: np.ndarray) -> None:
    """acc[idx] += vals (mod p), in place, duplicate indices allowed.

    Split accumulation keeps partial sums below 2**64 for any batch of
    fewer than 2**30 addends.
    """
    lo = np.zeros(len(acc), dtype=np.uint64)
    hi = np.zeros(len(acc), dtype=np.uint64)
    np.add.at(lo, idx, vals & _LOW32)
    np.add.at(hi, idx, vals >> _SH32)
    # hi*2**32 mod p via the same 29-bit split as in p61_mul.
    batch = p61_fold((hi >> _SH29) + ((hi & _LOW29) << _SH32))
    batch = p61_fold(batch + p61_fold(lo))
    np.copyto(acc, p61_fold(acc + batch))


# ---------------------------------------------------------------------------
# Generic vectorized group operations dispatched on the strategy.

def vec_scale(acc_kind: Accumulator, words: np.ndarray, mults: np.ndarray) -> np.ndarray:
    """Elementwise group contribution of ``mults`` signed copies of ``words``."""
    if acc_kind is Accumulator.WRAPPING_SUM:
        return words * mults.astype(np.uint64)  # wraps mod 2**64
    if acc_kind is Accumulator.PRIME_SUM:
        return p61_scale(words, mults)
    return np.where((mults & 1).astype(bool), words, np.uint64(0))


def vec_scatter(
    acc_kind: Accumulator, column: np.ndarray, idx: np.ndarray, contrib: np.ndarray
) -> None:
    """column[idx] ⊕= contrib in place; duplicate indices allowed."""
    if acc_kind is Accumulator.WRAPPING_SUM:
        np.add.at(column, idx, contrib)
    elif acc_kind is Accumulator.PRIME_SUM:
        p61_scatter_add(column, idx, contrib)
    else:
        np.bitwise_xor.at(column, idx, contrib)


def vec_neg(acc_kind: Accumulator, a: np.ndarray) -> np.ndarray:
    if acc_kind is Accumulator.WRAPPING_SUM:
        return np.negative(a)
    if acc_kind is Accumulator.PRIME_SUM:
        return p61_neg(a)
    return a
