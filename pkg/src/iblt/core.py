"""The invertible lookup table: cells, updates, lookup, and peel listing.

A table is an abelian-group value: its state is a pure function of the
signed multiset of (key, value) pairs applied to it, never of operation
order. ``insert`` and ``delete`` are exact inverses, deletes without a
matching insert are legal (they drive counts negative), and two tables
with identical configs can be subtracted cell-wise to get the table of
their content difference.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from enum import IntEnum
from typing import Iterable, Sequence

import numpy as np

from . import accum
from .accum import PRIME, Accumulator
from .hashing import (
    HashConfig,
    cell_indices,
    cell_indices_vec,
    key_checksum,
    key_checksum_vec,
    value_checksum,
    value_checksum_vec,
)


class IbltError(Exception):
    """Base class for table errors."""


class ConfigMismatchError(IbltError):
    """Two tables with different configs were combined."""


class CorruptionError(IbltError):
    """Cell state is inconsistent with any operation history."""


@dataclass(frozen=True)
class Mode:
    """Structural options: checksum fields, sum arithmetic, duplicate decode.

    ``duplicates_allowed`` turns count-j cells into decodable j-fold
    entries, which needs division by j, hence prime-field sums, and the
    checksum fields to validate the divided-out pair.
    """

    checked: bool = False
    accumulator: Accumulator = Accumulator.WRAPPING_SUM
    duplicates_allowed: bool = False

    def __post_init__(self) -> None:
        if self.duplicates_allowed:
            if self.accumulator is not Accumulator.PRIME_SUM:
                raise ValueError("duplicates_allowed requires the prime-sum accumulator")
            if not self.checked:
                raise ValueError("duplicates_allowed requires checked mode")


@dataclass(frozen=True)
class IbltConfig:
    """Full table configuration; fixes all randomness and cell layout."""

    k: int
    m: int
    seed: int = 0
    mode: Mode = field(default_factory=Mode)

    def __post_init__(self) -> None:
        if self.m <= 0 or self.m % self.k != 0:
            raise ValueError(f"m must be a positive multiple of k, got m={self.m}, k={self.k}")
        # HashConfig validates k range, seed range, subtable size.
        HashConfig(self.seed, self.k, self.m // self.k)

    @property
    def subtable_size(self) -> int:
        return self.m // self.k

    @property
    def hash_config(self) -> HashConfig:
        return HashConfig(self.seed, self.k, self.m // self.k)


@dataclass(frozen=True)
class Cell:
    """Snapshot of one table slot. Checksum fields are None when unchecked."""

    count: int
    key_sum: int
    value_sum: int
    hashkey_sum: int | None = None
    hashvalue_sum: int | None = None

    def is_zero(self) -> bool:
        return (
            self.count == 0
            and self.key_sum == 0
            and self.value_sum == 0
            and not self.hashkey_sum
            and not self.hashvalue_sum
        )


@dataclass(frozen=True)
class Entry:
    """A recovered pair with its net signed multiplicity (never zero)."""

    key: int
    value: int
    multiplicity: int = 1


class GetStatus(IntEnum):
    NOT_FOUND = 0  # inconclusive: every probed cell was ambiguous
    FOUND = 1
    FOUND_DELETED = 2  # pair was net-deleted (extraneous deletion)
    NOT_PRESENT = 3  # definitive null


@dataclass(frozen=True)
class GetOutcome:
    status: GetStatus
    value: int | None = None


@dataclass
class ListResult:
    entries: list[Entry]
    complete: bool
    residual: "Iblt"


class Iblt:
    """A table of ``m`` cells storing a signed multiset of key-value pairs."""

    __slots__ = ("_config", "_counts", "_keys", "_vals", "_hkeys", "_hvals")

    def __init__(self, config: IbltConfig):
        self._config = config
        m = config.m
        self._counts = np.zeros(m, dtype=np.int64)
        self._keys = np.zeros(m, dtype=np.uint64)
        self._vals = np.zeros(m, dtype=np.uint64)
        if config.mode.checked:
            self._hkeys = np.zeros(m, dtype=np.uint64)
            self._hvals = np.zeros(m, dtype=np.uint64)
        else:
            self._hkeys = None
            self._hvals = None

    # -- basic accessors ----------------------------------------------------

    @property
    def config(self) -> IbltConfig:
        return self._config

    @property
    def m(self) -> int:
        return self._config.m

    @property
    def k(self) -> int:
        return self._config.k

    def cell(self, i: int) -> Cell:
        checked = self._config.mode.checked
        return Cell(
            count=int(self._counts[i]),
            key_sum=int(self._keys[i]),
            value_sum=int(self._vals[i]),
            hashkey_sum=int(self._hkeys[i]) if checked else None,
            hashvalue_sum=int(self._hvals[i]) if checked else None,
        )

    def is_empty(self) -> bool:
        """True when every cell field is zero."""
        cols = [self._counts, self._keys, self._vals]
        if self._config.mode.checked:
            cols += [self._hkeys, self._hvals]
        return all(not col.any() for col in cols)

    def copy(self) -> "Iblt":
        out = Iblt.__new__(Iblt)
        out._config = self._config
        out._counts = self._counts.copy()
        out._keys = self._keys.copy()
        out._vals = self._vals.copy()
        out._hkeys = None if self._hkeys is None else self._hkeys.copy()
        out._hvals = None if self._hvals is None else self._hvals.copy()
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Iblt):
            return NotImplemented
        if self._config != other._config:
            return False
        same = np.array_equal(self._counts, other._counts) and np.array_equal(
            self._keys, other._keys
        ) and np.array_equal(self._vals, other._vals)
        if same and self._config.mode.checked:
            same = np.array_equal(self._hkeys, other._hkeys) and np.array_equal(
                self._hvals, other._hvals
            )
        return same

    __hash__ = None  # mutable

    # -- updates ------------------------------------------------------------

    def _check_word_range(self, key: int, value: int) -> None:
        if not (0 <= key < (1 << 64) and 0 <= value < (1 << 64)):
            raise ValueError("keys and values must be unsigned 64-bit words")
        if self._config.mode.accumulator is Accumulator.PRIME_SUM and (
            key >= PRIME or value >= PRIME
        ):
            raise ValueError(f"prime-sum tables require key and value < 2**61 - 1")

    def _apply(self, key: int, value: int, mult: int) -> None:
        self._check_word_range(key, value)
        cfg = self._config
        acc = cfg.mode.accumulator
        counts, keys, vals = self._counts, self._keys, self._vals
        kw = accum.scale(acc, key, mult)
        vw = accum.scale(acc, value, mult)
        if cfg.mode.checked:
            hk = accum.scale(acc, accum.reduce_word(acc, key_checksum(key, cfg.seed)), mult)
            hv = accum.scale(acc, accum.reduce_word(acc, value_checksum(value, cfg.seed)), mult)
            hkeys, hvals = self._hkeys, self._hvals
        for i in cell_indices(key, cfg.hash_config):
            counts[i] += mult
            keys[i] = accum.add(acc, int(keys[i]), kw)
            vals[i] = accum.add(acc, int(vals[i]), vw)
            if cfg.mode.checked:
                hkeys[i] = accum.add(acc, int(hkeys[i]), hk)
                hvals[i] = accum.add(acc, int(hvals[i]), hv)

    def insert(self, key: int, value: int) -> None:
        """Add the pair to the table. O(k)."""
        self._apply(key, value, 1)

    def delete(self, key: int, value: int) -> None:
        """Remove the pair. Legal without a prior insert. O(k)."""
        self._apply(key, value, -1)

    def insert_batch(self, keys: Sequence[int], values: Sequence[int]) -> None:
        self.apply_batch(keys, values, 1)

    def delete_batch(self, keys: Sequence[int], values: Sequence[int]) -> None:
        self.apply_batch(keys, values, -1)

    def apply_batch(self, keys, values, mults) -> None:
        """Vectorized bulk update: ``mults`` signed copies of each pair.

        Equivalent to per-pair loops of insert/delete but orders of
        magnitude faster for large batches.
        """
        keys = np.ascontiguousarray(keys, dtype=np.uint64)
        values = np.ascontiguousarray(values, dtype=np.uint64)
        if keys.shape != values.shape or keys.ndim != 1:
            raise ValueError("keys and values must be 1-D arrays of equal length")
        n = len(keys)
        if n == 0:
            return
        if n >= (1 << 30):
            raise ValueError("batch too large")  # scatter accumulators assume < 2**30 rows
        mults = np.broadcast_to(np.asarray(mults, dtype=np.int64), keys.shape)
        cfg = self._config
        acc = cfg.mode.accumulator
        if acc is Accumulator.PRIME_SUM and (
            (keys >= PRIME).any() or (values >= PRIME).any()
        ):
            raise ValueError("prime-sum tables require key and value < 2**61 - 1")

        flat = cell_indices_vec(keys, cfg.hash_config).ravel()
        k = cfg.k
        np.add.at(self._counts, flat, np.repeat(mults, k))
        for column, words in ((self._keys, keys), (self._vals, values)):
            contrib = accum.vec_scale(acc, words, mults)
            accum.vec_scatter(acc, column, flat, np.repeat(contrib, k))
        if cfg.mode.checked:
            reduce = accum.p61_fold if acc is Accumulator.PRIME_SUM else (lambda a: a)
            for column, checks in (
                (self._hkeys, reduce(key_checksum_vec(keys, cfg.seed))),
                (self._hvals, reduce(value_checksum_vec(values, cfg.seed))),
            ):
                contrib = accum.vec_scale(acc, checks, mults)
                accum.vec_scatter(acc, column, flat, np.repeat(contrib, k))

    # -- lookup -------------------------------------------------------------

    def get(self, key: int, *, check_values: bool = True) -> GetOutcome:
        """Probe the key's k cells in subtable order for a decisive answer.

        ``NOT_FOUND`` is a value, not an error: every probed cell was
        shared, so nothing definitive can be said about the key.
        """
        cfg = self._config
        mode = cfg.mode
        acc = mode.accumulator
        seed = cfg.seed
        x = key
        for i in cell_indices(key, cfg.hash_config):
            c = int(self._counts[i])
            ks = int(self._keys[i])
            vs = int(self._vals[i])
            if not mode.checked:
                if c == 0:
                    return GetOutcome(GetStatus.NOT_PRESENT)
                if c == 1:
                    if ks == x:
                        return GetOutcome(GetStatus.FOUND, vs)
                    return GetOutcome(GetStatus.NOT_PRESENT)
                continue
            hk = int(self._hkeys[i])
            hv = int(self._hvals[i])
            if c == 0 and ks == 0 and hk == 0:
                return GetOutcome(GetStatus.NOT_PRESENT)
            if mode.duplicates_allowed:
                if c != 0:
                    xh = accum.prime_div(ks, c)
                    if xh != x:
                        continue
                    if accum.prime_div(hk, c) != key_checksum(x, seed) % PRIME:
                        continue
                    yh = accum.prime_div(vs, c)
                    if accum.prime_div(hv, c) != value_checksum(yh, seed) % PRIME:
                        continue
                    status = GetStatus.FOUND if c > 0 else GetStatus.FOUND_DELETED
                    return GetOutcome(status, yh)
                continue
            g1 = accum.reduce_word(acc, key_checksum(x, seed))
            if c == 1 and ks == x and hk == g1:
                if not check_values or hv == accum.reduce_word(
                    acc, value_checksum(vs, seed)
                ):
                    return GetOutcome(GetStatus.FOUND, vs)
            elif c == -1 and ks == accum.neg(acc, x) and hk == accum.neg(acc, g1):
                y = accum.neg(acc, vs)
                if not check_values or accum.neg(acc, hv) == accum.reduce_word(
                    acc, value_checksum(y, seed)
                ):
                    return GetOutcome(GetStatus.FOUND_DELETED, y)
        return GetOutcome(GetStatus.NOT_FOUND)

    def get_batch(
        self, keys: Sequence[int], *, check_values: bool = True
    ) -> tuple[np.ndarray, np.ndarray]:
        """Vectorized :meth:`get` over many keys.

        Returns (statuses, values): int8 ``GetStatus`` codes and the decoded
        value per key (zero wherever the status carries no value).
        """
        keys = np.ascontiguousarray(keys, dtype=np.uint64)
        cfg = self._config
        mode = cfg.mode
        acc = mode.accumulator
        idx = cell_indices_vec(keys, cfg.hash_config)
        c = self._counts[idx]
        ks = self._keys[idx]
        vs = self._vals[idx]
        xq = keys[:, None]

        if not mode.checked:
            keymatch = ks == xq
            one = c == 1
            probe = np.where(one & keymatch, np.int8(GetStatus.FOUND), np.int8(0))
            notpres = (c == 0) | (one & ~keymatch)
            probe = np.where(notpres, np.int8(GetStatus.NOT_PRESENT), probe)
            val = vs
        else:
            hk = self._hkeys[idx]
            hv = self._hvals[idx]
            empty = (c == 0) & (ks == 0) & (hk == 0)
            g1q = accum.p61_fold(key_checksum_vec(keys, cfg.seed)) if (
                acc is Accumulator.PRIME_SUM
            ) else key_checksum_vec(keys, cfg.seed)
            g1q = g1q[:, None]
            if mode.duplicates_allowed:
                nz = c != 0
                invj = np.ones_like(ks)
                if nz.any():
                    invj[nz] = accum.p61_inverse_map(c[nz])
                xh = accum.p61_mul(ks, invj)
                yh = accum.p61_mul(vs, invj)
                ok = (
                    nz
                    & (xh == xq)
                    & (accum.p61_mul(hk, invj) == g1q)
                    & (accum.p61_mul(hv, invj)
                       == accum.p61_fold(value_checksum_vec(yh, cfg.seed)))
                )
                probe = np.where(
                    ok,
                    np.where(c > 0, np.int8(GetStatus.FOUND), np.int8(GetStatus.FOUND_DELETED)),
                    np.int8(0),
                )
                val = yh
            else:
                reduce = accum.p61_fold if acc is Accumulator.PRIME_SUM else (lambda a: a)
                pos = (c == 1) & (ks == xq) & (hk == g1q)
                negx = accum.vec_neg(acc, keys)[:, None]
                negg1 = accum.vec_neg(acc, g1q)
                neg = (c == -1) & (ks == negx) & (hk == negg1)
                yneg = accum.vec_neg(acc, vs)
                if check_values:
                    pos &= hv == reduce(value_checksum_vec(vs, cfg.seed))
                    neg &= accum.vec_neg(acc, hv) == reduce(
                        value_checksum_vec(yneg, cfg.seed)
                    )
                probe = np.where(pos, np.int8(GetStatus.FOUND), np.int8(0))
                probe = np.where(neg, np.int8(GetStatus.FOUND_DELETED), probe)
                val = np.where(neg, yneg, vs)
            probe = np.where(empty & (probe == 0), np.int8(GetStatus.NOT_PRESENT), probe)

        decisive = probe != 0
        has = decisive.any(axis=1)
        first = decisive.argmax(axis=1)
        rows = np.arange(len(keys))
        statuses = np.where(has, probe[rows, first], np.int8(GetStatus.NOT_FOUND))
        carries = (statuses == GetStatus.FOUND) | (statuses == GetStatus.FOUND_DELETED)
        values = np.where(carries, val[rows, first], np.uint64(0))
        return statuses.astype(np.int8), values

    # -- listing ------------------------------------------------------------

    def list_entries(
        self,
        *,
        in_place: bool = False,
        check_values: bool = True,
        masked_subtable: int | None = None,
        order: str = "fifo",
    ) -> ListResult:
        """Recover the full signed content by peeling decodable cells.

        Works on a copy unless ``in_place``. Processing order (``"fifo"``
        or ``"lifo"``) changes only traversal, never the recovered multiset
        or the residual. ``masked_subtable`` simulates the loss of one
        memory block: its cells are never read or written, and completeness
        is judged on the remaining cells only.
        """
        cfg = self._config
        mode = cfg.mode
        acc = mode.accumulator
        seed = cfg.seed
        hc = cfg.hash_config
        m = cfg.m
        if order not in ("fifo", "lifo"):
            raise ValueError(f"order must be 'fifo' or 'lifo', got {order!r}")
        if masked_subtable is not None and not 0 <= masked_subtable < cfg.k:
            raise ValueError("masked_subtable out of range")

        counts = self._counts.tolist()
        keys = self._keys.tolist()
        vals = self._vals.tolist()
        checked = mode.checked
        hkeys = self._hkeys.tolist() if checked else None
        hvals = self._hvals.tolist() if checked else None

        size = cfg.subtable_size
        if masked_subtable is None:
            mask_lo, mask_hi = -1, -1
        else:
            mask_lo, mask_hi = masked_subtable * size, (masked_subtable + 1) * size

        dup = mode.duplicates_allowed
        inv_cache: dict[int, int] = {}

        def prime_div(a: int, j: int) -> int:
            inv = inv_cache.get(j)
            if inv is None:
                inv = pow(j % PRIME, PRIME - 2, PRIME)
                inv_cache[j] = inv
            return (a * inv) % PRIME

        def try_decode(i: int) -> tuple[int, int, int] | None:
            c = counts[i]
            if not checked:
                if c != 1:
                    return None
                return keys[i], vals[i], 1
            if dup:
                if c == 0:
                    return None
                x = prime_div(keys[i], c)
                if prime_div(hkeys[i], c) != key_checksum(x, seed) % PRIME:
                    return None
                y = prime_div(vals[i], c)
                if prime_div(hvals[i], c) != value_checksum(y, seed) % PRIME:
                    return None
                return x, y, c
            if c == 1:
                x, y = keys[i], vals[i]
                if hkeys[i] != accum.reduce_word(acc, key_checksum(x, seed)):
                    return None
                if check_values and hvals[i] != accum.reduce_word(
                    acc, value_checksum(y, seed)
                ):
                    return None
                return x, y, 1
            if c == -1:
                x = accum.neg(acc, keys[i])
                y = accum.neg(acc, vals[i])
                if accum.neg(acc, hkeys[i]) != accum.reduce_word(acc, key_checksum(x, seed)):
                    return None
                if check_values and accum.neg(acc, hvals[i]) != accum.reduce_word(
                    acc, value_checksum(y, seed)
                ):
                    return None
                return x, y, -1
            return None

        def candidate(i: int) -> bool:
            c = counts[i]
            if dup:
                return c != 0
            if checked:
                return c == 1 or c == -1
            return c == 1

        queue = deque(
            i for i in range(m) if not mask_lo <= i < mask_hi and candidate(i)
        )
        pop = queue.popleft if order == "fifo" else queue.pop
        entries: list[Entry] = []

        while queue:
            i = pop()
            decoded = try_decode(i)
            if decoded is None:
                continue
            x, y, j = decoded
            entries.append(Entry(x, y, j))
            kw = accum.scale(acc, x, j)
            vw = accum.scale(acc, y, j)
            if checked:
                hkw = accum.scale(acc, accum.reduce_word(acc, key_checksum(x, seed)), j)
                hvw = accum.scale(acc, accum.reduce_word(acc, value_checksum(y, seed)), j)
            for t in cell_indices(x, hc):
                if mask_lo <= t < mask_hi:
                    continue
                counts[t] -= j
                keys[t] = accum.sub(acc, keys[t], kw)
                vals[t] = accum.sub(acc, vals[t], vw)
                if checked:
                    hkeys[t] = accum.sub(acc, hkeys[t], hkw)
                    hvals[t] = accum.sub(acc, hvals[t], hvw)
                if candidate(t):
                    queue.append(t)

        target = self if in_place else Iblt(cfg)
        target._counts = np.array(counts, dtype=np.int64)
        target._keys = np.array(keys, dtype=np.uint64)
        target._vals = np.array(vals, dtype=np.uint64)
        if checked:
            target._hkeys = np.array(hkeys, dtype=np.uint64)
            target._hvals = np.array(hvals, dtype=np.uint64)

        live = np.ones(m, dtype=bool)
        if masked_subtable is not None:
            live[mask_lo:mask_hi] = False
        complete = not (
            target._counts[live].any()
            or target._keys[live].any()
            or target._vals[live].any()
            or (checked and (target._hkeys[live].any() or target._hvals[live].any()))
        )
        return ListResult(entries=entries, complete=complete, residual=target)

    # -- whole-table algebra --------------------------------------------------

    def subtract(self, other: "Iblt") -> "Iblt":
        """Cell-wise group difference; the result holds self's content minus
        other's, as if every pair in ``other`` had been deleted from a copy
        of ``self``."""
        if self._config != other._config:
            raise ConfigMismatchError(
                "subtract requires bit-identical configs (k, m, seed, mode)"
            )
        acc = self._config.mode.accumulator
        out = Iblt(self._config)
        out._counts = self._counts - other._counts

        def col_sub(a: np.ndarray, b: np.ndarray) -> np.ndarray:
            if acc is Accumulator.WRAPPING_SUM:
                return a - b  # wraps mod 2**64
            if acc is Accumulator.PRIME_SUM:
                return accum.p61_sub(a, b)
            return a ^ b

        out._keys = col_sub(self._keys, other._keys)
        out._vals = col_sub(self._vals, other._vals)
        if self._config.mode.checked:
            out._hkeys = col_sub(self._hkeys, other._hkeys)
            out._hvals = col_sub(self._hvals, other._hvals)
        return out

    def net_count(self) -> int:
        """Net number of pairs (inserts minus deletes) applied so far."""
        total = int(self._counts.sum())
        pairs, rem = divmod(total, self.k)
        if rem:
            raise CorruptionError(
                f"total cell count {total} is not a multiple of k={self.k}"
            )
        return pairs


def subtract(a: Iblt, b: Iblt) -> Iblt:
    """Module-level alias for :meth:`Iblt.subtract`."""
    return a.subtract(b)
