"""Invertible Bloom lookup tables: insert/delete/get, full content listing
via peeling, fault-tolerant checked decoding, and sketch-based set
reconciliation."""

from .accum import PRIME, Accumulator
from .analysis import (
    PoisonModel,
    SizingSpec,
    absent_null_fail_prob,
    all_poisoned_prob,
    core_threshold,
    empty_cell_prob,
    get_success_prob,
    invalid_tolerant_hash_count,
    size_table,
)
from .core import (
    Cell,
    ConfigMismatchError,
    CorruptionError,
    Entry,
    GetOutcome,
    GetStatus,
    Iblt,
    IbltConfig,
    IbltError,
    ListResult,
    Mode,
    subtract,
)
from .hashing import HashConfig, cell_indices, key_checksum, mix64, value_checksum
from .reconcile import (
    DiffResult,
    Mismatch,
    SketchEnvelope,
    WireFormatError,
    decode,
    diff,
    encode,
)

__all__ = [
    "Accumulator",
    "Cell",
    "ConfigMismatchError",
    "CorruptionError",
    "DiffResult",
    "Entry",
    "GetOutcome",
    "GetStatus",
    "HashConfig",
    "Iblt",
    "IbltConfig",
    "IbltError",
    "ListResult",
    "Mismatch",
    "Mode",
    "PRIME",
    "PoisonModel",
    "SizingSpec",
    "SketchEnvelope",
    "WireFormatError",
    "absent_null_fail_prob",
    "all_poisoned_prob",
    "cell_indices",
    "core_threshold",
    "decode",
    "diff",
    "empty_cell_prob",
    "encode",
    "get_success_prob",
    "invalid_tolerant_hash_count",
    "key_checksum",
    "mix64",
    "size_table",
    "subtract",
    "value_checksum",
]

__version__ = "0.1.0"
