"""Encode classical records into quantum states.

Supports computational-basis encoding of binary feature vectors, amplitude
encoding of normalised numeric vectors, and preparation of score-weighted
superpositions (squared amplitudes proportional to nonnegative utility
scores).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import ValidationError
from .linalg import StateVector

MAX_QUBITS = 20


@dataclass(frozen=True)
class FeatureRecord:
    """One individual's binary feature vector; bit 1 is the most significant."""

    bits: tuple[int, ...]
    index: int | None = None

    def __post_init__(self):
        bits = tuple(int(b) for b in self.bits)
        if any(b not in (0, 1) for b in bits):
            raise ValidationError(f"feature bits must be 0/1, got {self.bits!r}")
        if not bits:
            raise ValidationError("feature record needs at least one bit")
        object.__setattr__(self, "bits", bits)

    @property
    def num_bits(self) -> int:
        return len(self.bits)

    def basis_index(self) -> int:
        """Index of the matching basis state (bit 1 = most significant)."""
        value = 0
        for b in self.bits:
            value = (value << 1) | b
        return value


@dataclass(frozen=True)
class ScoreTable:
    """Nonnegative utility score per basis index; unlisted indices score 0."""

    entries: dict[int, float] = field(default_factory=dict)

    def __post_init__(self):
        entries = {}
        for index, score in self.entries.items():
            s = float(score)
            if not math.isfinite(s) or s < 0:
                raise ValidationError(f"score for index {index} must be finite and >= 0, got {score!r}")
            entries[int(index)] = s
        if not any(s > 0 for s in entries.values()):
            raise ValidationError("score table needs at least one positive score")
        object.__setattr__(self, "entries", entries)

    @classmethod
    def from_records(
        cls, records: Iterable[FeatureRecord], scores: Sequence[float] | None = None
    ) -> "ScoreTable":
        """Aggregate records into scores; duplicates of a combination sum."""
        records = list(records)
        if scores is None:
            scores = [1.0] * len(records)
        if len(scores) != len(records):
            raise ValidationError("one score per record required")
        table: dict[int, float] = {}
        for record, score in zip(records, scores):
            idx = record.basis_index()
            table[idx] = table.get(idx, 0.0) + float(score)
        return cls(table)

    def total(self) -> float:
        return sum(self.entries.values())

    def max_index(self) -> int:
        return max(self.entries)


def basis_encode(record: FeatureRecord) -> StateVector:
    """Map a binary record to its computational basis state."""
    n = record.num_bits
    if n > MAX_QUBITS:
        raise ValidationError(f"records of {n} bits exceed the {MAX_QUBITS}-qubit limit")
    amps = np.zeros(2**n, dtype=np.complex128)
    amps[record.basis_index()] = 1.0
    return StateVector(amps)


def decode_basis_record(psi: StateVector) -> FeatureRecord:
    """Recover the record at the largest-magnitude amplitude."""
    index = int(np.argmax(np.abs(psi.amplitudes)))
    bits = tuple((index >> (psi.num_qubits - k)) & 1 for k in range(1, psi.num_qubits + 1))
    return FeatureRecord(bits=bits, index=index)


def uniform_superposition(n: int) -> StateVector:
    """Equal superposition of all 2**n basis states (amplitude 2**(-n/2) each)."""
    if not 1 <= n <= MAX_QUBITS:
        raise ValidationError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    dim = 2**n
    return StateVector(np.full(dim, 1.0 / math.sqrt(dim), dtype=np.complex128))


def amplitude_encode(x: Sequence[complex] | np.ndarray) -> tuple[StateVector, float]:
    """Encode a numeric vector as statevector amplitudes.

    Returns (state, norm) where norm is the factor the input was divided by.
    The length must already be a power of two: padding would silently add
    probability mass on fictitious basis states, so it is rejected.
    """
    arr = np.asarray(x, dtype=np.complex128).ravel()
    size = arr.size
    if size == 0 or size & (size - 1):
        raise ValidationError(f"input length {size} is not a power of two (padding is not applied)")
    norm = float(np.linalg.norm(arr))
    if norm <= 0.0:
        raise ValidationError("cannot encode the zero vector")
    return StateVector(arr / norm), norm


def prepare_scored_state(scores: ScoreTable, n: int) -> StateVector:
    """Superposition whose Born probabilities equal the normalised scores.

    Amplitude at index i is sqrt(score_i / total); indices absent from the
    table get amplitude 0.
    """
    if not 1 <= n <= MAX_QUBITS:
        raise ValidationError(f"qubit count must be in [1, {MAX_QUBITS}], got {n}")
    dim = 2**n
    if scores.max_index() >= dim:
        raise ValidationError(f"score index {scores.max_index()} out of range for {n} qubits")
    total = scores.total()
    amps = np.zeros(dim, dtype=np.complex128)
    for index, score in scores.entries.items():
        amps[index] = math.sqrt(score / total)
    return StateVector(amps)
