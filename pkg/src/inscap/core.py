"""Bit-sequence, run-length, and entropy primitives shared by all modules."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

LOG2E = math.log2(math.e)


class UsageError(ValueError):
    """Raised when an operation is invoked outside its supported parameter range."""


class Model(str, Enum):
    SIMPLE = "simple"
    GALLAGER = "gallager"

    @classmethod
    def parse(cls, name: str | "Model") -> "Model":
        if isinstance(name, Model):
            return name
        try:
            return cls(str(name).lower())
        except ValueError:
            raise UsageError(f"unknown model {name!r}; expected 'simple' or 'gallager'")


class BitSeq:
    """An immutable finite sequence of bits.

    Bits are held in a read-only uint8 array; the text form is e.g. "0011".
    """

    __slots__ = ("_bits",)

    def __init__(self, bits: Iterable[int] | np.ndarray):
        arr = np.asarray(bits, dtype=np.uint8).copy()
        if arr.ndim != 1:
            raise ValueError("BitSeq requires a one-dimensional bit sequence")
        if arr.size and not np.all((arr == 0) | (arr == 1)):
            raise ValueError("BitSeq symbols must be 0 or 1")
        arr.setflags(write=False)
        self._bits = arr

    @classmethod
    def from_string(cls, text: str) -> "BitSeq":
        text = text.strip().replace(" ", "")
        if any(c not in "01" for c in text):
            raise ValueError(f"invalid bit string {text!r}")
        return cls(np.frombuffer(text.encode(), dtype=np.uint8) - ord("0"))

    @classmethod
    def from_int(cls, value: int, length: int) -> "BitSeq":
        return cls([(value >> i) & 1 for i in range(length)])

    @property
    def bits(self) -> np.ndarray:
        return self._bits

    def to_int(self) -> int:
        out = 0
        for i, b in enumerate(self._bits.tolist()):
            out |= b << i
        return out

    def complement(self) -> "BitSeq":
        return BitSeq(1 - self._bits)

    def __len__(self) -> int:
        return int(self._bits.size)

    def __getitem__(self, i):
        return int(self._bits[i])

    def __iter__(self):
        return iter(self._bits.tolist())

    def __eq__(self, other) -> bool:
        return isinstance(other, BitSeq) and np.array_equal(self._bits, other._bits)

    def __hash__(self) -> int:
        return hash(self._bits.tobytes())

    def __str__(self) -> str:
        return "".join("01"[b] for b in self._bits.tolist())

    def __repr__(self) -> str:
        return f"BitSeq({str(self)!r})"


@dataclass(frozen=True)
class RunDecomposition:
    """Maximal runs of a bit sequence: first symbol plus the ordered run lengths."""

    first_symbol: int
    run_lengths: tuple[int, ...]
    total: int = field(init=False)

    def __post_init__(self):
        object.__setattr__(self, "total", sum(self.run_lengths))

    @property
    def num_runs(self) -> int:
        return len(self.run_lengths)

    def reconstruct(self) -> BitSeq:
        parts = []
        sym = self.first_symbol
        for length in self.run_lengths:
            parts.append(np.full(length, sym, dtype=np.uint8))
            sym ^= 1
        if not parts:
            return BitSeq([])
        return BitSeq(np.concatenate(parts))


@dataclass(frozen=True)
class RunVector:
    """Per-input-run lengths of the corresponding output segments."""

    lengths: tuple[int, ...]

    def __post_init__(self):
        if any(v < 0 for v in self.lengths):
            raise ValueError("RunVector entries must be non-negative")

    @property
    def total(self) -> int:
        return sum(self.lengths)

    def __len__(self) -> int:
        return len(self.lengths)

    def __iter__(self):
        return iter(self.lengths)


@dataclass(frozen=True)
class ChannelSpec:
    """A channel model together with its insertion probability."""

    model: Model
    alpha: float

    def __post_init__(self):
        object.__setattr__(self, "model", Model.parse(self.model))
        if not (0.0 <= self.alpha < 1.0):
            raise ValueError(f"alpha must satisfy 0 <= alpha < 1, got {self.alpha}")


def runs_of(x: BitSeq) -> RunDecomposition:
    """Decompose a bit sequence into its maximal runs."""
    bits = x.bits if isinstance(x, BitSeq) else np.asarray(x, dtype=np.uint8)
    n = bits.size
    if n == 0:
        return RunDecomposition(first_symbol=0, run_lengths=())
    boundaries = np.nonzero(bits[1:] != bits[:-1])[0] + 1
    starts = np.concatenate(([0], boundaries))
    ends = np.concatenate((boundaries, [n]))
    return RunDecomposition(
        first_symbol=int(bits[0]),
        run_lengths=tuple(int(v) for v in (ends - starts)),
    )


def run_ids(bits: np.ndarray) -> np.ndarray:
    """Index of the run containing each position (0-based, increasing)."""
    n = bits.size
    if n == 0:
        return np.zeros(0, dtype=np.int64)
    change = np.empty(n, dtype=bool)
    change[0] = True
    np.not_equal(bits[1:], bits[:-1], out=change[1:])
    return np.cumsum(change) - 1


def binary_entropy(p: float) -> float:
    """Binary entropy in bits, with the convention 0*log(0) = 0."""
    if not (0.0 <= p <= 1.0):
        raise ValueError(f"binary_entropy requires p in [0,1], got {p}")
    if p == 0.0 or p == 1.0:
        return 0.0
    return -p * math.log2(p) - (1.0 - p) * math.log2(1.0 - p)


def binary_entropy_vec(p: np.ndarray) -> np.ndarray:
    """Vectorized binary entropy in bits; entries must lie in (0,1)."""
    p = np.asarray(p, dtype=np.float64)
    return -(p * np.log2(p) + (1.0 - p) * np.log2(1.0 - p))


def entropy_of_distribution(weights: Mapping[object, float]) -> float:
    """Shannon entropy in bits of an explicit finite distribution."""
    values = list(weights.values())
    if any(v < 0 for v in values):
        raise ValueError("probabilities must be non-negative")
    total = math.fsum(values)
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"probabilities must sum to 1 (got {total})")
    return -math.fsum(p * math.log2(p) for p in values if p > 0.0)


def entropy_of_values(values: Iterable[float]) -> float:
    """Entropy in bits of a sub-normalized weight collection (no normalization check).

    Used internally by the enumeration oracle, where group masses are exact and
    compensated summation keeps the result accurate over millions of terms.
    """
    return -math.fsum(p * math.log2(p) for p in values if p > 0.0)
