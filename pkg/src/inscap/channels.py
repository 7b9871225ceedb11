"""Insertion-channel realizations and the modified / perturbed transformations.

Two channel models are supported:

* simple  -- after each input bit, an independent uniform bit is inserted
             with probability alpha;
* gallager -- each input bit is replaced by two independent uniform bits
             with probability alpha.

A realization consists of per-position flags (which positions have an
insertion event) and the payload bits (one per position for the simple
model, a pair for gallager).  Payload bits at unflagged positions are
fixed to 0 by convention.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .core import BitSeq, ChannelSpec, Model, RunVector, UsageError, run_ids, runs_of


def _as_generator(rng) -> np.random.Generator:
    if isinstance(rng, np.random.Generator):
        return rng
    return np.random.default_rng(rng)


@dataclass(frozen=True, eq=False)
class InsertionRealization:
    """Per-position insertion flags plus the inserted/replacement payload bits."""

    model: Model
    flags: np.ndarray  # uint8, shape (n,)
    payload: np.ndarray  # uint8, shape (n,) for simple, (n, 2) for gallager

    def __post_init__(self):
        flags = np.asarray(self.flags, dtype=np.uint8)
        payload = np.asarray(self.payload, dtype=np.uint8)
        object.__setattr__(self, "model", Model.parse(self.model))
        expected = (flags.size,) if self.model is Model.SIMPLE else (flags.size, 2)
        if payload.shape != expected:
            raise ValueError(f"payload shape {payload.shape} != expected {expected}")
        if flags.size and payload[flags == 0].any():
            raise ValueError("payload must be 0 at unflagged positions")
        flags.setflags(write=False)
        payload.setflags(write=False)
        object.__setattr__(self, "flags", flags)
        object.__setattr__(self, "payload", payload)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, InsertionRealization)
            and self.model is other.model
            and np.array_equal(self.flags, other.flags)
            and np.array_equal(self.payload, other.payload)
        )

    __hash__ = None

    @property
    def n(self) -> int:
        return int(self.flags.size)

    @property
    def num_flags(self) -> int:
        return int(self.flags.sum())

    def to_text(self) -> tuple[str, ...]:
        """Round-trip text form: flags string plus one payload string per lane."""
        f = "".join("01"[b] for b in self.flags.tolist())
        if self.model is Model.SIMPLE:
            return (f, "".join("01"[b] for b in self.payload.tolist()))
        return (
            f,
            "".join("01"[b] for b in self.payload[:, 0].tolist()),
            "".join("01"[b] for b in self.payload[:, 1].tolist()),
        )

    @classmethod
    def from_text(cls, model: Model | str, *parts: str) -> "InsertionRealization":
        model = Model.parse(model)
        arrays = [BitSeq.from_string(p).bits for p in parts]
        if model is Model.SIMPLE:
            flags, payload = arrays
        else:
            flags = arrays[0]
            payload = np.stack([arrays[1], arrays[2]], axis=1)
        return cls(model=model, flags=flags, payload=payload)


@dataclass(frozen=True, eq=False)
class ProcessDelta:
    """XOR difference between a realization and its transformed version."""

    z: np.ndarray  # uint8, shape (n,)
    v: np.ndarray  # payload-shaped uint8


def sample_realization(spec: ChannelSpec, n: int, rng) -> InsertionRealization:
    """Draw a realization: i.i.d. Bernoulli(alpha) flags, uniform payload bits."""
    if n < 1:
        raise UsageError("n must be >= 1")
    gen = _as_generator(rng)
    flags = (gen.random(n) < spec.alpha).astype(np.uint8)
    if spec.model is Model.SIMPLE:
        payload = gen.integers(0, 2, size=n, dtype=np.uint8)
        payload[flags == 0] = 0
    else:
        payload = gen.integers(0, 2, size=(n, 2), dtype=np.uint8)
        payload[flags == 0] = 0
    return InsertionRealization(model=spec.model, flags=flags, payload=payload)


def _shifted_cumsum(values: np.ndarray) -> np.ndarray:
    out = np.zeros(values.size, dtype=np.int64)
    if values.size > 1:
        np.cumsum(values[:-1], out=out[1:])
    return out


def apply_realization(x: BitSeq, r: InsertionRealization) -> tuple[BitSeq, RunVector]:
    """Apply a realization to an input, returning the output and its marker vector.

    The marker vector assigns every output bit (original plus the bits produced
    by the event at position i) to the input run containing position i.
    """
    bits = x.bits
    n = bits.size
    if n != r.n:
        raise UsageError(f"input length {n} != realization length {r.n}")
    flags = r.flags
    rid = run_ids(bits)
    num_runs = int(rid[-1]) + 1 if n else 0
    emitted = 1 + flags.astype(np.int64)
    y = np.empty(n + int(flags.sum()), dtype=np.uint8)
    if r.model is Model.SIMPLE:
        xpos = np.arange(n, dtype=np.int64) + _shifted_cumsum(flags)
        y[xpos] = bits
        flagged = flags == 1
        y[xpos[flagged] + 1] = r.payload[flagged]
    else:
        starts = _shifted_cumsum(emitted)
        plain = flags == 0
        y[starts[plain]] = bits[plain]
        flagged = flags == 1
        y[starts[flagged]] = r.payload[flagged, 0]
        y[starts[flagged] + 1] = r.payload[flagged, 1]
    k = np.bincount(rid, weights=emitted, minlength=num_runs).astype(np.int64)
    return BitSeq(y), RunVector(tuple(int(v) for v in k))


def _run_geometry(bits: np.ndarray):
    """Run ids, lengths, and the first/last position of every run."""
    rid = run_ids(bits)
    num_runs = int(rid[-1]) + 1 if bits.size else 0
    lengths = np.bincount(rid, minlength=num_runs)
    starts = np.zeros(num_runs, dtype=np.int64)
    if num_runs > 1:
        np.cumsum(lengths[:-1], out=starts[1:])
    lasts = starts + lengths - 1
    return rid, num_runs, lengths, starts, lasts


def modified_clear_mask(bits: np.ndarray, flags: np.ndarray) -> np.ndarray:
    """Positions whose flags are reversed by the modified-process rule.

    A run is cleared when its extended run (the run plus one neighboring bit
    on each side, truncated at the sequence edges) contains >= 2 flags.
    """
    rid, num_runs, _, starts, lasts = _run_geometry(bits)
    if num_runs == 0:
        return np.zeros(0, dtype=bool)
    per_run = np.bincount(rid, weights=flags, minlength=num_runs)
    ext = per_run.copy()
    if num_runs > 1:
        ext[1:] += flags[lasts[:-1]]  # left neighbor bit
        ext[:-1] += flags[starts[1:]]  # right neighbor bit
    return (ext >= 2)[rid] & (flags == 1)


def modify_realization(
    x: BitSeq, r: InsertionRealization
) -> tuple[InsertionRealization, ProcessDelta]:
    """Reverse all flags of every run whose extended run carries >= 2 flags."""
    bits = x.bits
    if bits.size != r.n:
        raise UsageError(f"input length {bits.size} != realization length {r.n}")
    clear = modified_clear_mask(bits, r.flags)
    new_flags = r.flags.copy()
    new_flags[clear] = 0
    new_payload = r.payload.copy()
    new_payload[clear] = 0
    z = clear.astype(np.uint8)
    v = r.payload.copy()
    v[~clear] = 0
    r_hat = InsertionRealization(model=r.model, flags=new_flags, payload=new_payload)
    return r_hat, ProcessDelta(z=z, v=v)


def perturbed_clear_mask(bits: np.ndarray, flags: np.ndarray) -> np.ndarray:
    """Positions whose flags are reversed by the perturbed-process rule.

    For every consecutive run pair carrying >= 2 flags in total, the flags of
    the left run are cleared; the per-pair clears are unioned over all pairs.
    """
    rid, num_runs, _, _, _ = _run_geometry(bits)
    if num_runs == 0:
        return np.zeros(0, dtype=bool)
    per_run = np.bincount(rid, weights=flags, minlength=num_runs)
    cleared_run = np.zeros(num_runs, dtype=bool)
    if num_runs > 1:
        cleared_run[:-1] = (per_run[:-1] + per_run[1:]) >= 2
    return cleared_run[rid] & (flags == 1)


def perturb_realization(
    x: BitSeq, r: InsertionRealization
) -> tuple[InsertionRealization, np.ndarray]:
    """Clear the left run's flags of every run pair carrying >= 2 flags."""
    bits = x.bits
    if bits.size != r.n:
        raise UsageError(f"input length {bits.size} != realization length {r.n}")
    clear = perturbed_clear_mask(bits, r.flags)
    new_flags = r.flags.copy()
    new_flags[clear] = 0
    new_payload = r.payload.copy()
    new_payload[clear] = 0
    r_check = InsertionRealization(model=r.model, flags=new_flags, payload=new_payload)
    return r_check, clear.astype(np.uint8)


def enumerate_realizations(spec: ChannelSpec, n: int, max_events: int | None = None):
    """Yield every realization with at most max_events flags and its probability.

    Probabilities are alpha^w (1-alpha)^(n-w) times the payload mass (2^-w for
    simple, 4^-w for gallager); over the unbounded stream they sum to 1.
    """
    if n < 1:
        raise UsageError("n must be >= 1")
    if max_events is None:
        max_events = n
    if max_events > n:
        raise UsageError(f"max_events {max_events} exceeds n {n}")
    alpha = spec.alpha
    simple = spec.model is Model.SIMPLE
    choices = [(0,), (1,)] if simple else [(0, 0), (0, 1), (1, 0), (1, 1)]
    payload_mass = 0.5 if simple else 0.25
    for w in range(max_events + 1):
        if alpha == 0.0 and w > 0:
            break
        base = (alpha**w) * ((1.0 - alpha) ** (n - w)) * (payload_mass**w)
        for positions in itertools.combinations(range(n), w):
            for values in itertools.product(choices, repeat=w):
                flags = np.zeros(n, dtype=np.uint8)
                if simple:
                    payload = np.zeros(n, dtype=np.uint8)
                else:
                    payload = np.zeros((n, 2), dtype=np.uint8)
                for pos, val in zip(positions, values):
                    flags[pos] = 1
                    payload[pos] = val[0] if simple else val
                yield (
                    InsertionRealization(model=spec.model, flags=flags, payload=payload),
                    base,
                )
