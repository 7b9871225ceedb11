"""Exact enumeration oracle: joint tables, likelihoods, and the rate decomposition.

For small n the full joint distribution of (input, output, marker vector) under
i.i.d. Bernoulli(1/2) inputs is enumerated exactly (optionally truncated to at
most max_events insertion events, with the discarded Binomial mass reported).
From the table every term of the mutual-information decomposition

    I(X;Y) = H(Y) - H(A,B) + H(A,B | X,Y,K) + H(K | X,Y)

is computed and the identity residual is checked.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

from . import kernels
from .core import (
    BitSeq,
    ChannelSpec,
    Model,
    RunVector,
    UsageError,
    binary_entropy,
    entropy_of_values,
)
from .channels import (
    InsertionRealization,
    apply_realization,
    enumerate_realizations,
    modified_clear_mask,
)

_UNTRUNCATED_LIMIT = {Model.SIMPLE: 12, Model.GALLAGER: 10}
_TRUNCATED_LIMIT_N = 64
_TRUNCATED_LIMIT_EVENTS = 3


@dataclass(frozen=True)
class JointTable:
    """Exact joint distribution over (x, y, k) cells.

    Cells are stored packed: (x_int, y_int, y_len, k_bytes) -> realization
    count.  All realizations inside a cell share the same event count
    w = y_len - n, hence the same probability, which makes per-cell
    conditional entropies a pure function of the count.
    """

    n: int
    spec: ChannelSpec
    truncation: int | None
    discarded_mass: float
    cells: dict

    def cell_probability(self, y_len: int, count: int) -> float:
        w = y_len - self.n
        alpha = self.spec.alpha
        if alpha == 0.0 and w > 0:
            return 0.0
        payload_mass = 0.5 if self.spec.model is Model.SIMPLE else 0.25
        return (
            2.0**-self.n
            * alpha**w
            * (1.0 - alpha) ** (self.n - w)
            * payload_mass**w
            * count
        )

    def total_mass(self) -> float:
        return math.fsum(
            self.cell_probability(y_len, count)
            for (_, _, y_len, _), count in self.cells.items()
        )

    def items(self):
        """Iterate ((x, y, k), probability) with domain-typed keys."""
        for (x_int, y_int, y_len, k_bytes), count in self.cells.items():
            p = self.cell_probability(y_len, count)
            if p == 0.0:
                continue
            yield (
                (
                    BitSeq.from_int(x_int, self.n),
                    BitSeq.from_int(y_int, y_len),
                    RunVector(tuple(k_bytes)),
                ),
                p,
            )


@dataclass(frozen=True)
class DecompositionReport:
    """The four decomposition terms, the mutual information, and the residual."""

    h_y: float
    h_ab: float
    h_ab_given_xyk: float
    h_k_given_xy: float
    mutual_info: float
    per_bit: float
    residual: float
    discarded_mass: float

    def to_dict(self) -> dict:
        return {
            "h_y": self.h_y,
            "h_ab": self.h_ab,
            "h_ab_given_xyk": self.h_ab_given_xyk,
            "h_k_given_xy": self.h_k_given_xy,
            "mutual_info": self.mutual_info,
            "per_bit": self.per_bit,
            "residual": self.residual,
            "discarded_mass": self.discarded_mass,
        }


def likelihood(y: BitSeq, x: BitSeq, spec: ChannelSpec) -> float:
    """Exact P(y|x) via a prefix-alignment dynamic program in O(|x||y|)."""
    n, m = len(x), len(y)
    if m < n or m > 2 * n:
        return 0.0
    alpha = spec.alpha
    xb, yb = x.bits.tolist(), y.bits.tolist()
    simple = spec.model is Model.SIMPLE
    stay = 1.0 - alpha
    ins = alpha * (0.5 if simple else 0.25)
    # f[j] = P(first i input bits produce first j output bits)
    f = [0.0] * (m + 1)
    f[0] = 1.0
    for i in range(1, n + 1):
        g = [0.0] * (m + 1)
        for j in range(i, min(2 * i, m) + 1):
            acc = 0.0
            if simple:
                if yb[j - 1] == xb[i - 1]:
                    acc += f[j - 1] * stay
                if j >= 2 and yb[j - 2] == xb[i - 1]:
                    acc += f[j - 2] * ins
            else:
                if yb[j - 1] == xb[i - 1]:
                    acc += f[j - 1] * stay
                if j >= 2:
                    acc += f[j - 2] * ins
            g[j] = acc
        f = g
    return f[m]


def _check_limits(n: int, spec: ChannelSpec, max_events: int | None) -> None:
    if n < 1:
        raise UsageError("n must be >= 1")
    if max_events is None:
        limit = _UNTRUNCATED_LIMIT[spec.model]
        if n > limit:
            raise UsageError(
                f"untruncated enumeration is limited to n <= {limit} "
                f"for the {spec.model.value} model (got n = {n})"
            )
    else:
        if max_events > n:
            raise UsageError(f"max_events {max_events} exceeds n {n}")
        if n > _TRUNCATED_LIMIT_N:
            raise UsageError(
                f"truncated enumeration is limited to n <= {_TRUNCATED_LIMIT_N} (got {n})"
            )
        if max_events > _TRUNCATED_LIMIT_EVENTS:
            raise UsageError(
                f"truncated enumeration is limited to max_events <= "
                f"{_TRUNCATED_LIMIT_EVENTS} (got {max_events})"
            )


@lru_cache(maxsize=16)
def _skeleton(model: Model, n: int, max_events: int) -> dict:
    """Alpha-independent cell counts, merged over all 2^n inputs."""
    model_code = 0 if model is Model.SIMPLE else 1
    cells: dict = {}
    for x_int in range(2**n):
        for (y_int, y_len, k_bytes), count in kernels.joint_cells(
            x_int, n, model_code, max_events
        ).items():
            key = (x_int, y_int, y_len, k_bytes)
            cells[key] = cells.get(key, 0) + count
    return cells


def binomial_tail_mass(n: int, alpha: float, max_events: int) -> float:
    """Binomial(n, alpha) mass beyond max_events (closed form)."""
    kept = math.fsum(
        math.comb(n, w) * alpha**w * (1.0 - alpha) ** (n - w)
        for w in range(max_events + 1)
    )
    return max(0.0, 1.0 - kept)


def build_joint(n: int, spec: ChannelSpec, max_events: int | None = None) -> JointTable:
    """Enumerate the joint (x, y, k) distribution for Bernoulli(1/2) inputs."""
    _check_limits(n, spec, max_events)
    effective = n if max_events is None else max_events
    cells = _skeleton(spec.model, n, effective)
    discarded = 0.0
    if max_events is not None:
        discarded = binomial_tail_mass(n, spec.alpha, max_events)
    return JointTable(
        n=n, spec=spec, truncation=max_events, discarded_mass=discarded, cells=cells
    )


def exact_rate(
    n: int, spec: ChannelSpec, max_events: int | None = None
) -> DecompositionReport:
    """Every decomposition term plus the identity residual, from the joint table."""
    table = build_joint(n, spec, max_events)
    p_xyk = []
    p_xy: dict = {}
    p_y: dict = {}
    p_x: dict = {}
    ab_terms = []
    for (x_int, y_int, y_len, _), count in table.cells.items():
        p = table.cell_probability(y_len, count)
        if p == 0.0:
            continue
        p_xyk.append(p)
        xy = (x_int, y_int, y_len)
        p_xy[xy] = p_xy.get(xy, 0.0) + p
        yk = (y_int, y_len)
        p_y[yk] = p_y.get(yk, 0.0) + p
        p_x[x_int] = p_x.get(x_int, 0.0) + p
        if count > 1:
            ab_terms.append(p * math.log2(count))
    h_xyk = entropy_of_values(p_xyk)
    h_xy = entropy_of_values(p_xy.values())
    h_y = entropy_of_values(p_y.values())
    h_x = entropy_of_values(p_x.values())
    mutual_info = h_y - (h_xy - h_x)
    h_k_given_xy = h_xyk - h_xy
    h_ab_given_xyk = math.fsum(ab_terms)
    alpha = spec.alpha
    per_event = 1.0 if spec.model is Model.SIMPLE else 2.0
    h_ab = n * (binary_entropy(alpha) + per_event * alpha)
    residual = mutual_info - (h_y - h_ab + h_ab_given_xyk + h_k_given_xy)
    return DecompositionReport(
        h_y=h_y,
        h_ab=h_ab,
        h_ab_given_xyk=h_ab_given_xyk,
        h_k_given_xy=h_k_given_xy,
        mutual_info=mutual_info,
        per_bit=mutual_info / n,
        residual=residual,
        discarded_mass=table.discarded_mass,
    )


def ab_entropy_from_table(table: JointTable) -> float:
    """H(A,B) recomputed from the table (realization-level, single input).

    The realization distribution is input-independent, so the cells of any one
    input enumerate it exactly; each cell holds ``count`` equiprobable
    realizations of probability alpha^w (1-alpha)^(n-w) (2 or 4)^-w.
    """
    n = table.n
    alpha = table.spec.alpha
    payload_mass = 0.5 if table.spec.model is Model.SIMPLE else 0.25
    terms = []
    for (x_int, _, y_len, _), count in table.cells.items():
        if x_int != 0:
            continue
        w = y_len - n
        if alpha == 0.0 and w > 0:
            continue
        q = alpha**w * (1.0 - alpha) ** (n - w) * payload_mass**w
        if q > 0.0:
            terms.append(count * q * math.log2(q))
    return -math.fsum(terms)


def ambiguity_count(
    x: BitSeq, y: BitSeq, k: RunVector, spec: ChannelSpec
) -> tuple[int, list[tuple[InsertionRealization, float]]]:
    """Modified-process realizations consistent with (x, y, k).

    Returns the count and the (uniform) conditional distribution.  Only triples
    reachable by the modified process (at most one insertion event per extended
    run) are valid; inconsistent triples raise a domain error.
    """
    w = len(y) - len(x)
    if w < 0:
        raise ValueError("output shorter than input")
    matches = []
    for r, _ in enumerate_realizations(spec, len(x), max_events=min(w, len(x))):
        if r.num_flags != w:
            continue
        yy, kk = apply_realization(x, r)
        if yy != y or kk != k:
            continue
        if modified_clear_mask(x.bits, r.flags).any():
            continue  # outside the modified-process support
        matches.append(r)
    if not matches:
        raise ValueError("triple (x, y, k) is not consistent with the modified process")
    count = len(matches)
    return count, [(r, 1.0 / count) for r in matches]
