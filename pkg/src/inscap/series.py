"""Certified summation of the capacity-expansion series and the closed-form curve.

The small-alpha capacity expansion for both insertion channels is

    C(alpha) = 1 + alpha*log2(alpha) + G*alpha + o(alpha)

with a model-specific constant G assembled from three non-negative series:

    S1 = sum_{l>=1}   l * 2^(-l-1) * log2(l)
    S2 = sum_{a,b>=1} (b+1)     * 2^(-a-b) * h(1/(b+1))
    S3 = sum_{a,b>=1} (a+b+2)   * 2^(-a-b) * h((a+1)/(a+b+2))

    G_simple   = -log2(e) + S1/2 + S2/2
    G_gallager = -log2(e) - 7/8 + S1/4 + S3/4

Every partial sum carries a certified tail bound, so the true limit of each
series lies in [value, value + tail_bound].
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

from .core import LOG2E, ChannelSpec, Model, binary_entropy


@dataclass(frozen=True)
class SeriesValue:
    """A partial series value with a certified remainder bound."""

    value: float
    terms_used: int
    tail_bound: float

    def __post_init__(self):
        if self.tail_bound < 0:
            raise ValueError("tail_bound must be non-negative")


def _s1_term(l: int) -> float:
    return l * math.log2(l) * 2.0 ** (-l - 1)


def sum_S1(eps: float) -> SeriesValue:
    """S1 = sum_{l>=1} l * 2^(-l-1) * log2(l), tail-certified to eps.

    For l >= 4 the term ratio t_{l+1}/t_l = (1/2)(1+1/l)(log2(l+1)/log2(l))
    is below 1 and decreasing, so the tail after L is bounded by the geometric
    majorant t_{L+1} / (1 - ratio(L+1)).
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    terms = [0.0, _s1_term(2), _s1_term(3)]  # l = 1 contributes 0
    l = 3
    while True:
        nxt = _s1_term(l + 1)
        ratio = 0.5 * (1.0 + 1.0 / (l + 1)) * (math.log2(l + 2) / math.log2(l + 1))
        tail = nxt / (1.0 - ratio)
        if tail <= eps:
            return SeriesValue(value=math.fsum(terms), terms_used=l, tail_bound=tail)
        terms.append(nxt)
        l += 1


def sum_S2(eps: float) -> SeriesValue:
    """S2 = sum_{a,b>=1} (b+1) 2^(-a-b) h(1/(b+1)); the a-sum collapses to 1.

    Tail after b = L is bounded by sum_{b>L} (b+1) 2^(-b) = (L+3) 2^(-L)
    since h(.) <= 1.
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    terms = []
    b = 0
    while True:
        tail = (b + 3) * 2.0 ** (-b)
        if b >= 1 and tail <= eps:
            return SeriesValue(value=math.fsum(terms), terms_used=b, tail_bound=tail)
        b += 1
        terms.append((b + 1) * 2.0 ** (-b) * binary_entropy(1.0 / (b + 1)))


def sum_S3(eps: float) -> SeriesValue:
    """S3 = sum_{a,b>=1} (a+b+2) 2^(-a-b) h((a+1)/(a+b+2)), swept by diagonals.

    The diagonal a+b = s contributes at most (s-1)(s+2) 2^(-s) (h <= 1), so the
    tail beyond s = S is bounded by the closed form (S^2 + 5S + 6) 2^(-S).
    """
    if eps <= 0:
        raise ValueError("eps must be > 0")
    terms = []
    s = 1
    while True:
        tail = (s * s + 5.0 * s + 6.0) * 2.0 ** (-s)
        if s >= 2 and tail <= eps:
            return SeriesValue(value=math.fsum(terms), terms_used=s, tail_bound=tail)
        s += 1
        weight = (s + 2) * 2.0 ** (-s)
        for a in range(1, s):
            terms.append(weight * binary_entropy((a + 1) / (s + 2)))


def constant_G(model: Model | str, eps: float) -> SeriesValue:
    """The linear-term constant of the capacity expansion for the given model."""
    if eps <= 0:
        raise ValueError("eps must be > 0")
    model = Model.parse(model)
    s1 = sum_S1(eps)
    if model is Model.SIMPLE:
        s2 = sum_S2(eps)
        return SeriesValue(
            value=-LOG2E + 0.5 * s1.value + 0.5 * s2.value,
            terms_used=s1.terms_used + s2.terms_used,
            tail_bound=0.5 * s1.tail_bound + 0.5 * s2.tail_bound,
        )
    s3 = sum_S3(eps)
    return SeriesValue(
        value=-LOG2E - 7.0 / 8.0 + 0.25 * s1.value + 0.25 * s3.value,
        terms_used=s1.terms_used + s3.terms_used,
        tail_bound=0.25 * s1.tail_bound + 0.25 * s3.tail_bound,
    )


@lru_cache(maxsize=None)
def _g_value(model: Model) -> float:
    return constant_G(model, 1e-13).value


def capacity_formula(model: Model | str, alpha: float) -> float:
    """C(alpha) = 1 + alpha*log2(alpha) + G*alpha, with 0*log2(0) := 0."""
    if not (0.0 <= alpha <= 1.0):
        raise ValueError(f"alpha must lie in [0,1], got {alpha}")
    model = Model.parse(model)
    xlogx = 0.0 if alpha == 0.0 else alpha * math.log2(alpha)
    return 1.0 + xlogx + _g_value(model) * alpha


def capacity_approx(spec: ChannelSpec) -> float:
    """Capacity expansion evaluated at the spec's model and alpha."""
    return capacity_formula(spec.model, spec.alpha)


def curve(
    models: Iterable[Model | str], alpha_grid: Sequence[float]
) -> list[tuple[float, str, float]]:
    """One (alpha, model, value) row per grid point and model."""
    parsed = [Model.parse(m) for m in models]
    rows = []
    for model in parsed:
        for alpha in alpha_grid:
            rows.append((float(alpha), model.value, capacity_formula(model, alpha)))
    return rows


def curve_to_csv(rows: Iterable[tuple[float, str, float]]) -> str:
    """Serialize curve rows as CSV with 15 significant digits."""
    lines = ["alpha,model,capacity_approx"]
    for alpha, model, value in rows:
        lines.append(f"{alpha:.15g},{model},{value:.15g}")
    return "\n".join(lines) + "\n"
