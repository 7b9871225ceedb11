"""Large-n Monte Carlo estimators for the run-level expansion quantities.

All estimators are deterministic functions of (seed, parameters): trials draw
their generators from per-trial children of a single SeedSequence, and trial
results are merged in trial order, so the worker count never changes a result.

Edge handling: the first and last runs of every simulated block are excluded
from tallies, approximating a doubly-infinite stationary input with finite
blocks.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .channels import (
    modified_clear_mask,
    perturbed_clear_mask,
)
from .core import (
    BitSeq,
    ChannelSpec,
    Model,
    UsageError,
    binary_entropy_vec,
)

# ---------------------------------------------------------------------------
# deterministic trial sharding


def _invoke(task):
    fn, args, child_seed = task
    return fn(*args, np.random.default_rng(child_seed))


def _run_trials(fn, args: tuple, seed: int, trials: int, workers: int) -> list:
    """Run ``fn(*args, rng)`` once per trial with split seeds, in trial order.

    The per-trial generators depend only on (seed, trial index), and results
    are collected in trial order, so any worker count yields identical output.
    """
    if trials < 1:
        raise UsageError("trials must be >= 1")
    children = np.random.SeedSequence(seed).spawn(trials)
    tasks = [(fn, args, child) for child in children]
    if workers <= 1 or trials == 1:
        return [_invoke(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as ex:
        return list(ex.map(_invoke, tasks, chunksize=max(1, trials // workers)))


def _mean_and_se(values: list[float]) -> tuple[float, float]:
    arr = np.asarray(values, dtype=np.float64)
    mean = float(arr.mean())
    if arr.size < 2:
        return mean, 0.0
    return mean, float(arr.std(ddof=1) / math.sqrt(arr.size))


# ---------------------------------------------------------------------------
# report types


@dataclass(frozen=True)
class RateEstimate:
    mean: float
    std_error: float
    trials: int
    seed: int
    extras: dict = field(default_factory=dict)

    def to_dict(self) -> dict:
        out = {
            "estimate": self.mean,
            "std_error": self.std_error,
            "trials": self.trials,
            "seed": self.seed,
        }
        out.update(self.extras)
        return out


@dataclass(frozen=True)
class RunStats:
    """Moments of the run-length law L0, with standard errors."""

    law: str  # "per_run" or "length_biased"
    samples: int
    e_log_l0: float
    se_log_l0: float
    e_l0: float
    se_l0: float
    e_l0_log_l0: float
    se_l0_log_l0: float
    seed: int

    def to_dict(self) -> dict:
        return {
            "law": self.law,
            "samples": self.samples,
            "e_log_l0": self.e_log_l0,
            "se_log_l0": self.se_log_l0,
            "e_l0": self.e_l0,
            "se_l0": self.se_l0,
            "e_l0_log_l0": self.e_l0_log_l0,
            "se_l0_log_l0": self.se_l0_log_l0,
            "seed": self.seed,
        }


@dataclass(frozen=True)
class CaseTally:
    """Classified run-pair events with the accumulated entropy contribution.

    ``estimate`` is the contribution normalized per (run pair x alpha); this is
    the normalization under which the simple-channel value is ~1.2885 and the
    gallager value is ~1.4090.  ``estimate_per_bit`` divides by (bits x alpha)
    instead, which is the normalization the enumeration oracle's
    h_k_given_xy/(n*alpha) converges to (half the per-pair value, since
    Bernoulli(1/2) inputs average two bits per run).
    """

    model: Model
    alpha: float
    n: int
    trials: int
    seed: int
    counts: dict
    contribution: float
    pairs: int
    bits: int
    estimate: float
    std_error: float
    estimate_per_bit: float

    def to_dict(self) -> dict:
        out = {
            "estimate": self.estimate,
            "std_error": self.std_error,
            "estimate_per_bit": self.estimate_per_bit,
            "contribution": self.contribution,
            "pairs": self.pairs,
            "bits": self.bits,
            "normalizer": "pairs*alpha",
            "trials": self.trials,
            "seed": self.seed,
            "model": self.model.value,
            "alpha": self.alpha,
            "n": self.n,
        }
        out.update(self.counts)
        return out


@dataclass(frozen=True)
class ZvPmf:
    """Empirical per-position PMF of the modified-process delta (z, v)."""

    model: Model
    alpha: float
    pmf: dict
    positions: int
    p_z1: float
    se_z1: float
    mass_se: dict
    trials: int
    seed: int

    def to_dict(self) -> dict:
        out = {
            "positions": self.positions,
            "p_z1": self.p_z1,
            "se_z1": self.se_z1,
            "trials": self.trials,
            "seed": self.seed,
            "model": self.model.value,
            "alpha": self.alpha,
        }
        for key, val in self.pmf.items():
            out[key] = val
            out["se_" + key] = self.mass_se[key]
        return out


# ---------------------------------------------------------------------------
# run statistics


def _run_stats_shard(law: str, count: int, rng: np.random.Generator) -> dict:
    if law == "per_run":
        lengths = rng.geometric(0.5, size=count).astype(np.float64)
    else:
        # run covering a uniformly random position of a Bernoulli(1/2) block
        block_len = max(1024, count)
        bits = rng.integers(0, 2, size=block_len, dtype=np.uint8)
        change = np.empty(block_len, dtype=bool)
        change[0] = True
        np.not_equal(bits[1:], bits[:-1], out=change[1:])
        rid = np.cumsum(change) - 1
        num_runs = int(rid[-1]) + 1
        run_len = np.bincount(rid, minlength=num_runs)
        pos = rng.integers(0, block_len, size=count)
        pos_rid = rid[pos]
        interior = (pos_rid > 0) & (pos_rid < num_runs - 1)
        lengths = run_len[pos_rid[interior]].astype(np.float64)
    logs = np.log2(lengths)
    return {
        "n": lengths.size,
        "sum_log": float(logs.sum()),
        "sum_log2": float((logs * logs).sum()),
        "sum_l": float(lengths.sum()),
        "sum_l2": float((lengths * lengths).sum()),
        "sum_llog": float((lengths * logs).sum()),
        "sum_llog2": float(((lengths * logs) ** 2).sum()),
    }


def estimate_run_stats(
    law: str, samples: int, seed: int = 0, workers: int = 1, shards: int = 100
) -> RunStats:
    """Monte Carlo moments of L0 under the per-run or length-biased law."""
    if law not in ("per_run", "length_biased"):
        raise UsageError(f"unknown run-length law {law!r}")
    if samples < 1:
        raise UsageError("samples must be >= 1")
    shards = min(shards, samples)
    per_shard = -(-samples // shards)  # ceil; length-biased shards may lose a few
    results = _run_trials(_run_stats_shard, (law, per_shard), seed, shards, workers)
    merged = {key: 0.0 for key in results[0]}
    for res in results:
        for key in merged:
            merged[key] += res[key]
    count = merged["n"]

    def moment(s1: str, s2: str) -> tuple[float, float]:
        mean = merged[s1] / count
        var = max(0.0, merged[s2] / count - mean * mean)
        return mean, math.sqrt(var / count)

    e_log, se_log = moment("sum_log", "sum_log2")
    e_l, se_l = moment("sum_l", "sum_l2")
    e_llog, se_llog = moment("sum_llog", "sum_llog2")
    return RunStats(
        law=law,
        samples=int(count),
        e_log_l0=e_log,
        se_log_l0=se_log,
        e_l0=e_l,
        se_l0=se_l,
        e_l0_log_l0=e_llog,
        se_l0_log_l0=se_llog,
        seed=seed,
    )


# ---------------------------------------------------------------------------
# shared per-trial channel simulation helpers


def _sample_block(alpha: float, n: int, gallager: bool, rng: np.random.Generator):
    x = rng.integers(0, 2, size=n, dtype=np.uint8)
    flags = (rng.random(n) < alpha).astype(np.uint8)
    if gallager:
        payload = rng.integers(0, 2, size=(n, 2), dtype=np.uint8)
    else:
        payload = rng.integers(0, 2, size=n, dtype=np.uint8)
    payload[flags == 0] = 0
    return x, flags, payload


def _geometry(x: np.ndarray):
    change = np.empty(x.size, dtype=bool)
    change[0] = True
    np.not_equal(x[1:], x[:-1], out=change[1:])
    rid = np.cumsum(change) - 1
    num_runs = int(rid[-1]) + 1
    run_len = np.bincount(rid, minlength=num_runs)
    run_start = np.nonzero(change)[0]
    run_last = run_start + run_len - 1
    return rid, num_runs, run_len, run_start, run_last


# ---------------------------------------------------------------------------
# (z, v) delta PMF of the modified process


def _zv_trial(alpha: float, n: int, gallager: bool, rng: np.random.Generator) -> dict:
    x, flags, payload = _sample_block(alpha, n, gallager, rng)
    clear = modified_clear_mask(x, flags)
    z = np.where(clear, 1, 0).astype(np.uint8)
    rid, num_runs, _, _, _ = _geometry(x)
    interior = (rid > 0) & (rid < num_runs - 1)
    zi = z[interior]
    out = {"positions": int(interior.sum())}
    if gallager:
        v = payload[interior]
        z1 = zi == 1
        out["z0"] = int((~z1).sum())
        for v1 in (0, 1):
            for v2 in (0, 1):
                out[f"z1_v{v1}{v2}"] = int(
                    (z1 & (v[:, 0] == v1) & (v[:, 1] == v2)).sum()
                )
    else:
        v = payload[interior]
        z1 = zi == 1
        out["z0"] = int((~z1).sum())
        out["z1_v0"] = int((z1 & (v == 0)).sum())
        out["z1_v1"] = int((z1 & (v == 1)).sum())
    return out


def estimate_zv_pmf(
    spec: ChannelSpec, n: int, trials: int, seed: int = 0, workers: int = 1
) -> ZvPmf:
    """Per-position PMF of the modified-process delta, away from block edges."""
    if n < 1000:
        raise UsageError("n must be >= 1000 to suppress edge effects")
    gallager = spec.model is Model.GALLAGER
    results = _run_trials(_zv_trial, (spec.alpha, n, gallager), seed, trials, workers)
    keys = [k for k in results[0] if k != "positions"]
    totals = {k: sum(r[k] for r in results) for k in keys}
    positions = sum(r["positions"] for r in results)
    pmf = {k: totals[k] / positions for k in keys}
    per_trial = {
        k: [r[k] / r["positions"] for r in results] for k in keys
    }
    mass_se = {k: _mean_and_se(per_trial[k])[1] for k in keys}
    z1_trials = [
        sum(r[k] for k in keys if k != "z0") / r["positions"] for r in results
    ]
    p_z1, se_z1 = _mean_and_se(z1_trials)
    p_z1 = sum(totals[k] for k in keys if k != "z0") / positions
    return ZvPmf(
        model=spec.model,
        alpha=spec.alpha,
        pmf=pmf,
        positions=positions,
        p_z1=p_z1,
        se_z1=se_z1,
        mass_se=mass_se,
        trials=trials,
        seed=seed,
    )


def expected_z1_probability(alpha: float, eps: float = 1e-14) -> float:
    """alpha * (1 - E[(1-alpha)^(L0+1)]) under the length-biased law l*2^(-l-1)."""
    total = 0.0
    l = 1
    while True:
        term = l * 2.0 ** (-l - 1) * (1.0 - alpha) ** (l + 1)
        total += term
        # remaining mass of the length-biased law alone bounds the tail
        if (l + 2) * 2.0 ** (-l - 1) < eps:
            return alpha * (1.0 - total)
        l += 1


# ---------------------------------------------------------------------------
# case-classified H(K|X,Y) contribution (perturbed process)


def _hk_trial(
    alpha: float, n: int, gallager: bool, include_edges: bool, rng: np.random.Generator
) -> dict:
    x, flags, payload = _sample_block(alpha, n, gallager, rng)
    rid, num_runs, run_len, run_start, run_last = _geometry(x)
    clear = perturbed_clear_mask(x, flags)
    surv = (flags == 1) & ~clear
    spos = np.nonzero(surv)[0]
    srun = rid[spos]
    pol = x[run_start]

    # per-run event code from its surviving insertion (at most one per
    # interior run: two flags in one run always trigger the pair to the right)
    code = np.zeros(num_runs, dtype=np.int8)
    at_last = spos == run_last[srun]
    if gallager:
        q = pol[srun]
        c1 = payload[spos, 0]
        c2 = payload[spos, 1]
        at_first = spos == run_start[srun]
        grow = (c1 == q) & (c2 == q)  # lengthens own run image
        join_next = (c1 == q) & (c2 != q) & at_last  # merges into next run
        join_prev = (c1 != q) & (c2 == q) & at_first  # merges into previous run
        code[srun[grow]] = 1
        code[srun[join_next]] = 3
        code[srun[join_prev]] = 4
        other = ~(grow | join_next | join_prev)
        code[srun[other]] = 2  # shrinks / splits own run image
    else:
        same = payload[spos] == pol[srun]
        code[srun[same]] = 1  # lengthens own run image
        code[srun[~same & at_last]] = 3  # merges into next run
        code[srun[~same & ~at_last]] = 2  # splits own run image
    # classify consecutive run pairs (j, j+1)
    if include_edges:
        j = np.arange(0, num_runs - 1)
    else:
        j = np.arange(1, max(1, num_runs - 2))
    cl = code[j]
    cr = code[j + 1]
    out: dict = {"pairs": int(j.size), "bits": int(run_len[1:-1].sum()) if not include_edges else n}
    if gallager:
        v3 = (cl == 1) | (cr == 4)
        v4 = (cl == 3) | (cr == 1)
        v2 = (cl == 2) | (cr == 2)
        ambiguous = v3 | v4
        a = run_len[j[ambiguous]].astype(np.float64)
        b = run_len[j[ambiguous] + 1].astype(np.float64)
        contrib = binary_entropy_vec((a + 1.0) / (a + b + 2.0)).sum() if a.size else 0.0
        out.update(
            case_v1=int(j.size - int(v2.sum()) - int(ambiguous.sum())),
            case_v2=int(v2.sum()),
            case_v3=int(v3.sum()),
            case_v4=int(v4.sum()),
            contribution=float(contrib),
        )
        # five per-run replacement patterns (interior runs, perturbed process)
        run_sel = (srun > 0) & (srun < num_runs - 1)
        qq = q[run_sel]
        p1 = payload[spos[run_sel], 0]
        p2 = payload[spos[run_sel], 1]
        interior_runs = num_runs - 2
        out["replace_same_same"] = int(((p1 == qq) & (p2 == qq)).sum())
        out["replace_same_diff"] = int(((p1 == qq) & (p2 != qq)).sum())
        out["replace_diff_same"] = int(((p1 != qq) & (p2 == qq)).sum())
        out["replace_diff_diff"] = int(((p1 != qq) & (p2 != qq)).sum())
        out["replace_none"] = int(interior_runs - run_sel.sum())
    else:
        case4 = (cl == 3) | (cr == 1)
        case3 = cl == 1
        case2 = (cl == 2) | (cr == 2)
        b = run_len[j[case4] + 1].astype(np.float64)
        contrib = binary_entropy_vec(1.0 / (b + 1.0)).sum() if b.size else 0.0
        out.update(
            case_1=int(j.size - int(case2.sum()) - int(case3.sum()) - int(case4.sum())),
            case_2=int(case2.sum()),
            case_3=int(case3.sum()),
            case_4=int(case4.sum()),
            contribution=float(contrib),
        )
    return out


def estimate_hk_contribution(
    spec: ChannelSpec,
    n: int,
    trials: int,
    seed: int = 0,
    workers: int = 1,
    include_edges: bool = False,
) -> CaseTally:
    """Case-classified marker-vector ambiguity of the perturbed process.

    Simulates transmissions, applies the perturbed-process reversal, classifies
    every consecutive run pair, and accumulates the conditional-entropy term of
    each ambiguous pair (h(1/(b+1)) for simple, h((a+1)/(a+b+2)) for gallager).
    """
    alpha = spec.alpha
    if alpha == 0.0:
        counts = (
            {"case_1": 0, "case_2": 0, "case_3": 0, "case_4": 0}
            if spec.model is Model.SIMPLE
            else {"case_v1": 0, "case_v2": 0, "case_v3": 0, "case_v4": 0}
        )
        return CaseTally(
            model=spec.model, alpha=alpha, n=n, trials=trials, seed=seed,
            counts=counts, contribution=0.0, pairs=0, bits=0,
            estimate=0.0, std_error=0.0, estimate_per_bit=0.0,
        )
    gallager = spec.model is Model.GALLAGER
    results = _run_trials(
        _hk_trial, (alpha, n, gallager, include_edges), seed, trials, workers
    )
    count_keys = [
        k for k in results[0] if k not in ("pairs", "bits", "contribution")
    ]
    counts = {k: sum(r[k] for r in results) for k in count_keys}
    contribution = math.fsum(r["contribution"] for r in results)
    pairs = sum(r["pairs"] for r in results)
    bits = sum(r["bits"] for r in results)
    per_trial = [
        r["contribution"] / (r["pairs"] * alpha) if r["pairs"] else 0.0
        for r in results
    ]
    _, std_error = _mean_and_se(per_trial)
    return CaseTally(
        model=spec.model,
        alpha=alpha,
        n=n,
        trials=trials,
        seed=seed,
        counts=counts,
        contribution=contribution,
        pairs=pairs,
        bits=bits,
        estimate=contribution / (pairs * alpha) if pairs else 0.0,
        std_error=std_error,
        estimate_per_bit=contribution / (bits * alpha) if bits else 0.0,
    )


# ---------------------------------------------------------------------------
# surviving-insertion (A, B) ambiguity of the modified process


def _ab_trial(alpha: float, n: int, gallager: bool, rng: np.random.Generator) -> dict:
    x, flags, payload = _sample_block(alpha, n, gallager, rng)
    rid, num_runs, run_len, run_start, run_last = _geometry(x)
    clear = modified_clear_mask(x, flags)
    surv = (flags == 1) & ~clear
    spos = np.nonzero(surv)[0]
    srun = rid[spos]
    interior = (srun > 0) & (srun < num_runs - 1)
    spos = spos[interior]
    srun = srun[interior]
    pol = x[run_start]
    lengths = run_len[srun].astype(np.float64)
    if gallager:
        q = pol[srun]
        c1 = payload[spos, 0]
        c2 = payload[spos, 1]
        grow = (c1 == q) & (c2 == q)
        cross = (c1 != q) & (c2 == q) & (spos > run_start[srun])
        contrib = float(np.log2(lengths[grow]).sum()) + float(cross.sum())
    else:
        same = payload[spos] == pol[srun]
        contrib = float(np.log2(lengths[same]).sum())
    interior_bits = int(run_len[1:-1].sum())
    return {"contribution": contrib, "bits": interior_bits, "events": int(spos.size)}


def estimate_ab_ambiguity(
    spec: ChannelSpec, n: int, trials: int, seed: int = 0, workers: int = 1
) -> RateEstimate:
    """Per-(bit x alpha) payload ambiguity of surviving modified-process insertions.

    Each surviving insertion whose payload is indistinguishable across the
    positions of its run contributes log2 of its ambiguity count: log2(l) for a
    run-lengthening insertion; for gallager additionally 1 bit for a
    cross-pattern replacement away from the run's first position.
    """
    alpha = spec.alpha
    if alpha == 0.0:
        return RateEstimate(mean=0.0, std_error=0.0, trials=trials, seed=seed,
                            extras={"events": 0})
    gallager = spec.model is Model.GALLAGER
    results = _run_trials(_ab_trial, (alpha, n, gallager), seed, trials, workers)
    per_trial = [r["contribution"] / (r["bits"] * alpha) for r in results]
    _, se = _mean_and_se(per_trial)
    total_bits = sum(r["bits"] for r in results)
    mean = math.fsum(r["contribution"] for r in results) / (total_bits * alpha)
    return RateEstimate(
        mean=mean,
        std_error=se,
        trials=trials,
        seed=seed,
        extras={"events": sum(r["events"] for r in results)},
    )


# ---------------------------------------------------------------------------
# capped-run input sampler


def sample_capped_process(l_star: int, n: int, rng) -> BitSeq:
    """Bernoulli(1/2) bits with every would-be run of length l_star+1 flipped."""
    if l_star < 1:
        raise UsageError("l_star must be >= 1")
    if n < 1:
        raise UsageError("n must be >= 1")
    gen = rng if isinstance(rng, np.random.Generator) else np.random.default_rng(rng)
    u = gen.integers(0, 2, size=n, dtype=np.uint8)
    out = np.empty(n, dtype=np.uint8)
    kernels.capped_fill(u, out, l_star)
    return BitSeq(out)


def _capped_trial(l_star: int, n: int, rng: np.random.Generator) -> dict:
    u = rng.integers(0, 2, size=n, dtype=np.uint8)
    out = np.empty(n, dtype=np.uint8)
    flips = kernels.capped_fill(u, out, l_star)
    change = np.empty(n, dtype=bool)
    change[0] = True
    np.not_equal(out[1:], out[:-1], out=change[1:])
    rid = np.cumsum(change) - 1
    max_run = int(np.bincount(rid).max())
    return {"flips": int(flips), "bits": n, "max_run": max_run}


def estimate_capped_flip_density(
    l_star: int, n: int, trials: int, seed: int = 0, workers: int = 1
) -> RateEstimate:
    """Empirical flip density of the capped-run sampler, plus the max run seen."""
    results = _run_trials(_capped_trial, (l_star, n), seed, trials, workers)
    per_trial = [r["flips"] / r["bits"] for r in results]
    _, se = _mean_and_se(per_trial)
    total_bits = sum(r["bits"] for r in results)
    mean = sum(r["flips"] for r in results) / total_bits
    return RateEstimate(
        mean=mean,
        std_error=se,
        trials=trials,
        seed=seed,
        extras={
            "max_run": max(r["max_run"] for r in results),
            "l_star": l_star,
            "flip_density_bound": capped_flip_density_bound(l_star),
        },
    )


def capped_flip_density_bound(l_star: int) -> float:
    """P(L0 > l_star) / l_star under the length-biased law l*2^(-l-1)."""
    tail = (l_star + 2) * 2.0 ** (-l_star - 1)
    return tail / l_star
