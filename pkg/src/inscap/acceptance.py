"""One-shot acceptance suite: every shipping criterion with its stated tolerance.

Each criterion function returns a CriterionResult; run_suite executes the quick
set (A1-A5, A9, A10) or additionally the large Monte Carlo checks (A6-A8).
Reference values are frozen from the published capacity-approximation data.
"""

from __future__ import annotations

import math
import os
import time
from dataclasses import dataclass

from . import estimators, oracle, series
from .core import ChannelSpec, Model

# Published capacity-approximation curve values used as numeric anchors.
REFERENCE_ALPHA1 = {
    Model.SIMPLE: 1.49010187278011,
    Model.GALLAGER: 0.413480965510892,
}
REFERENCE_CURVE = {
    (Model.SIMPLE, 0.01): 0.938462456830054,
    (Model.SIMPLE, 0.05): 0.808408688894638,
    (Model.SIMPLE, 0.10): 0.716817377789275,
    (Model.SIMPLE, 0.25): 0.622525468195028,
    (Model.GALLAGER, 0.01): 0.927696247757362,
    (Model.GALLAGER, 0.05): 0.754577643531177,
    (Model.GALLAGER, 0.10): 0.609155287062353,
    (Model.GALLAGER, 0.25): 0.353370241377723,
}


@dataclass(frozen=True)
class CriterionResult:
    name: str
    passed: bool
    detail: str
    seconds: float


def _result(name: str, started: float, passed: bool, detail: str) -> CriterionResult:
    return CriterionResult(
        name=name, passed=passed, detail=detail, seconds=time.perf_counter() - started
    )


def default_workers() -> int:
    env = os.environ.get("INSCAP_WORKERS", "")
    if env:
        return max(1, int(env))
    return min(8, os.cpu_count() or 1)


def criterion_a1() -> CriterionResult:
    """Expansion constants match the curve's alpha=1 endpoints to 1e-6."""
    t0 = time.perf_counter()
    details = []
    passed = True
    for model in Model:
        got = series.constant_G(model, 1e-8).value
        want = REFERENCE_ALPHA1[model] - 1.0
        err = abs(got - want)
        passed &= err <= 1e-6
        details.append(f"{model.value}: G={got:.9f} vs {want:.9f} (|err|={err:.2e})")
    return _result("A1", t0, passed, "; ".join(details))


def criterion_a2() -> CriterionResult:
    """Half/quarter series values match the stated anchors to 5e-4."""
    t0 = time.perf_counter()
    half_s2 = 0.5 * series.sum_S2(1e-8).value
    quarter_s3 = 0.25 * series.sum_S3(1e-8).value
    ok1 = abs(half_s2 - 1.2885) <= 5e-4
    ok2 = abs(quarter_s3 - 1.4090) <= 5e-4
    return _result(
        "A2",
        t0,
        ok1 and ok2,
        f"S2/2={half_s2:.6f} (target 1.2885), S3/4={quarter_s3:.6f} (target 1.4090)",
    )


def criterion_a3() -> CriterionResult:
    """Curve values match the published data to 1e-9 at the shared grid points."""
    t0 = time.perf_counter()
    worst = 0.0
    for (model, alpha), want in REFERENCE_CURVE.items():
        if alpha not in (0.01, 0.05, 0.10, 0.25):
            continue
        worst = max(worst, abs(series.capacity_formula(model, alpha) - want))
    return _result("A3", t0, worst <= 1e-9, f"max |err| = {worst:.3e} (tol 1e-9)")


def criterion_a4() -> CriterionResult:
    """Decomposition identity residual <= 1e-9 and closed-form H(A,B) to 1e-12."""
    t0 = time.perf_counter()
    worst_res = 0.0
    worst_ab = 0.0
    for model in Model:
        for n in range(2, 7):
            for alpha in (0.05, 0.2, 0.5):
                spec = ChannelSpec(model=model, alpha=alpha)
                rep = oracle.exact_rate(n, spec)
                worst_res = max(worst_res, abs(rep.residual))
                table = oracle.build_joint(n, spec)
                worst_ab = max(
                    worst_ab, abs(oracle.ab_entropy_from_table(table) - rep.h_ab)
                )
    passed = worst_res <= 1e-9 and worst_ab <= 1e-12
    return _result(
        "A4",
        t0,
        passed,
        f"max |residual| = {worst_res:.3e} (tol 1e-9), "
        f"max |H(A,B) table-closed| = {worst_ab:.3e} (tol 1e-12)",
    )


def criterion_a5() -> CriterionResult:
    """n=1 closed forms: per_bit = 1 (simple) and 1 - alpha (gallager) to 1e-12."""
    t0 = time.perf_counter()
    worst = 0.0
    for alpha in (0.1, 0.5, 0.9):
        rep = oracle.exact_rate(1, ChannelSpec(model=Model.SIMPLE, alpha=alpha))
        worst = max(worst, abs(rep.per_bit - 1.0))
        rep = oracle.exact_rate(1, ChannelSpec(model=Model.GALLAGER, alpha=alpha))
        worst = max(worst, abs(rep.per_bit - (1.0 - alpha)))
    return _result("A5", t0, worst <= 1e-12, f"max |err| = {worst:.3e} (tol 1e-12)")


def criterion_a6(workers: int | None = None) -> CriterionResult:
    """Pair-classified entropy contribution hits the series anchors at large n."""
    t0 = time.perf_counter()
    workers = workers or default_workers()
    targets = {
        Model.SIMPLE: 0.5 * series.sum_S2(1e-10).value,
        Model.GALLAGER: 0.25 * series.sum_S3(1e-10).value,
    }
    details = []
    passed = True
    for model in Model:
        spec = ChannelSpec(model=model, alpha=1e-3)
        tally = estimators.estimate_hk_contribution(
            spec, n=10_000_000, trials=10, seed=20260823, workers=workers
        )
        target = targets[model]
        rel = abs(tally.estimate - target) / target
        sig = abs(tally.estimate - target) / tally.std_error if tally.std_error else 0.0
        passed &= rel <= 0.02 and sig <= 3.0
        details.append(
            f"{model.value}: {tally.estimate:.4f} vs {target:.4f} "
            f"(rel {rel:.3%}, {sig:.2f} SE)"
        )
    return _result("A6", t0, passed, "; ".join(details))


def criterion_a7(workers: int | None = None) -> CriterionResult:
    """Modified-process delta mass matches the closed form at alpha = 0.05."""
    t0 = time.perf_counter()
    workers = workers or default_workers()
    spec = ChannelSpec(model=Model.SIMPLE, alpha=0.05)
    rep = estimators.estimate_zv_pmf(
        spec, n=250_000, trials=32, seed=20260823, workers=workers
    )
    want = estimators.expected_z1_probability(0.05)
    sig = abs(rep.p_z1 - want) / rep.se_z1 if rep.se_z1 else 0.0
    m0, m1 = rep.pmf["z1_v0"], rep.pmf["z1_v1"]
    se_pair = math.hypot(rep.mass_se["z1_v0"], rep.mass_se["z1_v1"])
    sig_pair = abs(m0 - m1) / se_pair if se_pair else 0.0
    passed = sig <= 3.0 and sig_pair <= 3.0
    return _result(
        "A7",
        t0,
        passed,
        f"P(z=1)={rep.p_z1:.6f} vs {want:.6f} ({sig:.2f} SE); "
        f"v-split {m0:.6f}/{m1:.6f} ({sig_pair:.2f} SE)",
    )


def criterion_a8(workers: int | None = None) -> CriterionResult:
    """Capped sampler: flip density within the certified bound, no run > l_star."""
    t0 = time.perf_counter()
    workers = workers or default_workers()
    rep = estimators.estimate_capped_flip_density(
        l_star=10, n=100_000, trials=100, seed=20260823, workers=workers
    )
    bound = estimators.capped_flip_density_bound(10)
    ok_density = rep.mean <= bound + 3.0 * rep.std_error
    ok_runs = rep.extras["max_run"] <= 10
    return _result(
        "A8",
        t0,
        ok_density and ok_runs,
        f"density {rep.mean:.6e} <= bound {bound:.6e} + 3*{rep.std_error:.2e}; "
        f"max run {rep.extras['max_run']} (limit 10)",
    )


def criterion_a9() -> CriterionResult:
    """Truncation error of the oracle stays inside the discarded-mass budget."""
    t0 = time.perf_counter()
    spec = ChannelSpec(model=Model.SIMPLE, alpha=0.01)
    full = oracle.exact_rate(8, spec)
    trunc = oracle.exact_rate(8, spec, max_events=2)
    delta = abs(full.per_bit - trunc.per_bit)
    budget = trunc.discarded_mass * (2 * 8 + 1)
    return _result(
        "A9",
        t0,
        delta <= budget,
        f"|delta per_bit| = {delta:.3e} <= {budget:.3e} "
        f"(discarded mass {trunc.discarded_mass:.3e})",
    )


def criterion_a10() -> CriterionResult:
    """Every estimator is worker-count invariant (exact tally equality)."""
    t0 = time.perf_counter()
    seed = 7
    checks = []
    simple = ChannelSpec(model=Model.SIMPLE, alpha=0.01)
    gall = ChannelSpec(model=Model.GALLAGER, alpha=0.01)
    for w in (1, 3):
        checks.append(
            (
                estimators.estimate_hk_contribution(
                    simple, n=200_000, trials=4, seed=seed, workers=w
                ).to_dict(),
                estimators.estimate_hk_contribution(
                    gall, n=200_000, trials=4, seed=seed, workers=w
                ).to_dict(),
                estimators.estimate_zv_pmf(
                    simple, n=20_000, trials=4, seed=seed, workers=w
                ).to_dict(),
                estimators.estimate_ab_ambiguity(
                    simple, n=200_000, trials=4, seed=seed, workers=w
                ).to_dict(),
                estimators.estimate_run_stats(
                    "length_biased", samples=100_000, seed=seed, workers=w
                ).to_dict(),
                estimators.estimate_capped_flip_density(
                    l_star=5, n=50_000, trials=4, seed=seed, workers=w
                ).to_dict(),
            )
        )
    passed = checks[0] == checks[1]
    return _result(
        "A10", t0, passed, "worker counts 1 and 3 produced identical reports"
        if passed else "worker counts 1 and 3 disagreed"
    )


QUICK = [
    criterion_a1,
    criterion_a2,
    criterion_a3,
    criterion_a4,
    criterion_a5,
    criterion_a9,
    criterion_a10,
]
FULL_EXTRA = [criterion_a6, criterion_a7, criterion_a8]


def run_suite(full: bool = False, workers: int | None = None) -> list[CriterionResult]:
    results = [fn() for fn in QUICK]
    if full:
        results.extend(fn(workers) for fn in FULL_EXTRA)
    return sorted(results, key=lambda r: r.name)
