import math

import numpy as np
import pytest

from inscap.core import ChannelSpec, UsageError, runs_of
from inscap import estimators as est
from inscap import oracle, series

SIMPLE_SMALL = ChannelSpec(model="simple", alpha=0.01)
GALLAGER_SMALL = ChannelSpec(model="gallager", alpha=0.01)


class TestRunStats:
    def test_per_run_mean(self):
        rs = est.estimate_run_stats("per_run", 200_000, seed=1)
        assert abs(rs.e_l0 - 2.0) <= 3 * rs.se_l0

    def test_length_biased_log_moment(self):
        rs = est.estimate_run_stats("length_biased", 400_000, seed=2)
        target = series.sum_S1(1e-10).value
        assert abs(rs.e_log_l0 - target) <= 3 * rs.se_log_l0

    def test_length_biased_mean(self):
        rs = est.estimate_run_stats("length_biased", 400_000, seed=3)
        assert abs(rs.e_l0 - 3.0) <= 3 * rs.se_l0

    def test_minimum_run_length(self):
        rs = est.estimate_run_stats("per_run", 10_000, seed=4)
        assert rs.e_l0 >= 1.0

    def test_unknown_law(self):
        with pytest.raises(UsageError):
            est.estimate_run_stats("stationary", 100)


class TestZvPmf:
    def test_alpha_zero(self):
        rep = est.estimate_zv_pmf(ChannelSpec(model="simple", alpha=0.0),
                                  n=5000, trials=2, seed=0)
        assert rep.pmf["z0"] == 1.0
        assert rep.p_z1 == 0.0

    def test_masses_sum_to_one(self):
        rep = est.estimate_zv_pmf(ChannelSpec(model="simple", alpha=0.05),
                                  n=20_000, trials=4, seed=5)
        assert math.fsum(rep.pmf.values()) == pytest.approx(1.0, abs=1e-12)

    def test_z1_matches_closed_form(self):
        rep = est.estimate_zv_pmf(ChannelSpec(model="simple", alpha=0.05),
                                  n=100_000, trials=12, seed=6)
        want = est.expected_z1_probability(0.05)
        assert abs(rep.p_z1 - want) <= 3 * rep.se_z1

    def test_v_split_balanced(self):
        rep = est.estimate_zv_pmf(ChannelSpec(model="simple", alpha=0.05),
                                  n=100_000, trials=12, seed=7)
        se = math.hypot(rep.mass_se["z1_v0"], rep.mass_se["z1_v1"])
        assert abs(rep.pmf["z1_v0"] - rep.pmf["z1_v1"]) <= 3 * se

    def test_gallager_outcome_keys(self):
        rep = est.estimate_zv_pmf(ChannelSpec(model="gallager", alpha=0.05),
                                  n=20_000, trials=2, seed=8)
        assert set(rep.pmf) == {"z0", "z1_v00", "z1_v01", "z1_v10", "z1_v11"}

    def test_edge_effect_guard(self):
        with pytest.raises(UsageError):
            est.estimate_zv_pmf(SIMPLE_SMALL, n=10, trials=1, seed=0)


class TestHkContribution:
    def test_alpha_zero(self):
        tally = est.estimate_hk_contribution(
            ChannelSpec(model="simple", alpha=0.0), n=1000, trials=1, seed=0
        )
        assert tally.estimate == 0.0
        assert tally.contribution == 0.0

    def test_simple_target(self):
        spec = ChannelSpec(model="simple", alpha=1e-3)
        tally = est.estimate_hk_contribution(spec, n=1_000_000, trials=8, seed=9,
                                             workers=2)
        target = 0.5 * series.sum_S2(1e-10).value
        assert abs(tally.estimate - target) <= max(4 * tally.std_error, 0.03 * target)

    def test_gallager_target(self):
        spec = ChannelSpec(model="gallager", alpha=1e-3)
        tally = est.estimate_hk_contribution(spec, n=1_000_000, trials=8, seed=10,
                                             workers=2)
        target = 0.25 * series.sum_S3(1e-10).value
        assert abs(tally.estimate - target) <= max(4 * tally.std_error, 0.03 * target)

    def test_counts_cover_all_pairs(self):
        tally = est.estimate_hk_contribution(SIMPLE_SMALL, n=100_000, trials=3, seed=11)
        assert sum(tally.counts[f"case_{i}"] for i in range(1, 5)) == tally.pairs
        assert tally.contribution >= 0.0

    def test_gallager_counts_cover_all_pairs(self):
        tally = est.estimate_hk_contribution(GALLAGER_SMALL, n=100_000, trials=3, seed=12)
        assert sum(tally.counts[f"case_v{i}"] for i in range(1, 5)) == tally.pairs

    def test_oracle_overlap_regime(self):
        # the per-bit normalized tally should approximate the oracle's exact
        # H(K|X,Y)/(n*alpha); the pairwise proxy carries an O(n*alpha) bias,
        # so allow 3 SE plus a 10% modeling slack
        spec = ChannelSpec(model="simple", alpha=0.01)
        rep = oracle.exact_rate(10, spec, max_events=2)
        want = rep.h_k_given_xy / (10 * 0.01)
        tally = est.estimate_hk_contribution(spec, n=10, trials=40_000, seed=13,
                                             workers=2, include_edges=True)
        se_per_bit = tally.std_error * tally.pairs / tally.bits
        assert abs(tally.estimate_per_bit - want) <= 3 * se_per_bit + 0.1 * want

    def test_serialization_keys(self):
        tally = est.estimate_hk_contribution(SIMPLE_SMALL, n=50_000, trials=2, seed=14)
        d = tally.to_dict()
        for key in ("estimate", "std_error", "trials", "seed", "case_1", "case_4"):
            assert key in d


class TestAbAmbiguity:
    def test_alpha_zero(self):
        rep = est.estimate_ab_ambiguity(ChannelSpec(model="simple", alpha=0.0),
                                        n=1000, trials=1, seed=0)
        assert rep.mean == 0.0

    def test_simple_target(self):
        spec = ChannelSpec(model="simple", alpha=1e-3)
        rep = est.estimate_ab_ambiguity(spec, n=1_000_000, trials=8, seed=15, workers=2)
        target = 0.5 * series.sum_S1(1e-10).value
        assert abs(rep.mean - target) <= max(4 * rep.std_error, 0.03 * target)

    def test_gallager_target(self):
        spec = ChannelSpec(model="gallager", alpha=1e-3)
        rep = est.estimate_ab_ambiguity(spec, n=1_000_000, trials=8, seed=16, workers=2)
        # quarter log-moment plus quarter cross-pattern mass (E[(L0-1)/L0] = 1/2)
        target = 0.25 * series.sum_S1(1e-10).value + 0.125
        assert abs(rep.mean - target) <= max(4 * rep.std_error, 0.03 * target)


class TestCappedProcess:
    def test_strictly_alternating(self):
        x = est.sample_capped_process(1, 200, rng=17)
        assert max(runs_of(x).run_lengths) == 1

    def test_max_run_bounded(self):
        x = est.sample_capped_process(5, 1_000_000, rng=18)
        assert max(runs_of(x).run_lengths) == 5

    def test_flip_density_bound(self):
        rep = est.estimate_capped_flip_density(10, 100_000, trials=30, seed=19)
        bound = est.capped_flip_density_bound(10)
        assert rep.mean <= bound + 3 * rep.std_error
        assert rep.extras["max_run"] <= 10

    def test_bad_l_star(self):
        with pytest.raises(UsageError):
            est.sample_capped_process(0, 100, rng=0)


class TestDeterminismAndScaling:
    @pytest.mark.parametrize("workers", [1, 2, 3])
    def test_worker_invariance_hk(self, workers):
        base = est.estimate_hk_contribution(SIMPLE_SMALL, n=100_000, trials=4,
                                            seed=20, workers=1).to_dict()
        other = est.estimate_hk_contribution(SIMPLE_SMALL, n=100_000, trials=4,
                                             seed=20, workers=workers).to_dict()
        assert base == other

    def test_worker_invariance_all_estimators(self):
        for w in (1, 2):
            reports = [
                est.estimate_zv_pmf(SIMPLE_SMALL, n=10_000, trials=4, seed=21,
                                    workers=w).to_dict(),
                est.estimate_ab_ambiguity(GALLAGER_SMALL, n=100_000, trials=4,
                                          seed=21, workers=w).to_dict(),
                est.estimate_run_stats("per_run", 50_000, seed=21, workers=w).to_dict(),
                est.estimate_capped_flip_density(5, 20_000, trials=4, seed=21,
                                                 workers=w).to_dict(),
            ]
            if w == 1:
                baseline = reports
        assert baseline == reports

    def test_trials_shrink_error(self):
        # the standard error scales as 1/sqrt(T); with a 100x trial contrast
        # the expected ratio is 0.1, checked with wide statistical slack
        few = est.estimate_hk_contribution(SIMPLE_SMALL, n=20_000, trials=10, seed=22)
        many = est.estimate_hk_contribution(SIMPLE_SMALL, n=20_000, trials=1000,
                                            seed=22, workers=2)
        assert many.std_error < 0.5 * few.std_error
