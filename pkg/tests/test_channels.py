import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from inscap.core import BitSeq, ChannelSpec, Model, RunVector, runs_of
from inscap.channels import (
    InsertionRealization,
    apply_realization,
    enumerate_realizations,
    modify_realization,
    perturb_realization,
    sample_realization,
)

SIMPLE = ChannelSpec(model="simple", alpha=0.1)
GALLAGER = ChannelSpec(model="gallager", alpha=0.1)


def realization(model, flags, payload):
    return InsertionRealization(
        model=model, flags=np.array(flags, dtype=np.uint8),
        payload=np.array(payload, dtype=np.uint8),
    )


bit_lists = st.lists(st.integers(0, 1), min_size=1, max_size=32)


@st.composite
def input_and_realization(draw, model=Model.SIMPLE):
    bits = draw(bit_lists)
    n = len(bits)
    flags = draw(st.lists(st.integers(0, 1), min_size=n, max_size=n))
    if model is Model.SIMPLE:
        payload = [f and draw(st.integers(0, 1)) for f in flags]
    else:
        payload = [
            [f and draw(st.integers(0, 1)), f and draw(st.integers(0, 1))]
            for f in flags
        ]
    return BitSeq(bits), realization(model, flags, payload)


class TestSampleRealization:
    def test_alpha_zero_all_clear(self):
        r = sample_realization(ChannelSpec(model="simple", alpha=0.0), 50, 0)
        assert r.num_flags == 0

    def test_deterministic_given_seed(self):
        a = sample_realization(SIMPLE, 100, 42)
        b = sample_realization(SIMPLE, 100, 42)
        assert np.array_equal(a.flags, b.flags)
        assert np.array_equal(a.payload, b.payload)

    def test_flag_rate(self):
        # mean flag count at n=100, alpha=0.1 should be 10 within 3 SE
        draws = 20_000
        rng = np.random.default_rng(7)
        total = sum(sample_realization(SIMPLE, 100, rng).num_flags for _ in range(draws))
        mean = total / draws
        se = math.sqrt(100 * 0.1 * 0.9 / draws)
        assert abs(mean - 10.0) <= 3 * se

    def test_payload_zero_where_unflagged(self):
        r = sample_realization(GALLAGER, 500, 3)
        assert not r.payload[r.flags == 0].any()


class TestApplyRealization:
    def test_simple_single_run(self):
        y, k = apply_realization(
            BitSeq.from_string("000"), realization(Model.SIMPLE, [0, 1, 0], [0, 1, 0])
        )
        assert str(y) == "0010"
        assert k == RunVector((4,))

    def test_gallager_pair(self):
        y, k = apply_realization(
            BitSeq.from_string("01"),
            realization(Model.GALLAGER, [1, 0], [[1, 0], [0, 0]]),
        )
        assert str(y) == "101"
        assert k == RunVector((2, 1))

    def test_simple_long_run(self):
        flags = [0, 0, 1, 0, 0, 0, 0]
        y, k = apply_realization(
            BitSeq.from_string("0000000"), realization(Model.SIMPLE, flags, [0] * 7)
        )
        assert len(y) == 8
        assert k == RunVector((8,))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            apply_realization(
                BitSeq.from_string("00"), realization(Model.SIMPLE, [0], [0])
            )

    @given(input_and_realization())
    def test_output_length_simple(self, pair):
        x, r = pair
        y, k = apply_realization(x, r)
        assert len(y) == len(x) + r.num_flags
        assert k.total == len(y)
        assert len(k) == runs_of(x).num_runs

    @given(input_and_realization(Model.GALLAGER))
    def test_output_length_gallager(self, pair):
        x, r = pair
        y, k = apply_realization(x, r)
        assert len(y) == len(x) + r.num_flags
        assert k.total == len(y)

    @given(input_and_realization())
    def test_marker_entries_cover_runs(self, pair):
        x, r = pair
        _, k = apply_realization(x, r)
        for entry, run_len in zip(k, runs_of(x).run_lengths):
            assert entry >= run_len

    @given(input_and_realization())
    def test_complement_symmetry_simple(self, pair):
        x, r = pair
        y, _ = apply_realization(x, r)
        comp_payload = np.where(r.flags == 1, 1 - r.payload, 0).astype(np.uint8)
        rc = InsertionRealization(model=r.model, flags=r.flags, payload=comp_payload)
        yc, _ = apply_realization(x.complement(), rc)
        assert yc == y.complement()


class TestModifyRealization:
    def test_two_flags_in_one_run_reversed(self):
        r_hat, delta = modify_realization(
            BitSeq.from_string("0000"), realization(Model.SIMPLE, [1, 1, 0, 0], [1, 0, 0, 0])
        )
        assert r_hat.num_flags == 0
        assert delta.z.tolist() == [1, 1, 0, 0]

    def test_single_flag_untouched(self):
        r = realization(Model.SIMPLE, [1, 0, 0, 0], [1, 0, 0, 0])
        r_hat, delta = modify_realization(BitSeq.from_string("0011"), r)
        assert np.array_equal(r_hat.flags, r.flags)
        assert not delta.z.any()

    def test_neighbor_flag_triggers_extended_run(self):
        # flags at position 1 (run 0) and position 2 (first bit of run 1):
        # run 0's extended run covers positions 0..2 and holds two flags
        r = realization(Model.SIMPLE, [0, 1, 1, 0], [0, 1, 1, 0])
        r_hat, delta = modify_realization(BitSeq.from_string("0011"), r)
        assert delta.z.tolist() == [0, 1, 1, 0]
        assert r_hat.num_flags == 0

    @given(input_and_realization())
    def test_idempotent(self, pair):
        x, r = pair
        r_hat, _ = modify_realization(x, r)
        r_hat2, delta2 = modify_realization(x, r_hat)
        assert np.array_equal(r_hat.flags, r_hat2.flags)
        assert not delta2.z.any()

    @given(input_and_realization(Model.GALLAGER))
    def test_delta_xor_invariants(self, pair):
        x, r = pair
        r_hat, delta = modify_realization(x, r)
        assert np.array_equal(np.bitwise_xor(r_hat.flags, r.flags), delta.z)
        assert np.array_equal(np.bitwise_xor(r_hat.payload, r.payload), delta.v)
        # v is nonzero only where z is nonzero
        assert not delta.v[delta.z == 0].any()


class TestPerturbRealization:
    def test_reference_table_row(self):
        x = BitSeq.from_string("0001111001110000")
        a = BitSeq.from_string("0101000000010000").bits
        payload = a.copy()  # payload values are irrelevant to the flag pattern
        r = realization(Model.SIMPLE, a, payload)
        r_check, z_check = perturb_realization(x, r)
        assert "".join(map(str, z_check.tolist())) == "0100000000000000"
        assert "".join(map(str, r_check.flags.tolist())) == "0001000000010000"

    def test_all_zero_unchanged(self):
        r = realization(Model.SIMPLE, [0, 0, 0, 0], [0, 0, 0, 0])
        r_check, z_check = perturb_realization(BitSeq.from_string("0011"), r)
        assert not z_check.any()

    def test_single_flag_unchanged(self):
        r = realization(Model.SIMPLE, [0, 0, 1, 0], [0, 0, 1, 0])
        r_check, _ = perturb_realization(BitSeq.from_string("0011"), r)
        assert np.array_equal(r_check.flags, r.flags)

    @given(input_and_realization())
    def test_triggered_pairs_left_run_cleared(self, pair):
        x, r = pair
        rd = runs_of(x)
        rid = np.repeat(np.arange(rd.num_runs), rd.run_lengths)
        before = np.bincount(rid, weights=r.flags, minlength=rd.num_runs)
        r_check, _ = perturb_realization(x, r)
        after = np.bincount(rid, weights=r_check.flags, minlength=rd.num_runs)
        for j in range(rd.num_runs - 1):
            if before[j] + before[j + 1] >= 2:
                assert after[j] == 0


class TestEnumerateRealizations:
    def test_counts_simple_n2(self):
        items = list(enumerate_realizations(SIMPLE, 2))
        assert len(items) == 9

    def test_alpha_zero_single_item(self):
        items = list(enumerate_realizations(ChannelSpec(model="simple", alpha=0.0), 3))
        assert len(items) == 1
        assert items[0][1] == 1.0

    @pytest.mark.parametrize("spec", [SIMPLE, GALLAGER])
    def test_probabilities_sum_to_one(self, spec):
        total = math.fsum(p for _, p in enumerate_realizations(spec, 5))
        assert total == pytest.approx(1.0, abs=1e-12)

    def test_max_events_exceeds_n(self):
        with pytest.raises(ValueError):
            list(enumerate_realizations(SIMPLE, 2, max_events=3))

    def test_truncated_mass_is_binomial(self):
        total = math.fsum(p for _, p in enumerate_realizations(SIMPLE, 6, max_events=1))
        want = 0.9**6 + 6 * 0.1 * 0.9**5
        assert total == pytest.approx(want, abs=1e-12)


class TestTextRoundTrip:
    def test_simple(self):
        r = realization(Model.SIMPLE, [1, 0, 1], [1, 0, 0])
        assert InsertionRealization.from_text(Model.SIMPLE, *r.to_text()) == r

    def test_gallager(self):
        r = realization(Model.GALLAGER, [1, 0], [[1, 0], [0, 0]])
        rt = InsertionRealization.from_text(Model.GALLAGER, *r.to_text())
        assert np.array_equal(rt.payload, r.payload)
