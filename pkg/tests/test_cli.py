import json

import pytest

from inscap.cli import main


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestConstants:
    def test_simple_json(self, capsys):
        code, out, err = run_cli(capsys, "constants", "--model", "simple",
                                 "--eps", "1e-8", "--format", "json")
        assert code == 0
        rec = json.loads(out)[0]
        assert rec["G"] == pytest.approx(0.490102, abs=1e-6)
        assert "S2" in rec and "S1" in rec
        assert "manifest" in json.loads(err)

    def test_both_ordering(self, capsys):
        code, out, _ = run_cli(capsys, "constants", "--model", "both",
                               "--format", "json")
        recs = {r["model"]: r["G"] for r in json.loads(out)}
        assert code == 0
        assert recs["simple"] > recs["gallager"]

    def test_eps_zero_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "constants", "--eps", "0")
        assert code == 2


class TestCurve:
    def test_reference_grid(self, capsys):
        code, out, _ = run_cli(capsys, "curve", "--models", "both",
                               "--alpha-max", "0.25", "--steps", "25")
        assert code == 0
        lines = out.strip().split("\n")
        assert lines[0] == "alpha,model,capacity_approx"
        assert len(lines) == 51
        values = {}
        for line in lines[1:]:
            alpha, model, value = line.split(",")
            values[(model, round(float(alpha), 4))] = float(value)
        assert values[("simple", 0.05)] == pytest.approx(0.808408688894638, abs=1e-9)
        assert values[("gallager", 0.10)] == pytest.approx(0.609155287062353, abs=1e-9)

    def test_alpha_max_zero_usage_error(self, capsys):
        code, _, _ = run_cli(capsys, "curve", "--steps", "1", "--alpha-max", "0")
        assert code == 2

    def test_csv_and_svg_files(self, capsys, tmp_path):
        out_csv = tmp_path / "curve.csv"
        out_svg = tmp_path / "curve.svg"
        code, _, _ = run_cli(capsys, "curve", "--out", str(out_csv),
                             "--svg", str(out_svg))
        assert code == 0
        assert out_csv.read_text().startswith("alpha,model,capacity_approx")
        svg = out_svg.read_text()
        assert svg.startswith("<svg") and "polyline" in svg

    def test_unwritable_path_io_error(self, capsys):
        code, _, _ = run_cli(capsys, "curve", "--out", "/nonexistent/dir/x.csv")
        assert code == 3

    def test_deterministic_output(self, capsys):
        _, out1, _ = run_cli(capsys, "curve", "--steps", "5")
        _, out2, _ = run_cli(capsys, "curve", "--steps", "5")
        assert out1 == out2


class TestExact:
    def test_simple_n1(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--model", "simple",
                               "--n", "1", "--alpha", "0.3")
        assert code == 0
        rec = json.loads(out)
        assert rec["per_bit"] == pytest.approx(1.0, abs=1e-12)

    def test_gallager_n1(self, capsys):
        code, out, _ = run_cli(capsys, "exact", "--model", "gallager",
                               "--n", "1", "--alpha", "0.5")
        rec = json.loads(out)
        assert code == 0
        assert rec["per_bit"] == pytest.approx(0.5, abs=1e-12)

    def test_resource_limit_usage_error(self, capsys):
        code, _, err = run_cli(capsys, "exact", "--model", "simple",
                               "--n", "40", "--alpha", "0.1")
        assert code == 2
        assert "n <= 12" in err


class TestEstimate:
    def test_seed_reproducibility(self, capsys):
        args = ["estimate", "--which", "zv", "--model", "simple", "--alpha", "0.05",
                "--n", "5e3", "--trials", "2", "--seed", "11", "--workers", "1"]
        _, out1, _ = run_cli(capsys, *args)
        _, out2, _ = run_cli(capsys, *args)
        assert out1 == out2

    def test_hk_report_shape(self, capsys):
        code, out, _ = run_cli(capsys, "estimate", "--which", "hk", "--model",
                               "simple", "--alpha", "0.01", "--n", "5e4",
                               "--trials", "2", "--seed", "1", "--workers", "1")
        rec = json.loads(out)
        assert code == 0
        for key in ("estimate", "std_error", "case_1", "case_4", "normalizer"):
            assert key in rec

    def test_capped(self, capsys):
        code, out, _ = run_cli(capsys, "estimate", "--which", "capped",
                               "--n", "2e4", "--trials", "2", "--l-star", "5",
                               "--seed", "1", "--workers", "1")
        rec = json.loads(out)
        assert code == 0
        assert rec["max_run"] <= 5

    def test_runstats(self, capsys):
        code, out, _ = run_cli(capsys, "estimate", "--which", "runstats",
                               "--law", "per_run", "--n", "1e4", "--seed", "1",
                               "--workers", "1")
        rec = json.loads(out)
        assert code == 0
        assert rec["e_l0"] == pytest.approx(2.0, abs=0.1)


class TestVerify:
    def test_quick_passes(self, capsys):
        code, out, _ = run_cli(capsys, "verify", "--quick", "--workers", "2")
        assert code == 0
        lines = [l for l in out.strip().split("\n") if l]
        names = {line.split()[0] for line in lines}
        assert names == {"A1", "A2", "A3", "A4", "A5", "A9", "A10"}
        assert all(" PASS " in line for line in lines)
