"""Tests for the command-line interface: schemas, determinism, exit codes."""

import json
import math

import pytest

from capcover.cli import main


def run(argv):
    return main(argv)


class TestCaps:
    def test_mass_row(self, tmp_path, capsys):
        out = tmp_path / "caps.json"
        code = run(["caps", "--dim", "10", "--mass", "0.001", "--out", str(out)])
        assert code == 0
        (rec,) = json.loads(out.read_text())
        assert rec["d"] == 10
        assert rec["roundtripRelResidual"] <= 1e-10
        assert rec["gaussOffset"] is not None and rec["etaBound"] >= rec["gaussOffset"]

    def test_circle_quarter(self, tmp_path):
        out = tmp_path / "caps.json"
        assert run(["caps", "--dim", "2", "--mass", "0.25", "--out", str(out)]) == 0
        (rec,) = json.loads(out.read_text())
        assert rec["geodesicRadius"] == pytest.approx(math.pi / 4, rel=1e-14)

    def test_hemisphere_threshold_zero(self, tmp_path):
        out = tmp_path / "caps.json"
        assert run(["caps", "--dim", "10", "--mass", "0.5", "--out", str(out)]) == 0
        (rec,) = json.loads(out.read_text())
        assert rec["geodesicRadius"] == pytest.approx(math.pi / 2, rel=1e-13)
        assert abs(rec["cosThreshold"]) < 1e-13
        assert rec["gaussOffset"] is None  # mass not below 1/2

    def test_both_flags_rejected(self):
        assert run(["caps", "--dim", "3", "--mass", "0.1", "--radius", "0.5"]) == 2

    def test_domain_error_exit_two(self):
        assert run(["caps", "--dim", "3", "--mass", "1.5"]) == 2


class TestSimulate:
    def test_row_matches_closed_form(self, tmp_path):
        out = tmp_path / "sim.csv"
        code = run([
            "simulate", "--dims", "10", "--ncaps", "1000", "--alphas", "1",
            "--configs", "5", "--samples", "4000", "--seed", "11", "--out", str(out),
        ])
        assert code == 0
        lines = out.read_text().strip().splitlines()
        assert lines[0].startswith("version,d,N,alpha,mean")
        fields = dict(zip(lines[0].split(","), lines[1].split(",")))
        assert float(fields["expected"]) == pytest.approx(0.63230457522903596, rel=1e-12)
        assert abs(float(fields["zScore"])) <= 4.0

    def test_single_full_cap_exact(self, tmp_path):
        out = tmp_path / "sim.csv"
        code = run([
            "simulate", "--dims", "4", "--ncaps", "1", "--alphas", "1",
            "--configs", "2", "--samples", "500", "--seed", "3", "--out", str(out),
        ])
        assert code == 0
        row = out.read_text().strip().splitlines()[1].split(",")
        header = out.read_text().strip().splitlines()[0].split(",")
        rec = dict(zip(header, row))
        assert float(rec["mean"]) == 1.0

    def test_identical_seed_identical_files(self, tmp_path):
        a, b = tmp_path / "a.csv", tmp_path / "b.csv"
        argv = [
            "simulate", "--dims", "3", "--ncaps", "50", "--alphas", "0.5",
            "--configs", "3", "--samples", "2000", "--seed", "9",
        ]
        assert run(argv + ["--out", str(a)]) == 0
        assert run(argv + ["--out", str(b)]) == 0
        assert a.read_bytes() == b.read_bytes()

    def test_json_format(self, tmp_path):
        out = tmp_path / "sim.json"
        code = run([
            "simulate", "--dims", "3", "--ncaps", "20", "--alphas", "1",
            "--configs", "2", "--samples", "1000", "--seed", "4",
            "--format", "json", "--out", str(out),
        ])
        assert code == 0
        records = json.loads(out.read_text())
        assert isinstance(records, list)
        assert {"version", "d", "N", "alpha", "mean", "stdError", "expected", "zScore", "seed"} <= set(records[0])


class TestBounds:
    def test_rows_and_euler_columns(self, tmp_path):
        out = tmp_path / "bounds.json"
        code = run([
            "bounds", "--dims", "5,100", "--ncaps", "1000000", "--alphas", "1",
            "--format", "json", "--out", str(out),
        ])
        assert code == 0
        rows = json.loads(out.read_text())
        assert len(rows) == 2
        for row in rows:
            assert row["lower"] <= row["upper"]
            assert row["eLower"] == pytest.approx(math.e, rel=1e-12)
            assert row["efrReference"] == 0.92334
        assert rows[0]["preconditionMet"] is True
        assert rows[1]["preconditionMet"] is False

    def test_low_dim_annotated(self, tmp_path):
        out = tmp_path / "bounds.json"
        code = run(["bounds", "--dims", "3", "--ncaps", "100", "--alphas", "0.5",
                    "--format", "json", "--out", str(out)])
        assert code == 0
        (row,) = json.loads(out.read_text())
        assert "precondition unmet" in row["note"]

    def test_ldiv_footer_on_stderr(self, capsys):
        assert run(["bounds", "--dims", "5", "--ncaps", "1000", "--alphas", "0.5"]) == 0
        err = capsys.readouterr().err
        assert "0.113358" in err


class TestVerify:
    def test_zone_suite_passes(self, capsys):
        assert run(["verify", "--suite", "zone"]) == 0
        assert "PASS" in capsys.readouterr().out

    def test_scalar_suite_reports_known_failure(self, capsys):
        # the binomial quadratic bound is false at k=3/2; exit code is honest
        assert run(["verify", "--suite", "scalar"]) == 1
        out = capsys.readouterr().out
        assert "binomial-quadratic" in out and "FAIL" in out

    def test_sidak_deterministic(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = ["verify", "--suite", "sidak", "--seed", "21", "--format", "json"]
        run(argv + ["--out", str(a)])
        run(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()

    def test_report_records(self, tmp_path):
        out = tmp_path / "verify.json"
        run(["verify", "--suite", "cone", "--out", str(out)])
        rows = json.loads(out.read_text())
        assert len(rows) == 20
        assert all(r["passed"] for r in rows)
        assert {"name", "passed", "lhs", "rhs", "tolerance", "detail", "suite", "seed"} <= set(rows[0])


class TestOptimize:
    def test_trace_file_and_summary(self, tmp_path, capsys):
        out = tmp_path / "trace.json"
        code = run([
            "optimize", "--dim", "2", "--ncaps", "8", "--alpha", "0.5",
            "--steps", "800", "--restarts", "1", "--crn-samples", "10000",
            "--seed", "2", "--out", str(out),
        ])
        assert code == 0
        summary = capsys.readouterr().out
        assert "baseline=" in summary and "upper=not applicable" in summary
        doc = json.loads(out.read_text())
        assert doc["finalConfig"]["d"] == 2
        assert len(doc["objectiveHistory"]) <= 1000
        hist = doc["objectiveHistory"]
        assert all(b >= a for a, b in zip(hist, hist[1:]))

    def test_repeat_same_seed_identical_trace(self, tmp_path):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        argv = [
            "optimize", "--dim", "3", "--ncaps", "4", "--alpha", "0.3",
            "--steps", "300", "--restarts", "1", "--crn-samples", "10000", "--seed", "8",
        ]
        run(argv + ["--out", str(a)])
        run(argv + ["--out", str(b)])
        assert a.read_bytes() == b.read_bytes()


class TestConfigFile:
    def test_override_with_warning(self, tmp_path, capsys):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"dim": 4, "mass": 0.01}))
        out = tmp_path / "caps.json"
        code = run(["caps", "--dim", "3", "--mass", "0.2", "--config", str(cfg), "--out", str(out)])
        assert code == 0
        assert "overrides" in capsys.readouterr().err
        (rec,) = json.loads(out.read_text())
        assert rec["d"] == 4 and rec["mass"] == 0.01

    def test_unknown_key_rejected(self, tmp_path):
        cfg = tmp_path / "cfg.json"
        cfg.write_text(json.dumps({"bogus": 1}))
        assert run(["caps", "--dim", "3", "--mass", "0.2", "--config", str(cfg)]) == 2
