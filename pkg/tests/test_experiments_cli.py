"""Config validation, experiment reports, report files and the CLI."""

import csv
import json
import math
import subprocess
import sys

import numpy as np
import pytest

from expkant import cli, experiments
from expkant.core import ValidationError


def base_config(**overrides):
    cfg = {
        "experiment": "converge_uniform",
        "kernel": {"profile": {"name": "bspline", "n": 2}},
        "signal": {"name": "clipped_log"},
        "w_list": [4, 8, 16, 32],
    }
    cfg.update(overrides)
    return cfg


class TestConfigValidation:
    def test_accepts_known_keys(self):
        assert experiments.validate_config(base_config()) == "converge_uniform"

    def test_unknown_top_level_key(self):
        with pytest.raises(ValidationError, match="unknown keys"):
            experiments.validate_config(base_config(extra=1))

    def test_unknown_experiment(self):
        with pytest.raises(ValidationError, match="unknown experiment"):
            experiments.validate_config(base_config(experiment="nope"))

    def test_missing_required_key(self):
        cfg = base_config()
        del cfg["signal"]
        with pytest.raises(ValidationError, match="missing keys"):
            experiments.validate_config(cfg)

    def test_unknown_nested_key(self):
        cfg = base_config()
        cfg["kernel"]["profile"]["spline"] = 3
        with pytest.raises(ValidationError, match="unknown keys"):
            experiments.run(cfg)

    def test_unknown_output_key(self):
        with pytest.raises(ValidationError, match="unknown keys"):
            experiments.validate_config(base_config(output={"xml": "a.xml"}))

    def test_bad_w_list(self):
        for bad in ([4, 8, 8, 16], [8, 4, 16, 32], [-1, 4, 8, 16], [4, 8]):
            with pytest.raises(ValidationError, match="w_list"):
                experiments.run(base_config(w_list=bad))

    def test_non_dict_config(self):
        with pytest.raises(ValidationError):
            experiments.validate_config([1, 2, 3])

    def test_bad_signal_params(self):
        cfg = base_config(signal={"name": "holder_bump", "sharpness": 2})
        with pytest.raises(ValidationError, match="signal"):
            experiments.run(cfg)


class TestRateFit:
    def test_exact_power_law(self):
        w = np.array([4.0, 8.0, 16.0, 32.0])
        fit = experiments.fit_rate(list(zip(w, 3.0 * w ** -2)))
        assert fit.slope == pytest.approx(-2.0, abs=1e-12)
        assert math.exp(fit.intercept) == pytest.approx(3.0, rel=1e-10)

    def test_all_zero_is_none(self):
        assert experiments.fit_rate([(4.0, 0.0), (8.0, 0.0)]) is None

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            experiments.fit_rate([])


class TestReports:
    def test_converge_uniform_log_rate(self):
        report = experiments.run(base_config(
            grid={"lo": 0.5, "hi": 2.0, "points": 9}))
        assert report["passed"]
        assert report["columns"] == ["w", "error"]
        # sup error of the log signal is exactly 1/(2w)
        for row in report["rows"]:
            assert row["error"] == pytest.approx(0.5 / row["w"], rel=1e-9)
        assert report["fit"]["slope"] == pytest.approx(-1.0, abs=1e-9)

    def test_converge_uniform_exact_marker(self):
        report = experiments.run(base_config(
            signal={"name": "constant", "c": 2.0}))
        assert report["fit"] == "exact"
        assert report["passed"]

    def test_converge_pointwise(self):
        report = experiments.run(base_config(
            experiment="converge_pointwise", x=2.0))
        assert report["passed"]
        assert report["x"] == 2.0
        for row in report["rows"]:
            assert row["error"] == pytest.approx(0.5 / row["w"], rel=1e-9)

    def test_report_echoes_config_without_output(self):
        cfg = base_config()
        report = experiments.run(cfg)
        assert report["experiment"] == "converge_uniform"
        assert "output" not in report["config"]
        assert report["config"]["w_list"] == [4, 8, 16, 32]


class TestReportFiles:
    def test_csv_roundtrip_17_digits(self, tmp_path):
        path = tmp_path / "t.csv"
        rows = [{"w": 4.0, "error": 1.0 / 3.0},
                {"w": 8.0, "error": 1e-17}]
        experiments.write_csv(str(path), ["w", "error"], rows)
        with open(path) as fh:
            got = list(csv.reader(fh))
        assert got[0] == ["w", "error"]
        # 17 significant digits round-trip to the same float
        assert float(got[1][1]) == 1.0 / 3.0
        assert float(got[2][1]) == 1e-17
        assert "," not in got[1][1]  # '.' decimal separator

    def test_run_writes_requested_outputs(self, tmp_path):
        csv_path = tmp_path / "out.csv"
        json_path = tmp_path / "out.json"
        cfg = base_config(output={"csv": str(csv_path),
                                  "json": str(json_path)})
        experiments.run(cfg)
        with open(csv_path) as fh:
            header = fh.readline().strip()
        assert header == "w,error"
        with open(json_path) as fh:
            doc = json.load(fh)
        assert doc["experiment"] == "converge_uniform"
        assert len(doc["rows"]) == 4


class TestThreads:
    def test_thread_count_default(self, monkeypatch):
        monkeypatch.delenv("EXPKANT_THREADS", raising=False)
        assert experiments.thread_count() == 1

    def test_thread_count_env(self, monkeypatch):
        monkeypatch.setenv("EXPKANT_THREADS", "4")
        assert experiments.thread_count() == 4

    def test_thread_count_invalid(self, monkeypatch):
        monkeypatch.setenv("EXPKANT_THREADS", "many")
        with pytest.raises(ValidationError):
            experiments.thread_count()

    def test_results_independent_of_threads(self, monkeypatch):
        cfg = base_config()
        monkeypatch.setenv("EXPKANT_THREADS", "1")
        seq = experiments.run(cfg)["rows"]
        monkeypatch.setenv("EXPKANT_THREADS", "4")
        par = experiments.run(cfg)["rows"]
        assert seq == par


def run_cli(args, **kw):
    return subprocess.run([sys.executable, "-m", "expkant.cli", *args],
                          capture_output=True, text=True, **kw)


class TestCli:
    def test_run_pass_exit_0(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        csv_path = tmp_path / "out.csv"
        cfg = base_config(output={"csv": str(csv_path)})
        cfg_path.write_text(json.dumps(cfg))
        proc = run_cli(["run", str(cfg_path)])
        assert proc.returncode == cli.EXIT_PASS, proc.stderr
        assert "PASS" in proc.stdout
        assert csv_path.read_text().splitlines()[0] == "w,error"

    def test_run_theorem_failure_exit_2(self, tmp_path):
        # an unreachable threshold turns the verdict into a theorem failure
        cfg = base_config(experiment="modular_convergence",
                          signal={"name": "cc_bump"}, threshold=1e-300)
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        proc = run_cli(["run", str(cfg_path)])
        assert proc.returncode == cli.EXIT_THEOREM_FAIL
        assert "FAIL" in proc.stdout

    def test_run_validation_exit_3(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_config(bogus=1)))
        proc = run_cli(["run", str(cfg_path)])
        assert proc.returncode == cli.EXIT_VALIDATION
        assert "error:" in proc.stderr

    def test_run_bad_json_exit_3(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text("{not json")
        proc = run_cli(["run", str(cfg_path)])
        assert proc.returncode == cli.EXIT_VALIDATION

    def test_run_missing_file_exit_3(self):
        assert run_cli(["run", "/no/such/file.json"]).returncode == \
            cli.EXIT_VALIDATION

    def test_audit_prints_condition_lines(self, tmp_path):
        cfg = {"kernel": {"profile": {"name": "bspline", "n": 2},
                          "response": {"name": "soft", "alpha": 1.0}},
               "w_list": [4, 8, 16, 32]}
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(cfg))
        proc = run_cli(["audit", str(cfg_path)])
        assert proc.returncode == cli.EXIT_PASS, proc.stderr
        lines = proc.stdout.strip().splitlines()
        for name in ("chi1", "chi2", "chi3", "chi4_S", "chi4_T", "chi4_star",
                     "L1", "L2", "L3", "e3_1"):
            assert any(line.startswith(f"{name}:") for line in lines)
        assert all(line.endswith("pass") for line in lines)

    def test_audit_rejects_other_experiment(self, tmp_path):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_config()))
        assert run_cli(["audit", str(cfg_path)]).returncode == \
            cli.EXIT_VALIDATION

    def test_moments_subcommand(self):
        proc = run_cli(["moments", "--profile", "bspline:2", "--beta", "0",
                        "--scheme", "uniform:1"])
        assert proc.returncode == cli.EXIT_PASS
        doc = json.loads(proc.stdout)
        assert doc["value"] == pytest.approx(1.0, abs=1e-10)
        assert doc["diverged"] is False

    def test_moments_bad_profile_exit_3(self):
        assert run_cli(["moments", "--profile", "nope", "--beta",
                        "1"]).returncode == cli.EXIT_VALIDATION

    def test_main_in_process(self, tmp_path, capsys):
        cfg_path = tmp_path / "cfg.json"
        cfg_path.write_text(json.dumps(base_config()))
        assert cli.main(["run", str(cfg_path)]) == cli.EXIT_PASS
        assert "PASS" in capsys.readouterr().out
