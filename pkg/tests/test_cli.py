from __future__ import annotations

import json
import os

import pytest

from transq.cli import main
from transq.scenario_io import load_results


def run_cli(capsys, *argv):
    code = main(list(argv))
    captured = capsys.readouterr()
    return code, captured.out, captured.err


class TestGenExampleAndSolve:
    def test_gen_then_solve(self, tmp_path, capsys):
        scenario = str(tmp_path / "sc.json")
        out = str(tmp_path / "run.csv")
        code, _, _ = run_cli(capsys, "gen-example", "--kind", "converging",
                             "--size", "210", "--out", scenario)
        assert code == 0
        code, stdout, _ = run_cli(capsys, "solve", "--scenario", scenario, "--out", out)
        assert code == 0
        assert "delta step 1:  0.0049712" in stdout
        rows = load_results(out)
        assert len(rows) == 288
        assert os.path.exists(out + ".meta.json")

    def test_no_ssd_forces_full_sums(self, tmp_path, capsys):
        scenario = str(tmp_path / "sc.json")
        out = str(tmp_path / "run.csv")
        run_cli(capsys, "gen-example", "--kind", "converging", "--size", "210",
                "--out", scenario)
        code, _, _ = run_cli(capsys, "solve", "--scenario", scenario, "--out", out,
                             "--no-ssd")
        assert code == 0
        assert all(r["outcome"] == "full-sum" for r in load_results(out))

    def test_missing_scenario_file(self, tmp_path, capsys):
        missing = str(tmp_path / "nope.json")
        code, _, stderr = run_cli(capsys, "solve", "--scenario", missing,
                                  "--out", str(tmp_path / "x.csv"))
        assert code != 0
        assert "nope.json" in stderr

    def test_out_dir_env_var(self, tmp_path, capsys, monkeypatch):
        monkeypatch.setenv("TRANSQ_OUT_DIR", str(tmp_path))
        code, stdout, _ = run_cli(capsys, "gen-example", "--kind", "original",
                                  "--size", "210")
        assert code == 0
        assert (tmp_path / "original-210.json").exists()

    def test_budget_override_rejected_when_infeasible(self, tmp_path, capsys):
        scenario = str(tmp_path / "sc.json")
        run_cli(capsys, "gen-example", "--kind", "converging", "--size", "210",
                "--out", scenario)
        code, _, stderr = run_cli(capsys, "solve", "--scenario", scenario,
                                  "--out", str(tmp_path / "x.csv"),
                                  "--eps-total", "1e-9")
        assert code == 1
        assert "eps_total" in stderr


class TestPoissonDebug:
    def test_json_payload(self, capsys):
        code, stdout, _ = run_cli(capsys, "poisson-debug", "255", "1e-7")
        assert code == 0
        payload = json.loads(stdout)
        assert payload["l_ssd"] <= payload["l"] <= payload["k"]
        assert payload["span"] == payload["k"] - payload["l"] + 1

    def test_extra_terms_when_tightening(self, capsys):
        # Tightening the tolerance from 1e-7 to 1e-13 adds summed terms
        # worth ~20% of the baseline iteration count at mean 255 and ~6%
        # at mean 4095.
        ratios = {}
        for mean in ("255", "4095"):
            _, loose_out, _ = run_cli(capsys, "poisson-debug", mean, "1e-7")
            _, tight_out, _ = run_cli(capsys, "poisson-debug", mean, "1e-13")
            loose = json.loads(loose_out)
            tight = json.loads(tight_out)
            ratios[mean] = (tight["span"] - loose["span"]) / loose["k"]
        assert 0.15 <= ratios["255"] <= 0.25
        assert 0.03 <= ratios["4095"] <= 0.09

    def test_invalid_mean_reports_error_json(self, capsys):
        code, stdout, _ = run_cli(capsys, "poisson-debug", "0", "1e-7")
        assert code == 1
        assert "error" in json.loads(stdout)


class TestBench:
    def test_smoke_with_tiny_grid(self, tmp_path, capsys):
        code, stdout, _ = run_cli(
            capsys, "bench", "--kind", "converging", "--size", "210",
            "--eps-grid", "5e-2", "--out-dir", str(tmp_path))
        assert code == 0
        assert "no-ssd" in stdout and "eps_T=0.05" in stdout
        per_step = tmp_path / "bench_converging_210_eps_T_0.05.csv"
        assert per_step.exists()
        lines = per_step.read_text().splitlines()
        assert lines[0] == "step,t_s,iterations,outcome,eps_accum,delta"
        assert len(lines) == 1 + 288

    def test_empty_grid_runs_baseline_only(self, capsys):
        code, stdout, _ = run_cli(capsys, "bench", "--kind", "converging",
                                  "--size", "210", "--eps-grid")
        assert code == 0
        assert "no-ssd" in stdout
        assert "eps_T" not in stdout


class TestArgumentErrors:
    def test_unknown_flag_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["solve", "--scenario", "x", "--out", "y", "--frobnicate"])

    def test_unknown_subcommand_rejected(self, capsys):
        with pytest.raises(SystemExit):
            main(["transmogrify"])
