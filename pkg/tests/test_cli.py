import csv
import json
import subprocess
import sys

import pytest

from ll_lab.cli import EXIT_ERROR, EXIT_FAIL, EXIT_PASS, main


def run(tmp_path, *argv):
    return main([*argv, "--out", str(tmp_path)])


def test_exit_codes_are_distinct():
    assert len({EXIT_PASS, EXIT_FAIL, EXIT_ERROR}) == 3
    assert (EXIT_PASS, EXIT_ERROR, EXIT_FAIL) == (0, 1, 2)


def test_converge_pass(tmp_path, capsys):
    assert run(tmp_path, "converge") == EXIT_PASS
    assert "converge: PASS" in capsys.readouterr().out
    report = json.loads((tmp_path / "report.json").read_text())
    assert 0.85 <= report["summary"]["fitted_slope"] <= 1.15
    assert report["config"]["study"] == "convergence"
    rows = list(csv.DictReader((tmp_path / "rows.csv").open()))
    assert [float(r["eps"]) for r in rows] == [0.1, 0.05, 0.025, 0.0125]


def test_converge_fail_is_exit_2(tmp_path):
    # a narrow band around the wrong order
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema_version": 1, "study": "convergence", "eps_list": [0.1, 0.05],
                               "slope_band": [1.9, 2.1], "grid": {"n": 256},
                               "integrator": {"t_end": 0.1}}))
    assert run(tmp_path, "converge", "--config", str(cfg)) == EXIT_FAIL


def test_config_errors_are_exit_1(tmp_path, capsys):
    assert run(tmp_path, "converge", "--eps-list", "0.05,0.1") == EXIT_ERROR
    assert "eps_list" in capsys.readouterr().err
    bad = tmp_path / "bad.json"
    bad.write_text("[1, 2")
    assert run(tmp_path, "converge", "--config", str(bad)) == EXIT_ERROR
    other = tmp_path / "other.json"
    other.write_text(json.dumps({"schema_version": 1, "study": "energy"}))
    assert run(tmp_path, "converge", "--config", str(other)) == EXIT_ERROR


def test_single_eps_is_exit_1(tmp_path, capsys):
    assert run(tmp_path, "converge", "--eps-list", "0.1", "--n", "128", "--t-end", "0.05") == EXIT_ERROR
    assert "cannot fit slope" in capsys.readouterr().err


def test_flag_overrides_config(tmp_path):
    cfg = tmp_path / "cfg.json"
    cfg.write_text(json.dumps({"schema_version": 1, "study": "convergence", "eps_list": [0.1, 0.05],
                               "grid": {"n": 512}}))
    assert run(tmp_path, "converge", "--config", str(cfg), "--n", "128", "--t-end", "0.05") in (EXIT_PASS,
                                                                                                 EXIT_FAIL)
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["grid"]["n"] == 128
    assert report["config"]["integrator"]["t_end"] == 0.05


def test_soliton_command(tmp_path):
    code = run(tmp_path, "soliton", "--lam", "1", "--c", "1", "--omega", "0", "--delta", "1", "--n", "2048")
    assert code == EXIT_PASS
    residuals = json.loads((tmp_path / "residuals.json").read_text())
    assert max(residuals["tw_residual"]) < 1e-8
    rows = list(csv.DictReader((tmp_path / "rows.csv").open()))
    assert len(rows) == 2048 and set(rows[0]) == {"x", "m1", "m2", "m3"}


def test_soliton_command_needs_lambda(tmp_path):
    assert run(tmp_path, "soliton", "--c", "1") == EXIT_ERROR


def test_soliton_converge(tmp_path):
    assert run(tmp_path, "soliton-converge", "--solitons", "0,1", "--n", "1024") == EXIT_PASS
    assert run(tmp_path, "soliton-converge", "--solitons", "3,1") == EXIT_ERROR


def test_energy_prints_summary(tmp_path, capsys):
    assert run(tmp_path, "energy", "--n", "512", "--length", "80") == EXIT_PASS
    out = capsys.readouterr().out
    summary = json.loads(out[:out.rindex("}") + 1])
    assert summary["m2_mass"] == pytest.approx(8.0, abs=1e-10)
    assert summary["e_cs"] == pytest.approx(-4.0, abs=1e-10)


def test_conserve(tmp_path):
    assert run(tmp_path, "conserve", "--equation", "cs", "--init", "cs_soliton", "--t-end", "1") == EXIT_PASS
    rows = list(csv.DictReader((tmp_path / "rows.csv").open()))
    assert {r["quantity"] for r in rows} == {"mass", "energy"}


def test_simulate_with_snapshots(tmp_path):
    code = run(tmp_path, "simulate", "--lam", "1", "--c", "1", "--omega", "0", "--n", "128",
               "--t-end", "0.05", "--snapshot-stride", "5", "--write-snapshots")
    assert code == EXIT_PASS
    report = json.loads((tmp_path / "report.json").read_text())
    assert report["config"]["equation"] == "ll"
    files = sorted(p.name for p in (tmp_path / "snapshots").glob("*.field"))
    assert files and files == sorted(s["file"] for s in report["summary"]["snapshots"])
    seeded = tmp_path / "seeded"
    code = main(["simulate", "--equation", "ll", "--eps", "0.5", "--snapshot", str(tmp_path / "snapshots" / files[-1]),
                 "--t-end", "0.01", "--out", str(seeded)])
    assert code == EXIT_PASS


def test_entry_point_runs(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "ll_lab.cli", "energy", "--n", "64", "--out", str(tmp_path)],
                          capture_output=True, text=True, check=False)
    assert proc.returncode == 0, proc.stderr
    assert (tmp_path / "report.json").exists()
