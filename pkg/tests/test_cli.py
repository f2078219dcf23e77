"""CLI contract tests."""
import json
import re

import numpy as np
import pytest
from click.testing import CliRunner
from fastapi.testclient import TestClient

import ditherseek.cli as cli_mod
from ditherseek.cli import main
from ditherseek.harness import read_aggregate, read_run
from ditherseek.service import app

runner = CliRunner()


def test_run_writes_named_artifacts(tmp_path):
    result = runner.invoke(main, ["run", "--example", "quadratic",
                                  "--mode", "esc-aise", "--seed", "7",
                                  "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    csv = tmp_path / "quadratic_esc-aise_7.csv"
    assert csv.exists()
    assert (tmp_path / "metrics.json").exists()
    traj = read_run(csv)
    assert len(traj) == 6001
    metrics = json.loads((tmp_path / "metrics.json").read_text())
    assert metrics["runs"]["esc-aise"]["rmse"] == pytest.approx(traj.rmse)
    assert metrics["seed"] == 7
    assert metrics["overrides"]["seed"] == 7


def test_run_abs_noiseless_prints_t_stop(tmp_path):
    result = runner.invoke(main, ["run", "--example", "abs", "--no-noise",
                                  "--mode", "esc", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    match = re.search(r"t_stop=([0-9.]+)", result.output)
    assert match, result.output
    t_stop = float(match.group(1))
    assert abs(t_stop - 16.41) / 16.41 < 0.10


def test_missing_config_exits_2():
    result = runner.invoke(main, ["run", "--config", "/tmp/does_not_exist.json"])
    assert result.exit_code == 2
    assert "does_not_exist.json" in result.output


def test_config_and_example_are_exclusive(tmp_path):
    result = runner.invoke(main, ["run", "--example", "quadratic",
                                  "--config", "x.json", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_montecarlo_zero_trials_exits_2(tmp_path):
    result = runner.invoke(main, ["montecarlo", "--example", "quadratic",
                                  "--trials", "0", "--out", str(tmp_path)])
    assert result.exit_code == 2


def test_montecarlo_writes_aggregate_and_table(tmp_path):
    result = runner.invoke(main, ["montecarlo", "--example", "quadratic",
                                  "--trials", "2", "--mode", "esc",
                                  "--seed", "5", "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    data = read_aggregate(tmp_path / "quadratic_montecarlo_5.json")
    assert data["results"]["esc"]["n_trials"] == 2
    assert "Average RMSE" in result.output
    assert "Trials" in result.output


def test_sweep_three_values(tmp_path):
    result = runner.invoke(main, ["sweep", "--example", "quadratic",
                                  "--parameter", "a_esc",
                                  "--values", "0.1,0.2,0.4", "--trials", "1",
                                  "--mode", "esc", "--no-noise",
                                  "--out", str(tmp_path)])
    assert result.exit_code == 0, result.output
    lines = (tmp_path / "quadratic_sweep_a_esc.csv").read_text().splitlines()
    header = [l for l in lines if not l.startswith("#")]
    assert header[0] == "value,mode,rmse_mean,stopped_fraction"
    assert len(header) == 4  # header + 3 rows


def test_sweep_single_value_matches_montecarlo(tmp_path):
    args = ["--example", "quadratic", "--trials", "2", "--mode", "esc",
            "--seed", "9", "--out", str(tmp_path)]
    r1 = runner.invoke(main, ["montecarlo", *args])
    assert r1.exit_code == 0, r1.output
    r2 = runner.invoke(main, ["sweep", "--parameter", "a_esc",
                              "--values", "0.2", *args])
    assert r2.exit_code == 0, r2.output
    agg = read_aggregate(tmp_path / "quadratic_montecarlo_9.json")
    row = (tmp_path / "quadratic_sweep_a_esc.csv").read_text().splitlines()[-1]
    swept_rmse = float(row.split(",")[2])
    assert swept_rmse == pytest.approx(agg["results"]["esc"]["rmse_mean"], rel=1e-15)


def test_sweep_unused_parameter_exits_2(tmp_path):
    result = runner.invoke(main, ["sweep", "--example", "quadratic",
                                  "--parameter", "omega_h", "--values", "0.05",
                                  "--trials", "1", "--mode", "esc-aise",
                                  "--out", str(tmp_path)])
    assert result.exit_code == 2
    assert "omega_h" in result.output


def test_server_mode_matches_local(tmp_path, monkeypatch):
    # ASGI-backed client: the CLI's thin-client path against the in-process app
    monkeypatch.setattr(cli_mod, "get_client",
                        lambda server: TestClient(app, base_url=server))
    local_dir = tmp_path / "local"
    remote_dir = tmp_path / "remote"
    base = ["run", "--example", "abs", "--no-noise", "--mode", "esc"]
    r1 = runner.invoke(main, [*base, "--out", str(local_dir)])
    r2 = runner.invoke(main, [*base, "--out", str(remote_dir),
                              "--server", "http://testserver"])
    assert r1.exit_code == 0, r1.output
    assert r2.exit_code == 0, r2.output
    a = read_run(local_dir / "abs_esc_0.csv")
    b = read_run(remote_dir / "abs_esc_0.csv")
    assert a.rmse == b.rmse and a.t_stop == b.t_stop
    assert np.allclose(a["u"], b["u"])
