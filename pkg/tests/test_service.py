"""REST service tests (in-process client)."""
import json

import pytest
from fastapi.testclient import TestClient

from ditherseek.config import example_config
from ditherseek.service import app

client = TestClient(app)


def test_health():
    r = client.get("/health")
    assert r.status_code == 200
    body = r.json()
    assert body["status"] == "ok"
    assert "version" in body


def test_examples_listing():
    r = client.get("/examples")
    assert r.status_code == 200
    assert r.json()["examples"] == ["abs", "quadratic"]


def test_run_noiseless_abs_metrics():
    r = client.post("/run", json={"example": "abs", "mode": "esc", "no_noise": True})
    assert r.status_code == 200
    m = r.json()["metrics"]
    assert m["stopped"] is True
    assert abs(m["t_stop"] - 16.41) / 16.41 < 0.10
    assert r.json()["trajectory"] is None


def test_run_with_trajectory_payload():
    r = client.post("/run", json={"example": "abs", "mode": "esc",
                                  "no_noise": True, "include_trajectory": True})
    assert r.status_code == 200
    traj = r.json()["trajectory"]
    for col in ("k", "t", "u", "y", "v", "y_n", "lambda", "mu", "nu", "omega"):
        assert col in traj["columns"]
    assert len(traj["columns"]["u"]) == r.json()["metrics"]["steps"]


def test_run_requires_exactly_one_source():
    r = client.post("/run", json={"mode": "esc"})
    assert r.status_code == 422
    cfg = json.loads(example_config("quadratic").model_dump_json())
    r = client.post("/run", json={"example": "quadratic", "config": cfg})
    assert r.status_code == 422


def test_run_rejects_unknown_fields():
    r = client.post("/run", json={"example": "abs", "mode": "esc", "bogus": 1})
    assert r.status_code == 422


def test_run_inline_config_override():
    cfg = json.loads(example_config("quadratic").model_dump_json())
    cfg["horizon"] = 2500
    cfg["rmse"] = {"k_init": 2000, "k_end": 2500}
    r = client.post("/run", json={"config": cfg, "mode": "esc", "no_noise": True})
    assert r.status_code == 200
    assert r.json()["metrics"]["steps"] == 2501


def test_montecarlo_paired_modes():
    r = client.post("/montecarlo", json={"example": "quadratic", "trials": 2,
                                         "modes": ["esc"], "seed": 3})
    assert r.status_code == 200
    body = r.json()
    assert body["trials"] == 2
    agg = body["results"]["esc"]
    assert agg["n_trials"] == 2
    assert len(agg["rmse_values"]) == 2
    assert agg["stopped_fraction"] == 0.0


def test_montecarlo_rejects_bad_trials():
    r = client.post("/montecarlo", json={"example": "quadratic", "trials": 0})
    assert r.status_code == 422


def test_sweep_rows():
    r = client.post("/sweep", json={"example": "quadratic", "modes": ["esc"],
                                    "trials": 1, "no_noise": True,
                                    "parameter": "a_esc", "values": [0.1, 0.2]})
    assert r.status_code == 200
    rows = r.json()["rows"]
    assert len(rows) == 2
    assert [row["value"] for row in rows] == [0.1, 0.2]


def test_sweep_unused_parameter_is_400():
    r = client.post("/sweep", json={"example": "quadratic", "modes": ["esc-aise"],
                                    "trials": 1, "no_noise": True,
                                    "parameter": "omega_h", "values": [0.05]})
    assert r.status_code == 400
    assert "omega_h" in r.json()["detail"]
