import json

import numpy as np
import pytest
from fastapi.testclient import TestClient

from conftest import write_csv
from glassbench.cli import main
from glassbench.service import create_app


@pytest.fixture()
def csv_path(tmp_path):
    rng = np.random.default_rng(1)
    n = 200
    x1 = rng.normal(size=n)
    x2 = rng.normal(size=n)
    y = x1 - 0.5 * x2 + 0.1 * rng.normal(size=n)
    rows = [[f"{a:.8f}", f"{b:.8f}", f"{c:.8f}"] for a, b, c in zip(x1, x2, y)]
    path = tmp_path / "d.csv"
    write_csv(path, ["x1", "x2", "y"], rows)
    return str(path)


@pytest.fixture()
def client():
    app = create_app()
    with TestClient(app) as c:
        c.app = app
        yield c


def _drain(client):
    client.app.state.jobs.wait_all()


def _load_and_train(client, csv_path, family="glm", mid="m1"):
    r = client.post("/api/data/load", json={"path": csv_path, "target": "y",
                                            "task": "regression"})
    assert r.status_code == 200
    r = client.post("/api/data/prepare", json={"test_ratio": 0.25})
    assert r.status_code == 200
    r = client.post("/api/models/train", json={"family": family, "id": mid})
    assert r.status_code == 202
    job = r.json()["job_id"]
    _drain(client)
    status = client.get(f"/api/jobs/{job}").json()
    assert status["status"] == "done"
    return job


def test_initial_experiment_empty(client):
    r = client.get("/api/experiment")
    assert r.status_code == 200
    doc = r.json()
    assert doc["dataset"] is None
    assert doc["models"] == []
    assert doc["results"] == []


def test_train_flow_and_models_listing(client, csv_path):
    _load_and_train(client, csv_path)
    models = client.get("/api/models").json()
    assert [m["name"] for m in models] == ["m1"]
    assert models[0]["family"] == "glm"
    assert models[0]["interpretable"] is True
    doc = client.get("/api/experiment").json()
    assert doc["dataset"]["n_rows"] == 200
    assert doc["dataset"]["task"] == "regression"


def test_summary_and_quality(client, csv_path):
    client.post("/api/data/load", json={"path": csv_path, "target": "y",
                                        "task": "regression"})
    r = client.get("/api/data/summary")
    assert r.status_code == 200
    assert set(r.json()["numeric"]) == {"x1", "x2", "y"}
    r = client.get("/api/data/quality")
    assert r.status_code == 200


def test_summary_without_dataset_is_400(client):
    r = client.get("/api/data/summary")
    assert r.status_code == 400
    assert "error" in r.json()


def test_invalid_body_is_field_level_400(client):
    r = client.post("/api/data/load", json={"target": "y"})
    assert r.status_code == 400
    doc = r.json()
    assert doc["error"] == "invalid body"
    locs = [tuple(d["loc"]) for d in doc["detail"]]
    assert any("path" in loc for loc in locs)
    r = client.post("/api/data/prepare", json={"test_ratio": "lots"})
    assert r.status_code == 400


def test_unknown_family_and_duplicate_id(client, csv_path):
    _load_and_train(client, csv_path)
    r = client.post("/api/models/train", json={"family": "ebm"})
    assert r.status_code == 400
    assert "key_path" in r.json()
    r = client.post("/api/models/train", json={"family": "glm", "id": "m1"})
    assert r.status_code == 409


def test_unknown_job_and_model(client, csv_path):
    assert client.get("/api/jobs/job-99").status_code == 404
    _load_and_train(client, csv_path)
    r = client.post("/api/diagnose/accuracy", json={"model": "missing"})
    assert r.status_code == 404


def test_unknown_diagnostic_is_404(client, csv_path):
    _load_and_train(client, csv_path)
    r = client.post("/api/diagnose/sideways", json={})
    assert r.status_code == 404


def test_diagnose_job_lifecycle(client, csv_path):
    _load_and_train(client, csv_path)
    r = client.post("/api/diagnose/accuracy", json={})
    assert r.status_code == 202
    job = r.json()["job_id"]
    _drain(client)
    doc = client.get(f"/api/jobs/{job}").json()
    assert doc["status"] == "done"
    entry = client.get(f"/api/jobs/{job}/result").json()
    assert entry["status"] == "ok"
    assert entry["result"]["kind"] == "accuracy"
    results = client.get("/api/results").json()
    assert len(results) == 1


def test_interpret_capability_violation_is_sync_422(client, csv_path):
    _load_and_train(client, csv_path)
    n = 200
    scores = [0.0] * n
    r = client.post("/api/models/register", json={"id": "ext", "scores": scores})
    assert r.status_code == 200
    r = client.post("/api/interpret", json={"model": "ext"})
    assert r.status_code == 422
    doc = r.json()
    assert doc["type"] == "CapabilityError"
    assert "interpretable" in doc["error"]
    # the trained model interprets fine
    r = client.post("/api/interpret", json={"model": "m1"})
    assert r.status_code == 202
    job = r.json()["job_id"]
    _drain(client)
    entry = client.get(f"/api/jobs/{job}/result").json()
    assert entry["result"]["kind"] == "global_interpretation"


def test_explain_validation_and_job(client, csv_path):
    _load_and_train(client, csv_path)
    r = client.post("/api/explain", json={"model": "m1", "method": "mystery"})
    assert r.status_code == 400
    r = client.post("/api/explain", json={"model": "m1", "method": "pfi",
                                          "config": {"repeats": 2}})
    assert r.status_code == 202
    _drain(client)
    entry = client.get(f"/api/jobs/{r.json()['job_id']}/result").json()
    assert entry["result"]["kind"] == "pfi"


def test_compare_job(client, csv_path):
    _load_and_train(client, csv_path)
    r = client.post("/api/models/train", json={"family": "xgb1", "id": "m2",
                                               "params": {"rounds": 30}})
    assert r.status_code == 202
    _drain(client)
    r = client.post("/api/compare", json={"models": ["m1", "m2"]})
    assert r.status_code == 202
    _drain(client)
    entry = client.get(f"/api/jobs/{r.json()['job_id']}/result").json()
    assert entry["result"]["kind"] == "comparison"
    assert entry["result"]["models"] == ["m1", "m2"]


def test_concurrent_mutation_conflicts(client, csv_path):
    client.post("/api/data/load", json={"path": csv_path, "target": "y",
                                        "task": "regression"})
    writer = client.app.state.writer
    assert writer.acquire(blocking=False)
    try:
        r = client.post("/api/data/prepare", json={})
        assert r.status_code == 409
    finally:
        writer.release()
    r = client.post("/api/data/prepare", json={})
    assert r.status_code == 200


def test_failed_job_reports_error(client, csv_path):
    _load_and_train(client, csv_path)
    # fairness on a regression task fails inside the job
    r = client.post("/api/diagnose/fairness", json={"model": "m1",
                                                    "config": {"protected": "x1"}})
    assert r.status_code == 202
    _drain(client)
    doc = client.get(f"/api/jobs/{r.json()['job_id']}").json()
    assert doc["status"] == "done"
    entry = client.get(f"/api/jobs/{r.json()['job_id']}/result").json()
    assert entry["status"] == "error"
    assert entry["error"]["type"] == "DataError"


def test_report_and_openapi(client, csv_path):
    _load_and_train(client, csv_path)
    r = client.post("/api/diagnose/accuracy", json={})
    _drain(client)
    bundle = client.get("/api/report").json()
    assert bundle["kind"] == "report"
    assert [e["test"] for e in bundle["results"]] == ["accuracy"]
    spec = client.get("/api/spec").json()
    assert spec["info"]["title"] == "glassbench service"
    assert "/api/diagnose/{test}" in spec["paths"]


def test_persistence_roundtrip(tmp_path, csv_path):
    exp_file = str(tmp_path / "exp.json")
    app = create_app(experiment_path=exp_file)
    with TestClient(app) as client:
        client.app = app
        client.post("/api/data/load", json={"path": csv_path, "target": "y",
                                            "task": "regression"})
        client.post("/api/data/prepare", json={})
        r = client.post("/api/models/train", json={"family": "glm", "id": "g"})
        app.state.jobs.wait_all()
    from glassbench.experiment import load_experiment
    back = load_experiment(exp_file)
    assert back.model_order == ["g"]


def test_job_result_bytes_match_cli(tmp_path, csv_path, capsys):
    # the same diagnostic through the CLI and the service must serialize
    # byte-identically
    exp_file = str(tmp_path / "exp.json")
    assert main(["data", "load", "--data", csv_path, "--target", "y",
                 "--task", "regression", "--experiment", exp_file]) == 0
    assert main(["data", "prepare", "--experiment", exp_file]) == 0
    assert main(["train", "--model", "glm", "--id", "m1",
                 "--experiment", exp_file]) == 0
    capsys.readouterr()
    assert main(["diagnose", "--test", "accuracy",
                 "--experiment", exp_file]) == 0
    cli_bytes = capsys.readouterr().out.encode()

    app = create_app()
    with TestClient(app) as client:
        client.post("/api/data/load", json={"path": csv_path, "target": "y",
                                            "task": "regression"})
        client.post("/api/data/prepare", json={})
        r = client.post("/api/models/train", json={"family": "glm", "id": "m1"})
        app.state.jobs.wait_all()
        r = client.post("/api/diagnose/accuracy", json={"model": "m1"})
        app.state.jobs.wait_all()
        service_bytes = client.get(f"/api/jobs/{r.json()['job_id']}/result").content
    assert service_bytes == cli_bytes


def test_dashboard_static_mount(client):
    # served only when the frontend build exists; API routes keep priority
    import pathlib
    dist = pathlib.Path(__file__).resolve().parents[1] / "frontend" / "dist"
    if not dist.is_dir():
        pytest.skip("dashboard not built")
    r = client.get("/")
    assert r.status_code == 200
    assert "text/html" in r.headers["content-type"]
    assert 'id="app"' in r.text
    assert client.get("/main.js").status_code == 200
    assert client.get("/api/experiment").status_code == 200
