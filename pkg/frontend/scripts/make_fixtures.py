"""Capture API responses for the dashboard tests.

Builds one seeded demo experiment through the HTTP surface only (load,
prepare, train, register, diagnose, compare, interpret, explain) and
writes the raw response bytes to tests/fixtures/.  The dashboard test
suite checks its rendered output against these bytes, so regenerate them
whenever the engine changes:

    python3 scripts/make_fixtures.py
"""

import csv
import math
import os
import sys
import tempfile
import time

import numpy as np
from fastapi.testclient import TestClient

from glassbench.service import create_app

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "tests", "fixtures")

N_ROWS = 300
SEED = 7


def write_demo_csv(path: str) -> None:
    rng = np.random.default_rng(SEED)
    x1 = rng.normal(0.0, 1.0, N_ROWS)
    x2 = rng.normal(0.0, 1.0, N_ROWS)
    x3 = rng.uniform(-2.0, 2.0, N_ROWS)
    y = x1 * x2 + np.sin(x3) + 0.1 * rng.normal(0.0, 1.0, N_ROWS)
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["x1", "x2", "x3", "y"])
        for i in range(N_ROWS):
            w.writerow([repr(float(x1[i])), repr(float(x2[i])),
                        repr(float(x3[i])), repr(float(y[i]))])


def save(name: str, content: bytes) -> None:
    with open(os.path.join(OUT, name), "wb") as fh:
        fh.write(content)
    print(f"  {name}: {len(content)} bytes")


def wait_job(client: TestClient, job_id: str, timeout: float = 120.0) -> None:
    t0 = time.time()
    while True:
        doc = client.get(f"/api/jobs/{job_id}").json()
        if doc["status"] == "done":
            return
        if doc["status"] == "failed":
            raise RuntimeError(f"job {job_id} failed: {doc.get('error')}")
        if time.time() - t0 > timeout:
            raise RuntimeError(f"job {job_id} timed out")
        time.sleep(0.05)


def run_job(client: TestClient, path: str, body: dict) -> bytes:
    r = client.post(path, json=body)
    assert r.status_code == 202, (path, r.status_code, r.text)
    job_id = r.json()["job_id"]
    wait_job(client, job_id)
    out = client.get(f"/api/jobs/{job_id}/result")
    assert out.status_code == 200, (path, out.status_code, out.text)
    return out.content


def main() -> int:
    os.makedirs(OUT, exist_ok=True)
    app = create_app()
    with tempfile.TemporaryDirectory() as td:
        csv_path = os.path.join(td, "demo.csv")
        write_demo_csv(csv_path)
        with TestClient(app) as client:
            r = client.post("/api/data/load", json={
                "path": csv_path, "target": "y",
                "task": "regression", "name": "demo"})
            assert r.status_code == 200, r.text
            r = client.post("/api/data/prepare",
                            json={"test_ratio": 0.25, "seed": 0})
            assert r.status_code == 200, r.text

            r = client.post("/api/models/train",
                            json={"family": "glm", "id": "glm"})
            assert r.status_code == 202, r.text
            wait_job(client, r.json()["job_id"])
            r = client.post("/api/models/train", json={
                "family": "xgb2", "id": "xgb2",
                "params": {"rounds": 40}, "purify": True})
            assert r.status_code == 202, r.text
            wait_job(client, r.json()["job_id"])

            # score-table model: has predictions but no structure to open up
            scores = [round(math.tanh(0.31 * i / N_ROWS - 0.15), 6)
                      for i in range(N_ROWS)]
            r = client.post("/api/models/register",
                            json={"id": "ext", "scores": scores})
            assert r.status_code == 200, r.text

            save("weakspot.json", run_job(client, "/api/diagnose/weakspot", {
                "model": "xgb2",
                "config": {"features": ["x1"], "bins": 8}}))
            save("compare.json", run_job(client, "/api/compare", {
                "models": ["glm", "xgb2"],
                "tests": ["accuracy", "robustness", "reliability"],
                "config": {"robustness": {"lambdas": [0.0, 0.2, 0.4],
                                          "repeats": 5}}}))
            save("interpret.json", run_job(client, "/api/interpret",
                                           {"model": "glm"}))
            save("interpret_local.json", run_job(client, "/api/interpret", {
                "model": "glm", "local": True, "row": 3}))
            save("pfi.json", run_job(client, "/api/explain", {
                "model": "xgb2", "method": "pfi",
                "config": {"repeats": 3}}))
            save("ale.json", run_job(client, "/api/explain", {
                "model": "xgb2", "method": "ale",
                "config": {"feature": "x1", "bins": 10}}))
            save("accuracy.json", run_job(client, "/api/diagnose/accuracy",
                                          {"model": "xgb2"}))

            save("experiment.json", client.get("/api/experiment").content)
            save("models.json", client.get("/api/models").content)
            save("summary.json", client.get("/api/data/summary").content)
            save("quality.json", client.get("/api/data/quality").content)
    print("done")
    return 0


if __name__ == "__main__":
    sys.exit(main())
