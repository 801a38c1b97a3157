"""JSON/HTTP API over one experiment, built on FastAPI.

One experiment per server process.  Long-running POSTs return a job id
and the client polls /api/jobs/{id}; completed job results are served as
the same canonical JSON documents the CLI prints, byte for byte (see
/api/jobs/{id}/result).  Mutations go through a single writer lock: a
second concurrent mutation gets 409 rather than queueing.

Error mapping: 400 invalid body or bad config, 404 unknown model or job,
409 concurrent mutation, 422 capability violation.
"""

from __future__ import annotations

import itertools
import os
import threading
from concurrent.futures import ThreadPoolExecutor

from fastapi import FastAPI, Request, Response
from fastapi.exceptions import RequestValidationError
from fastapi.responses import JSONResponse
from pydantic import BaseModel, Field

from .data import data_quality, load_csv, prepare, summarize
from .diagnose import DIAGNOSTIC_TESTS
from .errors import (CapabilityError, ConfigError, ConflictError, DataError,
                     NotFoundError, PersistenceError, WorkbenchError)
from .experiment import Experiment, emit_report, execute_test, save_experiment
from .explain import EXPLAIN_METHODS
from .models import (ModelSpec, TRAINERS, purify, read_scores_csv, register,
                     require_evaluable, train)
from .utils import canonical_json


class LoadBody(BaseModel):
    path: str
    target: str
    task: str
    name: str | None = None


class PrepareBody(BaseModel):
    test_ratio: float = 0.2
    seed: int | None = None


class TrainBody(BaseModel):
    family: str
    id: str | None = None
    params: dict = Field(default_factory=dict)
    seed: int | None = None
    purify: bool = False


class RegisterBody(BaseModel):
    id: str
    scores_path: str | None = None
    scores: list[float] | None = None


class InterpretBody(BaseModel):
    model: str
    local: bool = False
    row: int = 0


class ExplainBody(BaseModel):
    model: str
    method: str
    config: dict = Field(default_factory=dict)


class DiagnoseBody(BaseModel):
    model: str | None = None
    config: dict = Field(default_factory=dict)


class CompareBody(BaseModel):
    models: list[str]
    tests: list[str] | None = None
    config: dict = Field(default_factory=dict)


def canonical_response(doc, status_code: int = 200) -> Response:
    return Response(content=canonical_json(doc) + "\n", status_code=status_code,
                    media_type="application/json")


class _Jobs:
    """Sequential job ids, bounded single-worker pool, immutable results."""

    def __init__(self):
        self._counter = itertools.count(1)
        self._lock = threading.Lock()
        self._jobs: dict[str, dict] = {}
        self._pool = ThreadPoolExecutor(max_workers=1)

    def submit(self, fn) -> str:
        with self._lock:
            job_id = f"job-{next(self._counter)}"
            self._jobs[job_id] = {"status": "queued"}

        def run():
            with self._lock:
                self._jobs[job_id]["status"] = "running"
            try:
                result = fn()
            except WorkbenchError as e:
                with self._lock:
                    self._jobs[job_id] = {
                        "status": "failed",
                        "error": {"type": type(e).__name__, "message": str(e)},
                    }
                return
            with self._lock:
                self._jobs[job_id] = {"status": "done", "result": result}

        self._pool.submit(run)
        return job_id

    def get(self, job_id: str) -> dict:
        with self._lock:
            if job_id not in self._jobs:
                raise NotFoundError(f"no job with id {job_id!r}")
            return dict(self._jobs[job_id])

    def wait_all(self):
        self._pool.shutdown(wait=True)
        self._pool = ThreadPoolExecutor(max_workers=1)


def create_app(exp: Experiment | None = None,
               experiment_path: str | None = None) -> FastAPI:
    exp = exp if exp is not None else Experiment("session")
    app = FastAPI(title="glassbench service", docs_url=None, redoc_url=None,
                  openapi_url="/api/spec")
    jobs = _Jobs()
    writer = threading.Lock()
    app.state.experiment = exp
    app.state.jobs = jobs
    app.state.writer = writer

    def persist():
        if experiment_path:
            save_experiment(exp, experiment_path)

    def locked_mutation(fn):
        """Run fn under the writer lock; busy lock means a 409."""
        if not writer.acquire(blocking=False):
            raise ConflictError("another mutation is in progress")
        try:
            return fn()
        finally:
            writer.release()

    def locked_job(fn):
        def run():
            with writer:
                return fn()
        return run

    # -- error mapping -------------------------------------------------------

    @app.exception_handler(RequestValidationError)
    async def _invalid_body(request: Request, exc: RequestValidationError):
        detail = [{"loc": [str(p) for p in e["loc"]], "msg": e["msg"],
                   "type": e["type"]} for e in exc.errors()]
        return JSONResponse(status_code=400, content={"error": "invalid body",
                                                      "detail": detail})

    @app.exception_handler(WorkbenchError)
    async def _workbench_error(request: Request, exc: WorkbenchError):
        status = 400
        if isinstance(exc, NotFoundError):
            status = 404
        elif isinstance(exc, ConflictError):
            status = 409
        elif isinstance(exc, CapabilityError):
            status = 422
        elif isinstance(exc, PersistenceError):
            status = 500
        body = {"error": str(exc), "type": type(exc).__name__}
        if isinstance(exc, ConfigError) and exc.key_path:
            body["key_path"] = exc.key_path
        return JSONResponse(status_code=status, content=body)

    # -- read endpoints ------------------------------------------------------

    @app.get("/api/experiment")
    def get_experiment():
        ds = exp.dataset
        doc = {
            "name": exp.name,
            "seed": exp.seed,
            "created": exp.created,
            "updated": exp.updated,
            "dataset": None if ds is None else {
                "name": ds.name, "task": ds.task, "target": ds.target,
                "n_rows": ds.n_rows,
                "n_train": int(len(ds.train_indices)),
                "n_test": int(len(ds.test_indices)),
                "prepared": bool(ds.prepared),
                "features": ds.feature_names,
                "content_hash": exp.dataset_hash,
            },
            "models": [exp.models[m].describe() for m in exp.model_order],
            "results": [{"model": r["model"], "test": r["test"],
                         "config_hash": r["config_hash"], "status": r["status"]}
                        for r in exp.results],
        }
        return canonical_response(doc)

    @app.get("/api/data/summary")
    def get_summary():
        return canonical_response(summarize(exp.require_dataset()).to_dict())

    @app.get("/api/data/quality")
    def get_quality():
        return canonical_response(data_quality(exp.require_dataset()).to_dict())

    @app.get("/api/models")
    def get_models():
        return canonical_response(
            [exp.models[m].describe() for m in exp.model_order])

    @app.get("/api/results")
    def get_results():
        return canonical_response(exp.results)

    @app.get("/api/jobs/{job_id}")
    def get_job(job_id: str):
        return canonical_response(jobs.get(job_id))

    @app.get("/api/jobs/{job_id}/result")
    def get_job_result(job_id: str):
        job = jobs.get(job_id)
        if job["status"] != "done":
            raise NotFoundError(f"job {job_id!r} has no result "
                                f"(status {job['status']})")
        return canonical_response(job["result"])

    @app.get("/api/report")
    def get_report():
        return canonical_response(emit_report(exp))

    # -- synchronous mutations ----------------------------------------------

    @app.post("/api/data/load")
    def post_load(body: LoadBody):
        def fn():
            ds = load_csv(body.path, body.target, body.task, name=body.name)
            exp.attach_dataset(ds)
            persist()
            return {"dataset": ds.name, "rows": ds.n_rows,
                    "features": ds.feature_names, "task": ds.task}
        return canonical_response(locked_mutation(fn))

    @app.post("/api/data/prepare")
    def post_prepare(body: PrepareBody):
        def fn():
            ds = exp.require_dataset()
            seed = exp.seed if body.seed is None else body.seed
            ds = prepare(ds, body.test_ratio, seed)
            exp.attach_dataset(ds)
            persist()
            return {"dataset": ds.name, "rows": ds.n_rows,
                    "train": int(len(ds.train_indices)),
                    "test": int(len(ds.test_indices))}
        return canonical_response(locked_mutation(fn))

    @app.post("/api/models/register")
    def post_register(body: RegisterBody):
        def fn():
            ds = exp.require_dataset()
            if body.scores_path:
                scores = read_scores_csv(body.scores_path)
            elif body.scores is not None:
                import numpy as np
                scores = np.asarray(body.scores, dtype=float)
            else:
                raise ConfigError("register needs scores_path or scores",
                                  key_path="scores")
            model = register(body.id, ds.task, dataset=ds, scores=scores)
            mid = exp.add_model(model, body.id)
            persist()
            return {"model_id": mid, "model": model.describe()}
        return canonical_response(locked_mutation(fn))

    # -- long-running mutations (jobs) ---------------------------------------

    @app.post("/api/models/train", status_code=202)
    def post_train(body: TrainBody):
        if body.family not in TRAINERS:
            raise ConfigError(f"unknown model family {body.family!r}; expected "
                              f"one of {sorted(TRAINERS)}", key_path="family")
        mid = body.id or body.family
        if mid in exp.models:
            raise ConflictError(f"model id {mid!r} already present")
        exp.require_dataset()

        def fn():
            ds = exp.require_dataset()
            spec = ModelSpec(family=body.family, name=mid, params=dict(body.params),
                             seed=exp.seed if body.seed is None else body.seed)
            model = train(ds, spec)
            if body.purify:
                model = purify(model)
            out = exp.add_model(model, mid)
            persist()
            return {"model_id": out, "model": model.describe()}

        return canonical_response({"job_id": jobs.submit(locked_job(fn))}, 202)

    @app.post("/api/interpret", status_code=202)
    def post_interpret(body: InterpretBody):
        model = exp.get_model(body.model)
        if not model.interpretable:
            raise CapabilityError(
                f"model_interpret() is not valid for model {body.model!r}: "
                f"family {model.family!r} is not inherently interpretable"
            )
        entry = {"test": "interpret_local" if body.local else "interpret",
                 "model": body.model}
        if body.local:
            entry["config"] = {"row": body.row}

        def fn():
            out = execute_test(exp, entry)
            persist()
            return out[0]

        return canonical_response({"job_id": jobs.submit(locked_job(fn))}, 202)

    @app.post("/api/explain", status_code=202)
    def post_explain(body: ExplainBody):
        model = exp.get_model(body.model)
        require_evaluable(model, "explanation")
        if body.method not in EXPLAIN_METHODS:
            raise ConfigError(f"unknown explainer {body.method!r}; expected one "
                              f"of {list(EXPLAIN_METHODS)}", key_path="method")
        entry = {"test": "explain", "method": body.method, "model": body.model,
                 "config": dict(body.config)}

        def fn():
            out = execute_test(exp, entry)
            persist()
            return out[0]

        return canonical_response({"job_id": jobs.submit(locked_job(fn))}, 202)

    @app.post("/api/diagnose/{test}", status_code=202)
    def post_diagnose(test: str, body: DiagnoseBody):
        if test not in DIAGNOSTIC_TESTS:
            raise NotFoundError(f"no diagnostic named {test!r}; expected one of "
                                f"{list(DIAGNOSTIC_TESTS)}")
        mid = body.model
        if mid is None:
            if len(exp.model_order) != 1:
                raise ConfigError("pick a model: experiment has "
                                  f"{len(exp.model_order)} models", key_path="model")
            mid = exp.model_order[0]
        model = exp.get_model(mid)
        if test == "robustness":
            require_evaluable(model, "robustness analysis")
        entry = {"test": test, "model": mid, "config": dict(body.config)}

        def fn():
            out = execute_test(exp, entry)
            persist()
            return out[0]

        return canonical_response({"job_id": jobs.submit(locked_job(fn))}, 202)

    @app.post("/api/compare", status_code=202)
    def post_compare(body: CompareBody):
        for mid in body.models:
            require_evaluable(exp.get_model(mid), "model comparison")
        cfg = dict(body.config)
        if body.tests is not None:
            cfg["tests"] = list(body.tests)
        entry = {"test": "compare", "model": list(body.models), "config": cfg}

        def fn():
            out = execute_test(exp, entry)
            persist()
            return out[0]

        return canonical_response({"job_id": jobs.submit(locked_job(fn))}, 202)

    # -- optional static dashboard -------------------------------------------

    dist = os.path.join(os.path.dirname(os.path.dirname(
        os.path.dirname(os.path.abspath(__file__)))), "frontend", "dist")
    if os.path.isdir(dist):
        from fastapi.staticfiles import StaticFiles
        app.mount("/", StaticFiles(directory=dist, html=True), name="dashboard")

    return app
