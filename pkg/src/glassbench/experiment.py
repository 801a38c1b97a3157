"""Experiment container, pipeline orchestration, and report bundling.

An Experiment accumulates a prepared dataset, models by id, and results
keyed by (model id, test, config hash).  Results are append-only: running
the same test with the same config is a no-op, a changed config appends a
new entry.  Files are single JSON documents carrying a schema version and
an integrity hash over the payload.
"""

from __future__ import annotations

import datetime
import hashlib
import json
import os

import jsonschema

from . import explain as explain_mod
from .compare import model_compare
from .data import Dataset, data_quality, load_csv, prepare, summarize
from .diagnose import DIAGNOSTIC_TESTS, model_diagnose
from .errors import (ConfigError, ConflictError, DataError, NotFoundError,
                     PersistenceError, WorkbenchError)
from .interpret import interpret_global, interpret_local
from .models import (ModelSpec, TrainedModel, model_from_dict, model_to_dict,
                     read_scores_csv, register, train)
from .utils import canonical_json

EXPERIMENT_SCHEMA_VERSION = 1
REPORT_SCHEMA_VERSION = 1

_HASH_PREFIX = 16


def _sha256(text: str) -> str:
    return hashlib.sha256(text.encode("utf-8")).hexdigest()


def _now() -> str:
    return datetime.datetime.now(datetime.timezone.utc).isoformat(timespec="seconds")


def config_hash(config: dict) -> str:
    return _sha256(canonical_json(config))[:_HASH_PREFIX]


def dataset_hash(ds: Dataset) -> str:
    return _sha256(canonical_json(ds.to_dict()))


class Experiment:
    def __init__(self, name: str, seed: int = 0):
        self.name = name
        self.seed = int(seed)
        self.dataset: Dataset | None = None
        self.dataset_hash: str | None = None
        self.models: dict[str, TrainedModel] = {}
        self.model_order: list[str] = []
        self.results: list[dict] = []
        self.created = _now()
        self.updated = self.created

    # -- mutation (callers serialize writes; see service module) ------------

    def touch(self):
        self.updated = _now()

    def attach_dataset(self, ds: Dataset):
        self.dataset = ds
        self.dataset_hash = dataset_hash(ds)
        self.touch()

    def require_dataset(self) -> Dataset:
        if self.dataset is None:
            raise DataError("experiment has no dataset; load and prepare one first")
        return self.dataset

    def add_model(self, model: TrainedModel, model_id: str | None = None) -> str:
        model_id = model_id or model.name
        if model_id in self.models:
            raise ConflictError(f"model id {model_id!r} already present")
        self.models[model_id] = model
        self.model_order.append(model_id)
        self.touch()
        return model_id

    def get_model(self, model_id: str) -> TrainedModel:
        if model_id not in self.models:
            raise NotFoundError(f"no model with id {model_id!r}")
        return self.models[model_id]

    def add_result(self, model_id: str, test: str, config: dict, *,
                   result: dict | None = None, error: Exception | None = None,
                   seed: int | None = None) -> dict:
        chash = config_hash(config)
        for entry in self.results:
            if (entry["model"], entry["test"], entry["config_hash"]) == (model_id, test, chash):
                return entry   # append-only: identical key already recorded
        entry = {
            "model": model_id,
            "test": test,
            "config": config,
            "config_hash": chash,
            "seed": self.seed if seed is None else int(seed),
            "status": "error" if error is not None else "ok",
        }
        if error is not None:
            entry["error"] = {"type": type(error).__name__, "message": str(error)}
        else:
            entry["result"] = result
        self.results.append(entry)
        self.touch()
        return entry

    # -- persistence --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "seed": self.seed,
            "created": self.created,
            "updated": self.updated,
            "dataset": None if self.dataset is None else self.dataset.to_dict(),
            "dataset_hash": self.dataset_hash,
            "model_order": list(self.model_order),
            "models": {mid: model_to_dict(m) for mid, m in self.models.items()},
            "results": self.results,
        }

    @staticmethod
    def from_dict(d: dict) -> "Experiment":
        exp = Experiment(d["name"], d.get("seed", 0))
        exp.created = d.get("created", exp.created)
        exp.updated = d.get("updated", exp.updated)
        if d.get("dataset") is not None:
            exp.dataset = Dataset.from_dict(d["dataset"])
            stored = d.get("dataset_hash")
            actual = dataset_hash(exp.dataset)
            if stored is not None and stored != actual:
                raise PersistenceError("dataset content hash mismatch: file is corrupt")
            exp.dataset_hash = actual
        exp.model_order = list(d.get("model_order", []))
        exp.models = {mid: model_from_dict(md) for mid, md in d.get("models", {}).items()}
        exp.results = list(d.get("results", []))
        return exp


def save_experiment(exp: Experiment, path) -> None:
    payload = exp.to_dict()
    doc = {
        "kind": "experiment",
        "schema_version": EXPERIMENT_SCHEMA_VERSION,
        "integrity": _sha256(canonical_json(payload)),
        "payload": payload,
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(canonical_json(doc))
        fh.write("\n")
    os.replace(tmp, path)


def load_experiment(path) -> Experiment:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError:
        raise PersistenceError(f"no experiment file at {path}")
    except json.JSONDecodeError as e:
        raise PersistenceError(f"experiment file is corrupt: {e}")
    if not isinstance(doc, dict) or doc.get("kind") != "experiment":
        raise PersistenceError("not a saved experiment document")
    version = doc.get("schema_version")
    if version != EXPERIMENT_SCHEMA_VERSION:
        raise PersistenceError(
            f"experiment schema version {version} needs migration to "
            f"{EXPERIMENT_SCHEMA_VERSION}; refusing to load"
        )
    payload = doc.get("payload")
    if _sha256(canonical_json(payload)) != doc.get("integrity"):
        raise PersistenceError("experiment integrity hash mismatch: file is corrupt")
    return Experiment.from_dict(payload)


# ---------------------------------------------------------------------------
# Pipeline configs
# ---------------------------------------------------------------------------

_MODEL_SCHEMA = {
    "type": "object",
    "properties": {
        "id": {"type": "string", "minLength": 1},
        "family": {"type": "string",
                   "enum": ["glm", "gam", "tree", "xgb1", "xgb2", "score_table"]},
        "params": {"type": "object"},
        "seed": {"type": "integer"},
        "scores_path": {"type": "string"},
        "purify": {"type": "boolean"},
    },
    "required": ["family"],
    "additionalProperties": False,
}

_TEST_SCHEMA = {
    "type": "object",
    "properties": {
        "test": {"type": "string",
                 "enum": sorted(set(DIAGNOSTIC_TESTS)
                                | {"interpret", "interpret_local", "explain", "compare"})},
        "model": {"oneOf": [{"type": "string"},
                            {"type": "array", "items": {"type": "string"}}]},
        "method": {"type": "string", "enum": ["pfi", "pdp", "ale", "lime", "shap"]},
        "config": {"type": "object"},
    },
    "required": ["test"],
    "additionalProperties": False,
}

PIPELINE_SCHEMA = {
    "type": "object",
    "properties": {
        "name": {"type": "string", "minLength": 1},
        "seed": {"type": "integer"},
        "data": {
            "type": "object",
            "properties": {
                "path": {"type": "string", "minLength": 1},
                "target": {"type": "string", "minLength": 1},
                "task": {"type": "string", "enum": ["regression", "binary"]},
                "name": {"type": "string"},
            },
            "required": ["path", "target", "task"],
            "additionalProperties": False,
        },
        "prepare": {
            "type": "object",
            "properties": {"test_ratio": {"type": "number",
                                          "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
            "additionalProperties": False,
        },
        "models": {"type": "array", "items": _MODEL_SCHEMA, "minItems": 1},
        "tests": {"type": "array", "items": _TEST_SCHEMA},
    },
    "required": ["name", "data", "models"],
    "additionalProperties": False,
}


def validate_pipeline_config(config: dict) -> None:
    validator = jsonschema.Draft202012Validator(PIPELINE_SCHEMA)
    errors = sorted(validator.iter_errors(config), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        key_path = ".".join(str(p) for p in e.absolute_path) or "(root)"
        raise ConfigError(f"invalid pipeline config: {e.message}", key_path=key_path)


def _run_one_test(exp: Experiment, entry: dict, default_seed: int) -> list[dict]:
    ds = exp.require_dataset()
    test = entry["test"]
    cfg = dict(entry.get("config", {}))
    touched: list[dict] = []

    if test == "compare":
        ids = entry.get("model") or list(exp.model_order)
        if isinstance(ids, str):
            ids = [ids]
        stored = {"models": ids, **cfg}
        try:
            mdl = [exp.get_model(i) for i in ids]
            tests = cfg.pop("tests", ("accuracy",))
            result = model_compare(mdl, ds, tests=tests, seed=default_seed, config=cfg)
            touched.append(exp.add_result(",".join(ids), "compare", stored, result=result))
        except WorkbenchError as err:
            touched.append(exp.add_result(",".join(ids), "compare", stored, error=err))
        return touched

    ids = entry.get("model") or list(exp.model_order)
    if isinstance(ids, str):
        ids = [ids]
    for mid in ids:
        stored = dict(cfg)
        if test == "explain":
            stored = {"method": entry.get("method"), **cfg}
        seed = int(cfg.get("seed", default_seed))
        try:
            model = exp.get_model(mid)
            if test == "interpret":
                if cfg:
                    raise ConfigError(f"interpret takes no config keys, got {sorted(cfg)}",
                                      key_path=f"config.{sorted(cfg)[0]}")
                result = interpret_global(model)
            elif test == "interpret_local":
                unknown = sorted(set(cfg) - {"row"})
                if unknown:
                    raise ConfigError(f"unknown config keys: {unknown}",
                                      key_path=f"config.{unknown[0]}")
                row = int(cfg.get("row", 0))
                if not (0 <= row < ds.n_rows):
                    raise DataError(f"row {row} out of range for {ds.n_rows} rows")
                instance = {f: ds.column(f).values[row] for f in ds.feature_names}
                result = interpret_local(model, instance)
            elif test == "explain":
                method = entry.get("method")
                if method is None:
                    raise ConfigError("explain needs a method", key_path="method")
                result = explain_mod.model_explain(model, ds, method, cfg,
                                                  seed=default_seed)
            else:
                run_cfg = dict(cfg)
                if test in ("reliability", "robustness", "resilience"):
                    run_cfg.setdefault("seed", default_seed)
                    seed = int(run_cfg["seed"])
                result = model_diagnose(model, ds, test, run_cfg)
            touched.append(exp.add_result(mid, test, stored, result=result, seed=seed))
        except WorkbenchError as err:
            touched.append(exp.add_result(mid, test, stored, error=err, seed=seed))
    return touched


def run_pipeline(config: dict) -> Experiment:
    """Execute load, prepare, train/register, then every requested test.

    A failing test records an error entry and the run continues; config
    errors and unreadable data abort before any work starts.
    """
    validate_pipeline_config(config)
    seed = int(config.get("seed", 0))
    exp = Experiment(config["name"], seed)

    data_cfg = config["data"]
    try:
        ds = load_csv(data_cfg["path"], data_cfg["target"], data_cfg["task"],
                      name=data_cfg.get("name"))
    except OSError as e:
        raise DataError(f"cannot read data file {data_cfg['path']!r}: {e}")
    ratio = config.get("prepare", {}).get("test_ratio", 0.2)
    ds = prepare(ds, ratio, seed)
    exp.attach_dataset(ds)

    for i, mc in enumerate(config["models"]):
        family = mc["family"]
        mid = mc.get("id") or f"{family}_{i}"
        try:
            if family == "score_table":
                path = mc.get("scores_path")
                if not path:
                    raise ConfigError("score_table model needs scores_path",
                                      key_path=f"models.{i}.scores_path")
                scores = read_scores_csv(path)
                model = register(mid, ds.task, dataset=ds, scores=scores)
            else:
                spec = ModelSpec(family=family, name=mid,
                                 params=dict(mc.get("params", {})),
                                 seed=int(mc.get("seed", seed)))
                model = train(ds, spec)
                if mc.get("purify"):
                    from .models import purify
                    model = purify(model)
            exp.add_model(model, mid)
        except WorkbenchError as err:
            exp.add_result(mid, "train", dict(mc), error=err)

    for entry in config.get("tests", []):
        _run_one_test(exp, entry, seed)
    return exp


def execute_test(exp: Experiment, entry: dict, seed: int | None = None) -> list[dict]:
    """Run one test entry against the experiment and return the stored entries.

    This is the single execution path shared by pipeline runs, the CLI, and
    the HTTP service, so a given (config, seed) always stores and prints the
    same document.
    """
    return _run_one_test(exp, entry, exp.seed if seed is None else int(seed))


# ---------------------------------------------------------------------------
# Report bundles
# ---------------------------------------------------------------------------


def emit_report(exp: Experiment, path=None) -> dict:
    """Bundle everything reproducible into one deterministic JSON document."""
    if not exp.results:
        raise DataError("experiment has no results; nothing to report")
    ds = exp.dataset
    bundle = {
        "kind": "report",
        "schema_version": REPORT_SCHEMA_VERSION,
        "experiment": exp.name,
        "seed": exp.seed,
        "dataset": None,
        "models": {mid: exp.models[mid].describe()
                   for mid in exp.model_order if mid in exp.models},
        "results": sorted(exp.results,
                          key=lambda r: (r["model"], r["test"], r["config_hash"])),
    }
    if ds is not None:
        bundle["dataset"] = {
            "name": ds.name,
            "task": ds.task,
            "target": ds.target,
            "n_rows": ds.n_rows,
            "n_train": int(len(ds.train_indices)),
            "n_test": int(len(ds.test_indices)),
            "content_hash": exp.dataset_hash,
            "summary": summarize(ds).to_dict(),
            "quality": data_quality(ds).to_dict(),
        }
    if path is not None:
        tmp = f"{path}.tmp"
        with open(tmp, "w", encoding="utf-8") as fh:
            fh.write(canonical_json(bundle))
            fh.write("\n")
        os.replace(tmp, path)
    return bundle
