"""Model families, training dispatch, and model persistence."""

from __future__ import annotations

import os

from ..errors import ConfigError, PersistenceError
from ..utils import canonical_json
from .base import FeatureEncoder, ModelSpec, TrainedModel, require_evaluable
from .boosting import Xgb1Model, Xgb2Model, purify, train_xgb1, train_xgb2
from .gam import GamModel, train_gam
from .glm import GlmModel, train_glm
from .registered import CallableModel, ScoreTableModel, read_scores_csv, register
from .tree import TreeModel, train_tree

TRAINERS = {
    "glm": train_glm,
    "gam": train_gam,
    "tree": train_tree,
    "xgb1": train_xgb1,
    "xgb2": train_xgb2,
}

MODEL_CLASSES = {
    "glm": GlmModel,
    "gam": GamModel,
    "tree": TreeModel,
    "xgb1": Xgb1Model,
    "xgb2": Xgb2Model,
    "score_table": ScoreTableModel,
}

GLASS_FAMILIES = tuple(TRAINERS)
MODEL_SCHEMA_VERSION = 1


def train(ds, spec: ModelSpec) -> TrainedModel:
    trainer = TRAINERS.get(spec.family)
    if trainer is None:
        raise ConfigError(
            f"unknown model family '{spec.family}'; expected one of {sorted(TRAINERS)}",
            key_path="family",
        )
    return trainer(ds, spec)


def model_to_dict(model: TrainedModel) -> dict:
    return {
        "schema_version": MODEL_SCHEMA_VERSION,
        "kind": "model",
        "family": model.family,
        "payload": model.payload(),
    }


def model_from_dict(d: dict) -> TrainedModel:
    if not isinstance(d, dict) or d.get("kind") != "model":
        raise PersistenceError("not a saved model document")
    if d.get("schema_version") != MODEL_SCHEMA_VERSION:
        raise PersistenceError(
            f"unsupported model schema version {d.get('schema_version')!r}; "
            f"this build reads version {MODEL_SCHEMA_VERSION}"
        )
    family = d.get("family")
    cls = MODEL_CLASSES.get(family)
    if cls is None:
        raise PersistenceError(f"unknown model family '{family}' in saved document")
    return cls.from_payload(d["payload"])


def save_model(model: TrainedModel, path: str) -> None:
    text = canonical_json(model_to_dict(model))
    tmp = f"{path}.tmp.{os.getpid()}"
    with open(tmp, "w", encoding="utf-8") as fh:
        fh.write(text + "\n")
    os.replace(tmp, path)


def load_model(path: str) -> TrainedModel:
    import json

    try:
        with open(path, "r", encoding="utf-8") as fh:
            d = json.load(fh)
    except FileNotFoundError:
        raise PersistenceError(f"no model file at {path}") from None
    except json.JSONDecodeError as exc:
        raise PersistenceError(f"model file {path} is not valid JSON: {exc}") from None
    return model_from_dict(d)


__all__ = [
    "CallableModel",
    "FeatureEncoder",
    "GLASS_FAMILIES",
    "GamModel",
    "GlmModel",
    "MODEL_CLASSES",
    "MODEL_SCHEMA_VERSION",
    "ModelSpec",
    "ScoreTableModel",
    "TRAINERS",
    "TrainedModel",
    "TreeModel",
    "Xgb1Model",
    "Xgb2Model",
    "load_model",
    "model_from_dict",
    "model_to_dict",
    "purify",
    "read_scores_csv",
    "register",
    "require_evaluable",
    "save_model",
    "train",
    "train_gam",
    "train_glm",
    "train_tree",
    "train_xgb1",
    "train_xgb2",
]
