"""Shared model machinery: the uniform prediction contract and feature encoding."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from ..data import BINARY, CATEGORICAL, NUMERIC, Dataset
from ..errors import CapabilityError, ConfigError, DataError


@dataclass
class ModelSpec:
    """What to train: family name, free-form name, hyperparameters, seed."""

    family: str
    name: str | None = None
    params: dict = field(default_factory=dict)
    seed: int = 0

    def to_dict(self):
        return {"family": self.family, "name": self.name, "params": dict(self.params),
                "seed": int(self.seed)}


class FeatureEncoder:
    """Maps raw feature columns to a numeric design matrix.

    Numeric features pass through; categorical features get target-mean
    ordinal encoding computed on the train split only.  Levels unseen at
    train time fall back to the overall train target mean.
    """

    def __init__(self):
        self.feature_names: list[str] = []
        self.kinds: dict[str, str] = {}
        self.level_maps: dict[str, dict[str, float]] = {}
        self.default_value: float = 0.0

    @staticmethod
    def fit(ds: Dataset) -> "FeatureEncoder":
        enc = FeatureEncoder()
        tr = ds.train_indices
        y = ds.y[tr]
        enc.default_value = float(y.mean()) if len(y) else 0.0
        for c in ds.feature_columns:
            enc.feature_names.append(c.name)
            enc.kinds[c.name] = c.kind
            if c.kind == CATEGORICAL:
                levels = c.values[tr].astype(str)
                mapping = {}
                for lev in np.unique(levels):
                    mapping[str(lev)] = float(y[levels == lev].mean())
                enc.level_maps[c.name] = mapping
        return enc

    def encode(self, block: dict[str, np.ndarray]) -> np.ndarray:
        cols = []
        for name in self.feature_names:
            if name not in block:
                raise DataError(f"row block missing feature {name!r}")
            v = block[name]
            if self.kinds[name] == NUMERIC:
                arr = np.asarray(v, dtype=float)
            else:
                mapping = self.level_maps[name]
                arr = np.array(
                    [mapping.get(str(x), self.default_value) for x in v], dtype=float
                )
            cols.append(arr)
        if not cols:
            raise DataError("no feature columns to encode")
        return np.column_stack(cols)

    def to_dict(self):
        return {
            "feature_names": list(self.feature_names),
            "kinds": dict(self.kinds),
            "level_maps": {k: dict(v) for k, v in self.level_maps.items()},
            "default_value": self.default_value,
        }

    @staticmethod
    def from_dict(d) -> "FeatureEncoder":
        enc = FeatureEncoder()
        enc.feature_names = list(d["feature_names"])
        enc.kinds = dict(d["kinds"])
        enc.level_maps = {k: {kk: float(vv) for kk, vv in v.items()}
                          for k, v in d["level_maps"].items()}
        enc.default_value = float(d["default_value"])
        return enc


class TrainedModel:
    """Uniform prediction contract shared by glass and registered models.

    ``predict`` returns the model score for arbitrary feature rows: a real
    value for regression, a probability in [0,1] for binary.  ``predict_margin``
    is the pre-link (additive) scale where local attributions are exact; for
    models without a link the two coincide.
    """

    family: str = "base"
    interpretable: bool = False
    evaluable: bool = True  # can score arbitrary synthetic rows

    def __init__(self, name: str, task: str, feature_names: list[str]):
        self.name = name
        self.task = task
        self.feature_names = list(feature_names)

    # -- prediction ---------------------------------------------------------

    def predict(self, block: dict[str, np.ndarray]) -> np.ndarray:
        raise NotImplementedError

    def predict_margin(self, block: dict[str, np.ndarray]) -> np.ndarray:
        return self.predict(block)

    def predict_dataset(self, ds: Dataset, indices=None) -> np.ndarray:
        """Scores for dataset rows; the entry point diagnostics use."""
        return self.predict(ds.row_block(indices))

    # -- serialization ------------------------------------------------------

    def payload(self) -> dict:
        raise NotImplementedError

    def describe(self) -> dict:
        return {
            "name": self.name,
            "family": self.family,
            "task": self.task,
            "features": list(self.feature_names),
            "interpretable": self.interpretable,
            "evaluable": self.evaluable,
        }


def require_evaluable(model: TrainedModel, what: str):
    if not model.evaluable:
        raise CapabilityError(
            f"{what} needs to re-evaluate the model on new rows; "
            f"model {model.name!r} is a score-table pseudo model"
        )


def check_training_data(ds: Dataset):
    """Common preconditions for the glass trainers."""
    if not ds.prepared:
        raise DataError("dataset must be prepared (split + imputation) before training")
    tr = ds.train_indices
    if len(tr) == 0 or len(ds.test_indices) == 0:
        raise DataError("both train and test partitions must be non-empty")
    y = ds.y[tr]
    if not np.isfinite(y).all():
        raise DataError("non-finite values in target")
    if ds.task == BINARY:
        if len(np.unique(y)) < 2:
            raise DataError("degenerate target: only one class present in train split")
    else:
        if float(np.var(y)) == 0.0:
            raise DataError("degenerate target: zero variance in train split")
    for c in ds.feature_columns:
        if c.kind == NUMERIC and not np.isfinite(c.values).all():
            raise DataError(f"non-finite values in feature {c.name!r}")


def positive_int(params: dict, key: str, default: int, lo: int = 1, hi: int | None = None) -> int:
    v = params.get(key, default)
    if not isinstance(v, (int, np.integer)) or v < lo or (hi is not None and v > hi):
        raise ConfigError(f"parameter {key!r} out of range: {v!r}", key_path=key)
    return int(v)


def bounded_float(params: dict, key: str, default: float, lo: float, hi: float,
                  lo_open: bool = False, hi_open: bool = False) -> float:
    v = params.get(key, default)
    try:
        v = float(v)
    except (TypeError, ValueError):
        raise ConfigError(f"parameter {key!r} must be a number, got {v!r}", key_path=key)
    ok_lo = v > lo if lo_open else v >= lo
    ok_hi = v < hi if hi_open else v <= hi
    if not (ok_lo and ok_hi):
        raise ConfigError(f"parameter {key!r} out of range: {v!r}", key_path=key)
    return v
