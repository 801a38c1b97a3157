"""Externally built models brought into the workbench.

Two registration modes:

* a callable that maps a feature block to predictions (probabilities for
  binary tasks).  Usable anywhere predictions on fresh rows are needed,
  but lives only for the session: there is nothing portable to persist.
* a score table of precomputed predictions aligned to one dataset's rows.
  Row-bound: any verb that needs predictions on perturbed or novel inputs
  is refused with a capability error.

Neither mode is interpretable; inherent-interpretation verbs refuse both.
"""

from __future__ import annotations

import csv

import numpy as np

from ..data import BINARY, REGRESSION, Dataset
from ..errors import CapabilityError, DataError
from .base import TrainedModel


class CallableModel(TrainedModel):
    family = "registered"
    interpretable = False
    evaluable = True

    def __init__(self, name, task, feature_names, predict_fn):
        super().__init__(name, task, feature_names)
        self._predict_fn = predict_fn

    def predict(self, block):
        out = np.asarray(self._predict_fn(block), dtype=float).reshape(-1)
        lengths = {len(v) for v in block.values()}
        if lengths and len(out) != lengths.pop():
            raise DataError(f"registered callable for '{self.name}' returned "
                            f"{len(out)} predictions for a different number of rows")
        if not np.all(np.isfinite(out)):
            raise DataError(f"registered callable for '{self.name}' returned non-finite values")
        if self.task == BINARY and ((out < 0).any() or (out > 1).any()):
            raise DataError(f"registered callable for '{self.name}' must return "
                            "probabilities in [0, 1] for a binary task")
        return out

    def payload(self):
        raise CapabilityError(
            f"model '{self.name}' wraps a live callable and cannot be saved; "
            "it is available for this session only"
        )


class ScoreTableModel(TrainedModel):
    family = "score_table"
    interpretable = False
    evaluable = False

    def __init__(self, name, task, dataset_name, scores):
        super().__init__(name, task, feature_names=[])
        self.dataset_name = dataset_name
        self.scores = np.asarray(scores, dtype=float).reshape(-1)

    def predict(self, block):
        raise CapabilityError(
            f"model '{self.name}' is a score table bound to dataset "
            f"'{self.dataset_name}' and cannot score new rows"
        )

    def predict_dataset(self, ds: Dataset, indices=None):
        if ds.name != self.dataset_name:
            raise DataError(
                f"score table '{self.name}' is bound to dataset '{self.dataset_name}', "
                f"not '{ds.name}'"
            )
        if ds.n_rows != len(self.scores):
            raise DataError(
                f"score table '{self.name}' has {len(self.scores)} rows but dataset "
                f"'{ds.name}' has {ds.n_rows}"
            )
        if indices is None:
            return self.scores.copy()
        return self.scores[np.asarray(indices, dtype=int)]

    def payload(self):
        return {"name": self.name, "task": self.task,
                "dataset_name": self.dataset_name,
                "scores": self.scores.tolist()}

    @classmethod
    def from_payload(cls, payload):
        return cls(payload["name"], payload["task"], payload["dataset_name"],
                   payload["scores"])


def read_scores_csv(path: str) -> np.ndarray:
    """Read a scores file with header ``row_id,score`` into row order."""
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError:
        raise DataError(f"no scores file at {path}") from None
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"scores file {path} is empty") from None
        if [h.strip() for h in header] != ["row_id", "score"]:
            raise DataError(f"scores file {path} must have header 'row_id,score'")
        pairs = []
        for lineno, row in enumerate(reader, start=2):
            if len(row) != 2:
                raise DataError(f"scores file {path} line {lineno}: expected 2 fields")
            try:
                rid = int(row[0])
                val = float(row[1])
            except ValueError:
                raise DataError(
                    f"scores file {path} line {lineno}: bad row_id or score"
                ) from None
            pairs.append((rid, val))
    if not pairs:
        raise DataError(f"scores file {path} has no rows")
    n = len(pairs)
    seen = {rid for rid, _ in pairs}
    if seen != set(range(n)):
        raise DataError(
            f"scores file {path} must cover row_ids 0..{n - 1} exactly once"
        )
    out = np.empty(n)
    for rid, val in pairs:
        out[rid] = val
    return out


def register(name, task, *, predict_fn=None, feature_names=None,
             dataset: Dataset | None = None, scores=None):
    """Wrap an external model as a callable or a dataset-bound score table."""
    if task not in (REGRESSION, BINARY):
        raise DataError(f"unknown task '{task}'")
    has_fn = predict_fn is not None
    has_scores = scores is not None
    if has_fn == has_scores:
        raise DataError("register needs exactly one of predict_fn or scores")
    if has_fn:
        if not feature_names:
            raise DataError("registering a callable requires feature_names")
        return CallableModel(name, task, list(feature_names), predict_fn)
    if dataset is None:
        raise DataError("registering scores requires the dataset they belong to")
    arr = np.asarray(scores, dtype=float).reshape(-1)
    if len(arr) != dataset.n_rows:
        raise DataError(f"scores length {len(arr)} does not match dataset "
                        f"'{dataset.name}' with {dataset.n_rows} rows")
    if not np.all(np.isfinite(arr)):
        raise DataError("scores must be finite")
    if task == BINARY and ((arr < 0).any() or (arr > 1).any()):
        raise DataError("binary scores must be probabilities in [0, 1]")
    return ScoreTableModel(name, task, dataset.name, arr)
