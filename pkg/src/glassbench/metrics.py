"""Performance metrics for regression and binary tasks.

AUC uses the rank statistic with average ranks on ties, which equals the
pairwise comparison count over all label-discordant pairs.  Metrics that are
undefined on degenerate inputs (single-class AUC, zero-variance R^2) are
reported as None rather than NaN.
"""

from __future__ import annotations

import math

import numpy as np
from scipy.stats import rankdata

LOGLOSS_EPS = 1e-15

# orientation: True when larger values mean better performance
SCORE_TYPE = {"R2": True, "ACC": True, "AUC": True, "Recall": True, "Precision": True, "F1": True,
              "MSE": False, "MAE": False, "LogLoss": False}


def is_score_type(metric: str) -> bool:
    return SCORE_TYPE[metric]


def auc_rank(y: np.ndarray, scores: np.ndarray):
    """Rank-statistic AUC; None when only one class is present."""
    y = np.asarray(y)
    pos = y == 1
    n_pos = int(pos.sum())
    n_neg = len(y) - n_pos
    if n_pos == 0 or n_neg == 0:
        return None
    ranks = rankdata(scores)
    return float((ranks[pos].sum() - n_pos * (n_pos + 1) / 2.0) / (n_pos * n_neg))


def log_loss(y: np.ndarray, p: np.ndarray) -> float:
    p = np.clip(np.asarray(p, dtype=float), LOGLOSS_EPS, 1.0 - LOGLOSS_EPS)
    y = np.asarray(y, dtype=float)
    return float(-(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)).mean())


def regression_metrics(y: np.ndarray, pred: np.ndarray) -> dict:
    y = np.asarray(y, dtype=float)
    pred = np.asarray(pred, dtype=float)
    err = y - pred
    mse = float((err * err).mean())
    mae = float(np.abs(err).mean())
    sst = float(((y - y.mean()) ** 2).sum())
    if sst > 0.0:
        r2 = 1.0 - float((err * err).sum()) / sst
    else:
        r2 = 1.0 if mse == 0.0 else None
    return {"MSE": mse, "MAE": mae, "R2": r2}


def binary_metrics(y: np.ndarray, p: np.ndarray, threshold: float = 0.5) -> dict:
    y = np.asarray(y, dtype=float)
    p = np.asarray(p, dtype=float)
    yhat = (p >= threshold).astype(float)
    acc = float((yhat == y).mean())
    tp = float(((yhat == 1) & (y == 1)).sum())
    fp = float(((yhat == 1) & (y == 0)).sum())
    fn = float(((yhat == 0) & (y == 1)).sum())
    recall = tp / (tp + fn) if (tp + fn) > 0 else 0.0
    precision = tp / (tp + fp) if (tp + fp) > 0 else 0.0
    f1 = 2 * precision * recall / (precision + recall) if (precision + recall) > 0 else 0.0
    return {
        "ACC": acc,
        "AUC": auc_rank(y, p),
        "Recall": recall,
        "Precision": precision,
        "F1": f1,
        "LogLoss": log_loss(y, p),
    }


def metric_set(task: str, y: np.ndarray, pred: np.ndarray, threshold: float = 0.5) -> dict:
    if task == "binary":
        return binary_metrics(y, pred, threshold)
    return regression_metrics(y, pred)


def primary_loss_name(task: str) -> str:
    """Residual metric used by slicing diagnostics and resilience."""
    return "LogLoss" if task == "binary" else "MSE"


def per_row_loss(task: str, y: np.ndarray, pred: np.ndarray) -> np.ndarray:
    """Per-row contributions whose mean is the primary loss metric."""
    y = np.asarray(y, dtype=float)
    pred = np.asarray(pred, dtype=float)
    if task == "binary":
        p = np.clip(pred, LOGLOSS_EPS, 1.0 - LOGLOSS_EPS)
        return -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p))
    return (y - pred) ** 2


def primary_loss(task: str, y: np.ndarray, pred: np.ndarray) -> float:
    return float(per_row_loss(task, y, pred).mean())


def single_metric(name: str, task: str, y: np.ndarray, pred: np.ndarray, threshold: float = 0.5):
    """One named metric; raises KeyError for a metric foreign to the task."""
    vals = metric_set(task, y, pred, threshold)
    if name not in vals:
        raise KeyError(f"metric {name!r} not defined for task {task!r}")
    return vals[name]


def accuracy_tiebreak_name(task: str) -> str:
    """Headline accuracy metric used to break overall-rank ties in compare."""
    return "ACC" if task == "binary" else "MSE"


def better(metric: str, a, b) -> bool:
    """True when value a beats value b under the metric orientation."""
    if a is None:
        return False
    if b is None:
        return True
    return a > b if is_score_type(metric) else a < b


def nan_safe(x):
    """Map NaN/inf to None for JSON serialization."""
    if x is None:
        return None
    x = float(x)
    return x if math.isfinite(x) else None
