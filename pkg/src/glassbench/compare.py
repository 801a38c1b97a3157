"""Side-by-side comparison of two or three models on one dataset.

Runs the selected diagnostics for every model with identical seed and
config, aligns the resulting metrics and curves, and ranks the models
per criterion (competition ranking: rank 1 is best, ties share the
better rank).  The overall rank is the mean of per-criterion ranks,
ties broken by the test accuracy metric.
"""

from __future__ import annotations

import numpy as np

from .data import BINARY, Dataset
from .diagnose import accuracy, reliability, resilience, robustness
from .errors import DataError
from .metrics import accuracy_tiebreak_name, is_score_type
from .models import TrainedModel, require_evaluable
from .utils import parallel_map

COMPARE_TESTS = ("accuracy", "robustness", "reliability", "resilience")


def _competition_ranks(values: list[float | None], higher_is_better: bool) -> list[int | None]:
    """Rank 1 = best; equal values share the better rank; None is unranked."""
    ranks: list[int | None] = [None] * len(values)
    present = [(i, v) for i, v in enumerate(values) if v is not None]
    for i, v in present:
        better = 0
        for _j, w in present:
            if (w > v) if higher_is_better else (w < v):
                better += 1
        ranks[i] = 1 + better
    return ranks


def model_compare(models: list[TrainedModel], ds: Dataset,
                  tests=("accuracy",), seed: int = 0,
                  config: dict | None = None) -> dict:
    models = list(models)
    if not (2 <= len(models) <= 3):
        raise DataError(f"comparison takes two or three models, got {len(models)}")
    tasks = {m.task for m in models}
    if len(tasks) != 1:
        raise DataError(f"cannot compare models of mixed tasks: {sorted(tasks)}")
    if tasks != {ds.task}:
        raise DataError("model task does not match the dataset task")
    names = [m.name for m in models]
    if len(set(names)) != len(names):
        # duplicate objects are fine, duplicate names would collide in tables
        names = [f"{m.name}#{i}" for i, m in enumerate(models)]
    for m in models:
        require_evaluable(m, "model comparison")
    tests = list(tests)
    unknown = [t for t in tests if t not in COMPARE_TESTS]
    if unknown:
        raise DataError(f"unsupported comparison tests: {unknown}")
    if "accuracy" not in tests:
        tests = ["accuracy"] + tests
    config = dict(config or {})

    results: dict[str, list[dict]] = {}
    for t in tests:
        cfg = dict(config.get(t, {}))
        if t == "accuracy":
            fn = lambda m: accuracy(m, ds, **cfg)
        elif t == "robustness":
            fn = lambda m: robustness(m, ds, seed=seed, **cfg)
        elif t == "reliability":
            fn = lambda m: reliability(m, ds, seed=seed, **cfg)
        else:
            fn = lambda m: resilience(m, ds, seed=seed, **cfg)
        results[t] = parallel_map(fn, models)

    criteria = []

    def add_criterion(name, higher, values):
        ranks = _competition_ranks(values, higher)
        criteria.append({
            "criterion": name,
            "higher_is_better": higher,
            "values": {nm: v for nm, v in zip(names, values)},
            "ranks": {nm: r for nm, r in zip(names, ranks)},
        })

    acc_rows = results["accuracy"]
    metric_names = sorted({k for row in acc_rows for k in row["splits"].get("test", {})})
    for mn in metric_names:
        vals = [row["splits"].get("test", {}).get(mn) for row in acc_rows]
        add_criterion(f"test_{mn}", is_score_type(mn), vals)

    curves: dict = {}
    if "robustness" in results:
        rows = results["robustness"]
        curves["robustness"] = {nm: row["series"] for nm, row in zip(names, rows)}
        vals = [row["series"][-1]["mean"] for row in rows]
        add_criterion("robustness_worst", is_score_type(rows[0]["metric"]), vals)
    if "reliability" in results:
        rows = results["reliability"]
        curves["reliability"] = {
            nm: {k: row[k] for k in row if k not in ("kind", "model")}
            for nm, row in zip(names, rows)
        }
        key = "mean_set_size" if ds.task == BINARY else "mean_width"
        add_criterion("reliability_width", False, [row[key] for row in rows])
    if "resilience" in results:
        rows = results["resilience"]
        curves["resilience"] = {
            nm: row["scenarios"]["worst_sample"]["curve"] for nm, row in zip(names, rows)
        }
        vals = [row["scenarios"]["worst_sample"]["curve"][-1]["metric"] for row in rows]
        add_criterion("resilience_worst", False, vals)

    tb_name = accuracy_tiebreak_name(ds.task)
    tb_higher = is_score_type(tb_name)
    tiebreak = [row["splits"].get("test", {}).get(tb_name) for row in acc_rows]

    mean_ranks = []
    for i, nm in enumerate(names):
        rs = [c["ranks"][nm] for c in criteria if c["ranks"][nm] is not None]
        mean_ranks.append(float(np.mean(rs)) if rs else None)

    def overall_key(i):
        mr = mean_ranks[i]
        tb = tiebreak[i]
        tb_oriented = (-tb if tb_higher else tb) if tb is not None else float("inf")
        return (mr if mr is not None else float("inf"), tb_oriented)

    order = sorted(range(len(names)), key=overall_key)
    overall_rank = [0] * len(names)
    for pos, i in enumerate(order):
        if pos > 0 and overall_key(i) == overall_key(order[pos - 1]):
            overall_rank[i] = overall_rank[order[pos - 1]]
        else:
            overall_rank[i] = pos + 1
    overall = [{"model": nm, "mean_rank": mean_ranks[i], "rank": overall_rank[i],
                "tiebreak_metric": tb_name, "tiebreak": tiebreak[i]}
               for i, nm in enumerate(names)]

    return {
        "kind": "comparison",
        "models": names,
        "task": ds.task,
        "tests": tests,
        "seed": int(seed),
        "metrics": {nm: row["splits"] for nm, row in zip(names, acc_rows)},
        "curves": curves,
        "criteria": criteria,
        "overall": overall,
    }
