"""Model-agnostic diagnostics over train/test predictions.

Seven tests: accuracy metrics, weak-region slicing, overfit/underfit
slicing, split conformal reliability, noise-perturbation robustness,
out-of-distribution resilience, and group fairness.  Each is a pure
function of (model, dataset, config, seed) returning a JSON-ready dict;
randomness is derived per unit of work so results are independent of
thread schedule.

Slicing features must be numeric.  The residual metric for slicing is the
task's primary loss (MSE for regression, LogLoss for binary).
"""

from __future__ import annotations

import math

import numpy as np

from .data import BINARY, CATEGORICAL, NUMERIC, Dataset, quantile
from .errors import ConfigError, DataError
from .metrics import (metric_set, nan_safe, per_row_loss, primary_loss_name,
                      single_metric)
from .models import TrainedModel, require_evaluable
from .models.binning import bin_codes
from .utils import child_rng, parallel_map

WEAKSPOT_THRESHOLD = 1.1
DEFAULT_BINS = 10
DEFAULT_ALPHA = 0.1
DEFAULT_CALIB_RATIO = 0.2
DEFAULT_LAMBDAS = (0.0, 0.1, 0.2, 0.3, 0.4)
DEFAULT_ROBUST_REPEATS = 10
DEFAULT_RATIOS = (1.0, 0.9, 0.8, 0.7, 0.6, 0.5, 0.4, 0.3, 0.2, 0.1)
DEFAULT_KMEANS_K = 10
KMEANS_RESTARTS = 20
KMEANS_MAX_ITER = 100
RESILIENCE_MIN_ROWS = 100
PSI_BINS = 10
PSI_EPS = 1e-6
AIR_FLAG = 0.8
DEFAULT_MIN_GROUP = 30
FRONTIER_STEPS = 99
DELTA_FLOOR = 1e-12


def _predictions(model: TrainedModel, ds: Dataset, indices):
    return np.asarray(model.predict_dataset(ds, indices), dtype=float)


def _min_samples_default(n: int) -> int:
    return max(20, int(math.ceil(0.01 * n)))


def _ratio_count(ratio: float, n: int) -> int:
    return max(1, int(math.ceil(ratio * n - 1e-9)))


# -- accuracy ----------------------------------------------------------------


def accuracy(model: TrainedModel, ds: Dataset, threshold: float = 0.5) -> dict:
    splits = {}
    for split_name, idx in (("train", ds.train_indices), ("test", ds.test_indices)):
        if len(idx) == 0:
            continue
        pred = _predictions(model, ds, idx)
        y = ds.y[idx]
        vals = metric_set(ds.task, y, pred, threshold)
        splits[split_name] = {k: nan_safe(v) for k, v in vals.items() if v is not None}
    return {"kind": "accuracy", "model": model.name, "threshold": float(threshold),
            "splits": splits}


# -- slicing -----------------------------------------------------------------


def _slice_features(ds: Dataset, features) -> list[str]:
    if isinstance(features, str):
        features = [features]
    features = list(features or [])
    if len(features) not in (1, 2):
        raise DataError("slicing takes one or two features")
    for f in features:
        if ds.column(f).kind != NUMERIC:
            raise DataError(f"slicing feature {f!r} must be numeric")
    return features


def _slice_edges(values: np.ndarray, binning: str, bins: int) -> np.ndarray:
    lo = float(values.min())
    hi = float(values.max())
    if hi <= lo:
        return np.array([lo, hi])
    if binning == "uniform":
        return np.linspace(lo, hi, bins + 1)
    if binning == "quantile":
        return np.unique(np.array([quantile(values, k / bins) for k in range(bins + 1)]))
    raise ConfigError(f"unknown binning {binning!r}", key_path="binning")


def _range_of(edges: np.ndarray, code: int) -> list[float]:
    return [float(edges[code]), float(edges[code + 1])]


def weakspot(model: TrainedModel, ds: Dataset, features, binning: str = "quantile",
             bins: int = DEFAULT_BINS, threshold: float = WEAKSPOT_THRESHOLD,
             min_samples: int | None = None) -> dict:
    features = _slice_features(ds, features)
    if bins < 1:
        raise DataError("bins must be at least 1")
    te = ds.test_indices
    if len(te) == 0:
        raise DataError("empty test split")
    y = ds.y[te]
    pred = _predictions(model, ds, te)
    losses = per_row_loss(ds.task, y, pred)
    overall = float(losses.mean())
    if min_samples is None:
        min_samples = _min_samples_default(len(te))
    metric_name = primary_loss_name(ds.task)

    cols = [ds.column(f).values[te].astype(float) for f in features]
    edges = [_slice_edges(c, binning, bins) for c in cols]
    codes = [bin_codes(c, e) for c, e in zip(cols, edges)]

    def flagged(n, m):
        return bool(n >= min_samples and m is not None and m > 0.0
                    and m >= threshold * overall)

    slices = []
    if len(features) == 1:
        nb = len(edges[0]) - 1
        for k in range(nb):
            rows = np.flatnonzero(codes[0] == k)
            m = float(losses[rows].mean()) if len(rows) else None
            slices.append({"range": _range_of(edges[0], k), "n": int(len(rows)),
                           "metric": m, "flag": flagged(len(rows), m)})
        regions = []
        run = None
        for k, s in enumerate(slices):
            if s["flag"]:
                if run is None:
                    run = [k, k]
                else:
                    run[1] = k
            elif run is not None:
                regions.append(run)
                run = None
        if run is not None:
            regions.append(run)
        merged = []
        for lo_k, hi_k in regions:
            rows = np.flatnonzero((codes[0] >= lo_k) & (codes[0] <= hi_k))
            merged.append({
                "range": [float(edges[0][lo_k]), float(edges[0][hi_k + 1])],
                "n": int(len(rows)),
                "metric": float(losses[rows].mean()),
            })
    else:
        nb_a = len(edges[0]) - 1
        nb_b = len(edges[1]) - 1
        for ka in range(nb_a):
            for kb in range(nb_b):
                rows = np.flatnonzero((codes[0] == ka) & (codes[1] == kb))
                m = float(losses[rows].mean()) if len(rows) else None
                slices.append({"range_a": _range_of(edges[0], ka),
                               "range_b": _range_of(edges[1], kb),
                               "n": int(len(rows)), "metric": m,
                               "flag": flagged(len(rows), m)})
        merged = []

    return {
        "kind": "weakspot",
        "model": model.name,
        "features": features,
        "binning": binning,
        "bins": int(bins),
        "threshold": float(threshold),
        "min_samples": int(min_samples),
        "metric": metric_name,
        "overall": overall,
        "slices": slices,
        "regions": merged,
    }


def overfit_underfit(model: TrainedModel, ds: Dataset, features,
                     binning: str = "quantile", bins: int = DEFAULT_BINS,
                     delta: float | None = None,
                     min_samples: int | None = None) -> dict:
    features = _slice_features(ds, features)
    if bins < 1:
        raise DataError("bins must be at least 1")
    tr = ds.train_indices
    te = ds.test_indices
    if len(tr) == 0 or len(te) == 0:
        raise DataError("both splits must be non-empty")
    loss_tr = per_row_loss(ds.task, ds.y[tr], _predictions(model, ds, tr))
    loss_te = per_row_loss(ds.task, ds.y[te], _predictions(model, ds, te))
    overall_tr = float(loss_tr.mean())
    overall_te = float(loss_te.mean())
    if delta is None:
        delta = 0.5 * overall_tr
    delta = max(float(delta), DELTA_FLOOR)
    if min_samples is None:
        min_samples = _min_samples_default(len(te))
    metric_name = primary_loss_name(ds.task)

    # shared edges from the full column so both splits see the same slices
    full_cols = [ds.column(f).values.astype(float) for f in features]
    edges = [_slice_edges(c, binning, bins) for c in full_cols]
    codes_tr = [bin_codes(c[tr], e) for c, e in zip(full_cols, edges)]
    codes_te = [bin_codes(c[te], e) for c, e in zip(full_cols, edges)]

    def cell(mask_tr, mask_te, ranges):
        n_tr = int(mask_tr.sum())
        n_te = int(mask_te.sum())
        if n_tr < min_samples or n_te < min_samples:
            return None
        m_tr = float(loss_tr[mask_tr].mean())
        m_te = float(loss_te[mask_te].mean())
        gap = m_te - m_tr
        entry = dict(ranges)
        entry.update({
            "n_train": n_tr, "n_test": n_te,
            "train_metric": m_tr, "test_metric": m_te, "gap": gap,
            "overfit": bool(gap >= delta), "underfit": bool(gap <= -delta),
        })
        return entry

    slices = []
    if len(features) == 1:
        for k in range(len(edges[0]) - 1):
            entry = cell(codes_tr[0] == k, codes_te[0] == k,
                         {"range": _range_of(edges[0], k)})
            if entry is not None:
                slices.append(entry)
    else:
        for ka in range(len(edges[0]) - 1):
            for kb in range(len(edges[1]) - 1):
                entry = cell((codes_tr[0] == ka) & (codes_tr[1] == kb),
                             (codes_te[0] == ka) & (codes_te[1] == kb),
                             {"range_a": _range_of(edges[0], ka),
                              "range_b": _range_of(edges[1], kb)})
                if entry is not None:
                    slices.append(entry)

    return {
        "kind": "overfit",
        "model": model.name,
        "features": features,
        "binning": binning,
        "bins": int(bins),
        "delta": delta,
        "min_samples": int(min_samples),
        "metric": metric_name,
        "overall_train": overall_tr,
        "overall_test": overall_te,
        "slices": slices,
    }


# -- reliability (split conformal) ------------------------------------------


def reliability(model: TrainedModel, ds: Dataset, alpha: float = DEFAULT_ALPHA,
                calib_ratio: float = DEFAULT_CALIB_RATIO, seed: int = 0) -> dict:
    if not (0.0 < alpha < 1.0):
        raise DataError("alpha must be in (0, 1)")
    if not (0.0 < calib_ratio < 1.0):
        raise DataError("calib_ratio must be in (0, 1)")
    tr = ds.train_indices
    te = ds.test_indices
    if len(tr) == 0 or len(te) == 0:
        raise DataError("both splits must be non-empty")
    n_cal = int(math.floor(calib_ratio * len(tr) + 0.5))
    if n_cal < 1:
        raise DataError("calibration carve-out is empty; raise calib_ratio")
    rng = child_rng(seed, "reliability", "calibration")
    perm = rng.permutation(len(tr))
    cal = np.sort(tr[perm[:n_cal]])

    k = int(math.ceil((n_cal + 1) * (1.0 - alpha)))
    if k > n_cal:
        raise DataError(
            f"calibration set of {n_cal} rows cannot support alpha={alpha}: "
            f"the required quantile index {k} exceeds the sample"
        )
    recipe = (f"q_hat = {k}-th smallest of {n_cal} calibration scores, "
              f"index ceil((n_cal + 1) * (1 - alpha))")

    pred_cal = _predictions(model, ds, cal)
    y_cal = ds.y[cal]
    pred_te = _predictions(model, ds, te)
    y_te = ds.y[te]

    if ds.task == BINARY:
        score_cal = np.where(y_cal == 1, 1.0 - pred_cal, pred_cal)
        qhat = float(np.sort(score_cal)[k - 1])
        score_te = np.where(y_te == 1, 1.0 - pred_te, pred_te)
        covered = score_te <= qhat
        in_set_1 = (1.0 - pred_te) <= qhat
        in_set_0 = pred_te <= qhat
        set_sizes = in_set_1.astype(int) + in_set_0.astype(int)
        return {
            "kind": "reliability", "task": BINARY, "model": model.name,
            "alpha": float(alpha), "n_calibration": n_cal, "qhat": qhat,
            "recipe": recipe, "seed": int(seed),
            "coverage": float(np.mean(covered)),
            "mean_set_size": float(np.mean(set_sizes)),
        }

    score_cal = np.abs(y_cal - pred_cal)
    qhat = float(np.sort(score_cal)[k - 1])
    covered = np.abs(y_te - pred_te) <= qhat
    width = 2.0 * qhat
    pred_edges = _slice_edges(pred_te, "quantile", PSI_BINS)
    codes = bin_codes(pred_te, pred_edges)
    per_slice = []
    for b in range(len(pred_edges) - 1):
        rows = np.flatnonzero(codes == b)
        per_slice.append({"range": _range_of(pred_edges, b), "n": int(len(rows)),
                          "width": width if len(rows) else None})
    return {
        "kind": "reliability", "task": ds.task, "model": model.name,
        "alpha": float(alpha), "n_calibration": n_cal, "qhat": qhat,
        "recipe": recipe, "seed": int(seed),
        "coverage": float(np.mean(covered)),
        "mean_width": width,
        "per_slice_width": per_slice,
    }


# -- robustness --------------------------------------------------------------


def robustness(model: TrainedModel, ds: Dataset, lambdas=DEFAULT_LAMBDAS,
               repeats: int = DEFAULT_ROBUST_REPEATS, seed: int = 0,
               features=None, metric: str | None = None,
               threshold: float = 0.5) -> dict:
    require_evaluable(model, "robustness analysis")
    if repeats < 1:
        raise DataError("repeats must be at least 1")
    lambdas = [float(v) for v in lambdas]
    if any(v < 0 for v in lambdas):
        raise DataError("perturbation scales must be non-negative")
    te = ds.test_indices
    tr = ds.train_indices
    if len(te) == 0:
        raise DataError("empty test split")
    numeric = [f for f in model.feature_names
               if f in ds.feature_names and ds.column(f).kind == NUMERIC]
    if features is not None:
        features = list(features)
        unknown = [f for f in features if f not in numeric]
        if unknown:
            raise DataError(f"not numeric model features: {unknown}")
        numeric = features
    if not numeric:
        raise DataError("no numeric features to perturb")

    block = ds.row_block(te)
    y = ds.y[te]
    metric = metric or primary_loss_name(ds.task)
    baseline = single_metric(metric, ds.task, y, model.predict(block), threshold)
    if baseline is None:
        raise DataError(f"baseline metric {metric!r} undefined on the test split")
    sigmas = {f: float(ds.column(f).values[tr].astype(float).std()) for f in numeric}

    def one_scale(li):
        lam = lambdas[li]
        vals = []
        for r in range(repeats):
            if lam == 0.0:
                vals.append(float(baseline))
                continue
            rng = child_rng(seed, "robustness", li, r)
            perturbed = dict(block)
            for f in numeric:
                eps = rng.standard_normal(len(te))
                perturbed[f] = np.asarray(block[f], dtype=float) + lam * sigmas[f] * eps
            m = single_metric(metric, ds.task, y, model.predict(perturbed), threshold)
            vals.append(float(baseline) if m is None else float(m))
        arr = np.array(vals)
        # identical repeats (the lam == 0 case) must summarize exactly
        if np.unique(arr).size == 1:
            mean, sd = float(arr[0]), 0.0
        else:
            mean = float(arr.mean())
            sd = float(arr.std(ddof=1)) if repeats > 1 else 0.0
        return {"lambda": lam, "mean": mean, "sd": sd, "values": vals}

    series = parallel_map(one_scale, list(range(len(lambdas))))
    return {
        "kind": "robustness", "model": model.name, "metric": metric,
        "baseline": float(baseline), "repeats": int(repeats), "seed": int(seed),
        "features": numeric, "series": series,
    }


# -- resilience --------------------------------------------------------------


def _standardize(matrix: np.ndarray, means: np.ndarray, sds: np.ndarray) -> np.ndarray:
    safe = np.where(sds > 0, sds, 1.0)
    return (matrix - means) / safe


def _kmeans(X: np.ndarray, k: int, seed: int):
    """Plain Lloyd iterations, best of KMEANS_RESTARTS seeded restarts."""
    n = X.shape[0]
    best = None
    for restart in range(KMEANS_RESTARTS):
        rng = child_rng(seed, "resilience", "kmeans", restart)
        centers = X[np.sort(rng.choice(n, size=k, replace=False))].copy()
        labels = None
        for _it in range(KMEANS_MAX_ITER):
            d2 = ((X[:, None, :] - centers[None, :, :]) ** 2).sum(axis=2)
            new_labels = np.argmin(d2, axis=1)   # ties: lowest cluster index
            if labels is not None and np.array_equal(new_labels, labels):
                break
            labels = new_labels
            for c in range(k):
                members = labels == c
                if members.any():
                    centers[c] = X[members].mean(axis=0)
        inertia = float(((X - centers[labels]) ** 2).sum())
        if best is None or inertia < best[0]:
            best = (inertia, labels.copy())
    return best[1]


def resilience(model: TrainedModel, ds: Dataset, scenario: str = "all",
               ratios=DEFAULT_RATIOS, seed: int = 0, k: int = DEFAULT_KMEANS_K,
               min_rows: int = RESILIENCE_MIN_ROWS) -> dict:
    valid = {"all", "worst-sample", "worst-cluster", "outer-sample"}
    if scenario not in valid:
        raise ConfigError(f"unknown scenario {scenario!r}; expected one of {sorted(valid)}",
                          key_path="scenario")
    te = ds.test_indices
    if len(te) < min_rows:
        raise DataError(f"resilience needs at least {min_rows} test rows, have {len(te)}")
    ratios = sorted({float(r) for r in ratios}, reverse=True)
    if any(not (0.0 < r <= 1.0) for r in ratios):
        raise DataError("ratios must lie in (0, 1]")
    n = len(te)
    y = ds.y[te]
    pred = _predictions(model, ds, te)
    losses = per_row_loss(ds.task, y, pred)
    baseline = float(losses.mean())
    metric_name = primary_loss_name(ds.task)

    numeric = [f for f in ds.feature_names if ds.column(f).kind == NUMERIC]
    scenarios: dict = {}

    def curve_from_order(order_desc):
        out = []
        for r in ratios:
            m = _ratio_count(r, n)
            sel = np.sort(order_desc[:m])
            out.append({"ratio": r, "n": int(m), "metric": float(losses[sel].mean())})
        return out

    loss_order = np.argsort(-losses, kind="stable")

    if scenario in ("all", "worst-sample"):
        scenarios["worst_sample"] = {"curve": curve_from_order(loss_order)}
        worst_m = _ratio_count(0.1, n)
        worst_rows = np.sort(loss_order[:worst_m])
        psi = []
        for f in ds.feature_names:
            col = ds.column(f)
            if col.kind == NUMERIC:
                vals = col.values[te].astype(float)
                edges = _slice_edges(vals, "quantile", PSI_BINS)
                full_codes = bin_codes(vals, edges)
                worst_codes = full_codes[worst_rows]
                nb = len(edges) - 1
                q = np.bincount(full_codes, minlength=nb) / n
                p = np.bincount(worst_codes, minlength=nb) / len(worst_rows)
            else:
                levels = sorted({str(v) for v in col.values[te]})
                idx = {lv: i for i, lv in enumerate(levels)}
                full_codes = np.array([idx[str(v)] for v in col.values[te]])
                worst_codes = full_codes[worst_rows]
                q = np.bincount(full_codes, minlength=len(levels)) / n
                p = np.bincount(worst_codes, minlength=len(levels)) / len(worst_rows)
            pf = np.maximum(p, PSI_EPS)
            qf = np.maximum(q, PSI_EPS)
            psi.append({"feature": f, "psi": float(((pf - qf) * np.log(pf / qf)).sum())})
        scenarios["psi"] = psi

    if scenario in ("all", "outer-sample"):
        if not numeric:
            raise DataError("outer-sample scenario needs numeric features")
        tr = ds.train_indices
        train_mat = np.column_stack([ds.column(f).values[tr].astype(float) for f in numeric])
        test_mat = np.column_stack([ds.column(f).values[te].astype(float) for f in numeric])
        means = train_mat.mean(axis=0)
        sds = train_mat.std(axis=0)
        Z = _standardize(test_mat, means, sds)
        dist = np.sqrt((Z * Z).sum(axis=1))
        scenarios["outer_sample"] = {"curve": curve_from_order(np.argsort(-dist, kind="stable"))}

    if scenario in ("all", "worst-cluster"):
        if not numeric:
            raise DataError("worst-cluster scenario needs numeric features")
        test_mat = np.column_stack([ds.column(f).values[te].astype(float) for f in numeric])
        Z = _standardize(test_mat, test_mat.mean(axis=0), test_mat.std(axis=0))
        distinct = len(np.unique(Z, axis=0))
        k_eff = int(k)
        warning = None
        if distinct < k_eff:
            k_eff = distinct
            warning = f"k reduced to {k_eff}: only {distinct} distinct rows"
        labels = _kmeans(Z, k_eff, seed)
        clusters = []
        for c in range(k_eff):
            members = np.flatnonzero(labels == c)
            clusters.append({"cluster": int(c), "n": int(len(members)),
                             "metric": float(losses[members].mean()) if len(members) else None})
        with_rows = [c for c in clusters if c["n"] > 0]
        worst = max(with_rows, key=lambda c: (c["metric"], -c["cluster"]))
        entry = {"k": k_eff, "clusters": clusters, "worst": dict(worst)}
        if warning:
            entry["warning"] = warning
        scenarios["worst_cluster"] = entry

    return {
        "kind": "resilience", "model": model.name, "metric": metric_name,
        "baseline": baseline, "ratios": ratios, "seed": int(seed),
        "scenarios": scenarios,
    }


# -- fairness ----------------------------------------------------------------


def _group_labels(ds: Dataset, te, feature: str, protected_bins: int):
    col = ds.column(feature)
    if col.kind == CATEGORICAL:
        return np.array([str(v) for v in col.values[te]], dtype=object)
    vals = col.values[te].astype(float)
    edges = _slice_edges(vals, "quantile", protected_bins)
    codes = bin_codes(vals, edges)
    labels = np.empty(len(vals), dtype=object)
    for b in range(len(edges) - 1):
        labels[codes == b] = f"[{edges[b]:g}, {edges[b + 1]:g})"
    return labels


def fairness(model: TrainedModel, ds: Dataset, protected: str,
             reference: str | None = None, favorable_threshold: float = 0.5,
             segment_feature: str | None = None, segment_bins: int = 5,
             min_group: int = DEFAULT_MIN_GROUP, protected_bins: int = 2,
             frontier_steps: int = FRONTIER_STEPS) -> dict:
    if ds.task != BINARY:
        raise DataError("fairness analysis requires a binary task")
    te = ds.test_indices
    if len(te) == 0:
        raise DataError("empty test split")
    y = ds.y[te]
    scores = _predictions(model, ds, te)
    labels = _group_labels(ds, te, protected, protected_bins)

    sizes = {}
    for lv in labels:
        sizes[lv] = sizes.get(lv, 0) + 1
    included = sorted([g for g, c in sizes.items() if c >= min_group])
    warnings = [f"group {g!r} excluded: {sizes[g]} rows < {min_group}"
                for g in sorted(sizes) if g not in included]
    if len(included) < 2:
        raise DataError("fairness needs at least two groups meeting the size floor")

    if reference is None:
        # largest group; ties resolved toward the lexicographically smallest
        biggest = max(sizes[g] for g in included)
        reference = sorted(g for g in included if sizes[g] == biggest)[0]
    elif reference not in included:
        raise DataError(f"reference group {reference!r} missing or below the size floor")

    def rate_for(mask, t):
        if not mask.any():
            return None
        return float(np.mean(scores[mask] >= t))

    def air_table(t, rows_mask=None, floor=min_group):
        mask_all = np.ones(len(te), dtype=bool) if rows_mask is None else rows_mask
        ref_mask = mask_all & (labels == reference)
        if int(ref_mask.sum()) < floor:
            return None, []
        ref_rate = rate_for(ref_mask, t)
        table = []
        for g in included:
            gm = mask_all & (labels == g)
            if int(gm.sum()) < floor:
                continue
            rate = rate_for(gm, t)
            if g == reference:
                air = 1.0
            elif ref_rate is None or ref_rate == 0.0:
                air = None
            else:
                air = rate / ref_rate
            table.append({
                "group": g, "n": int(gm.sum()), "favorable_rate": rate,
                "air": air, "flag": bool(air is not None and air < AIR_FLAG),
                "reference": g == reference,
            })
        return ref_rate, table

    _ref_rate, groups = air_table(favorable_threshold)

    segmented = []
    if segment_feature is not None:
        col = ds.column(segment_feature)
        if col.kind == CATEGORICAL:
            seg_levels = sorted({str(v) for v in col.values[te]})
            seg_masks = [(lv, np.array([str(v) == lv for v in col.values[te]]))
                         for lv in seg_levels]
        else:
            vals = col.values[te].astype(float)
            edges = _slice_edges(vals, "quantile", segment_bins)
            codes = bin_codes(vals, edges)
            seg_masks = [(f"[{edges[b]:g}, {edges[b + 1]:g})", codes == b)
                         for b in range(len(edges) - 1)]
        for seg_label, mask in seg_masks:
            _r, table = air_table(favorable_threshold, rows_mask=mask)
            segmented.append({"segment": seg_label, "n": int(mask.sum()),
                              "groups": table})

    thresholds = np.unique(np.array(
        [quantile(scores, p / (frontier_steps + 1)) for p in range(1, frontier_steps + 1)]
    ))
    frontier = []
    for t in thresholds:
        _r, table = air_table(float(t))
        airs = [row["air"] for row in table
                if not row["reference"] and row["air"] is not None]
        min_air = min(airs) if airs else None
        acc = float(np.mean((scores >= t).astype(float) == y))
        frontier.append({"threshold": float(t), "air": min_air, "acc": acc})

    return {
        "kind": "fairness", "model": model.name, "protected": protected,
        "reference": reference, "favorable_threshold": float(favorable_threshold),
        "min_group": int(min_group), "groups": groups, "warnings": warnings,
        "segmented": segmented, "frontier": frontier,
        "flagged": bool(any(g["flag"] for g in groups)),
    }


# -- unified dispatch --------------------------------------------------------

_TESTS = {
    "accuracy": (accuracy, {"threshold"}),
    "weakspot": (weakspot, {"features", "binning", "bins", "threshold", "min_samples"}),
    "overfit": (overfit_underfit, {"features", "binning", "bins", "delta", "min_samples"}),
    "reliability": (reliability, {"alpha", "calib_ratio", "seed"}),
    "robustness": (robustness, {"lambdas", "repeats", "seed", "features", "metric",
                                "threshold"}),
    "resilience": (resilience, {"scenario", "ratios", "seed", "k", "min_rows"}),
    "fairness": (fairness, {"protected", "reference", "favorable_threshold",
                            "segment_feature", "segment_bins", "min_group",
                            "protected_bins", "frontier_steps"}),
}

DIAGNOSTIC_TESTS = tuple(sorted(_TESTS))


def model_diagnose(model: TrainedModel, ds: Dataset, test: str,
                   config: dict | None = None) -> dict:
    """Run one named diagnostic with a config dict; unknown keys are errors."""
    if test not in _TESTS:
        raise ConfigError(f"unknown diagnostic {test!r}; expected one of "
                          f"{list(DIAGNOSTIC_TESTS)}", key_path="test")
    fn, allowed = _TESTS[test]
    config = dict(config or {})
    unknown = sorted(set(config) - allowed)
    if unknown:
        raise ConfigError(f"unknown config keys for {test}: {unknown}",
                          key_path=f"config.{unknown[0]}")
    return fn(model, ds, **config)
