"""Post-hoc, model-agnostic explainers.

All five explainers work from a model's inputs and outputs only, so they
accept any model that can score fresh rows; score-table pseudo models are
refused with a capability error.  Every routine is deterministic given
(model, dataset, seed): randomness flows through seeds derived per unit of
work, never through shared stream position.

Perturbation and averaging happen on the test split; probabilities are
explained on the response scale.
"""

from __future__ import annotations

import math

import numpy as np

from .data import CATEGORICAL, NUMERIC, Dataset, quantile
from .errors import ConfigError, DataError
from .interpret import instance_block
from .metrics import is_score_type, primary_loss_name, single_metric
from .models import TrainedModel, require_evaluable
from .utils import child_rng, parallel_map

DEFAULT_PFI_REPEATS = 5
DEFAULT_PDP_GRID = 20
DEFAULT_ALE_BINS = 20
DEFAULT_LIME_SAMPLES = 1000
LIME_RIDGE = 1e-3
LIME_TOP_K = 10
LIME_KERNEL_SCALE = 0.75
DEFAULT_SHAP_BACKGROUND = 100
SHAP_EXACT_LIMIT = 12
SHAP_SAMPLED_COALITIONS = 2048


def _test_frame(ds: Dataset):
    te = ds.test_indices
    if len(te) == 0:
        raise DataError("empty test split")
    return te, ds.row_block(te), ds.y[te].astype(float)


def _numeric_feature(ds: Dataset, feature: str):
    col = ds.column(feature)
    if col.kind != NUMERIC:
        raise DataError(f"feature {feature!r} is not numeric")
    return col


# -- permutation feature importance -----------------------------------------


def pfi(model: TrainedModel, ds: Dataset, metric: str | None = None,
        repeats: int = DEFAULT_PFI_REPEATS, seed: int = 0, threshold: float = 0.5) -> dict:
    require_evaluable(model, "permutation importance")
    if repeats < 1:
        raise DataError("repeats must be at least 1")
    te, block, y = _test_frame(ds)
    metric = metric or primary_loss_name(ds.task)
    base = single_metric(metric, ds.task, y, model.predict(block), threshold)
    if base is None:
        raise DataError(f"baseline metric {metric!r} undefined on the test split")
    flip = is_score_type(metric)

    def one_feature(f):
        degr = []
        for r in range(repeats):
            rng = child_rng(seed, "pfi", f, r)
            perm = rng.permutation(len(te))
            shuffled = dict(block)
            shuffled[f] = block[f][perm]
            m = single_metric(metric, ds.task, y, model.predict(shuffled), threshold)
            if m is None:
                m = base
            d = (base - m) if flip else (m - base)
            degr.append(float(d))
        arr = np.array(degr)
        sd = float(arr.std(ddof=1)) if repeats > 1 else 0.0
        return {"feature": f, "mean": float(arr.mean()), "sd": sd, "values": degr}

    results = parallel_map(one_feature, model.feature_names)
    return {
        "kind": "pfi",
        "model": model.name,
        "metric": metric,
        "baseline": float(base),
        "repeats": int(repeats),
        "seed": int(seed),
        "features": results,
    }


# -- partial dependence ------------------------------------------------------


def _quantile_grid(values: np.ndarray, points: int) -> np.ndarray:
    qs = [quantile(values, i / (points - 1)) for i in range(points)] if points > 1 \
        else [quantile(values, 0.5)]
    return np.unique(np.array(qs, dtype=float))


def pdp(model: TrainedModel, ds: Dataset, features, grid: int = DEFAULT_PDP_GRID) -> dict:
    require_evaluable(model, "partial dependence")
    if isinstance(features, str):
        features = [features]
    features = list(features)
    if len(features) not in (1, 2):
        raise DataError("pdp takes one or two features")
    if grid < 2:
        raise DataError("grid must be at least 2")
    te, block, _y = _test_frame(ds)

    if len(features) == 1:
        f = features[0]
        col = ds.column(f)
        if col.kind == CATEGORICAL:
            levels = sorted({str(v) for v in block[f]})

            def level_value(lv):
                b = dict(block)
                b[f] = np.array([lv] * len(te), dtype=object)
                return float(np.mean(model.predict(b)))

            values = parallel_map(level_value, levels)
            return {"kind": "pdp", "model": model.name, "features": [f],
                    "feature_kind": CATEGORICAL, "grid": levels,
                    "value": [float(v) for v in values]}
        g = _quantile_grid(np.asarray(block[f], dtype=float), grid)

        def grid_value(gv):
            b = dict(block)
            b[f] = np.full(len(te), gv)
            return float(np.mean(model.predict(b)))

        values = parallel_map(grid_value, list(g))
        return {"kind": "pdp", "model": model.name, "features": [f],
                "feature_kind": NUMERIC, "grid": g.tolist(),
                "value": [float(v) for v in values]}

    fa, fb = features
    for f in (fa, fb):
        _numeric_feature(ds, f)
    ga = _quantile_grid(np.asarray(block[fa], dtype=float), grid)
    gb = _quantile_grid(np.asarray(block[fb], dtype=float), grid)

    def row_values(av):
        out = []
        for bv in gb:
            b = dict(block)
            b[fa] = np.full(len(te), av)
            b[fb] = np.full(len(te), bv)
            out.append(float(np.mean(model.predict(b))))
        return out

    matrix = parallel_map(row_values, list(ga))
    return {"kind": "pdp", "model": model.name, "features": [fa, fb],
            "feature_kind": NUMERIC, "grid_a": ga.tolist(), "grid_b": gb.tolist(),
            "value": [list(row) for row in matrix]}


# -- accumulated local effects ----------------------------------------------


def ale(model: TrainedModel, ds: Dataset, feature: str, bins: int = DEFAULT_ALE_BINS) -> dict:
    require_evaluable(model, "accumulated local effects")
    _numeric_feature(ds, feature)
    if bins < 1:
        raise DataError("bins must be at least 1")
    te, block, _y = _test_frame(ds)
    col = np.asarray(block[feature], dtype=float)
    edges = np.unique(np.array([quantile(col, k / bins) for k in range(bins + 1)]))
    if len(edges) < 2:
        raise DataError(f"feature {feature!r} is constant on the test split")
    k_eff = len(edges) - 1

    # right-open bins, last bin closed at the top edge
    codes = np.searchsorted(edges[1:-1], col, side="right")
    effects = np.zeros(k_eff)
    counts = np.zeros(k_eff, dtype=int)
    for k in range(k_eff):
        rows = np.flatnonzero(codes == k)
        counts[k] = len(rows)
        if len(rows) == 0:
            continue    # empty bin: zero local effect carried forward
        sub = {name: vals[rows] for name, vals in block.items()}
        lo = dict(sub)
        lo[feature] = np.full(len(rows), edges[k])
        hi = dict(sub)
        hi[feature] = np.full(len(rows), edges[k + 1])
        effects[k] = float(np.mean(model.predict(hi) - model.predict(lo)))

    acc = np.cumsum(effects)
    total = counts.sum()
    center = float((acc * counts).sum() / total) if total else 0.0
    values = acc - center
    return {
        "kind": "ale",
        "model": model.name,
        "feature": feature,
        "edges": edges.tolist(),
        "value": values.tolist(),
        "count": counts.tolist(),
    }


# -- LIME --------------------------------------------------------------------


def _weighted_corr(x, y, w):
    sw = w.sum()
    if sw <= 0:
        return 0.0
    mx = (w * x).sum() / sw
    my = (w * y).sum() / sw
    cov = (w * (x - mx) * (y - my)).sum() / sw
    vx = (w * (x - mx) ** 2).sum() / sw
    vy = (w * (y - my) ** 2).sum() / sw
    if vx <= 0 or vy <= 0:
        return 0.0
    return float(cov / math.sqrt(vx * vy))


def lime_explain(model: TrainedModel, ds: Dataset, instance: dict,
                 samples: int = DEFAULT_LIME_SAMPLES, seed: int = 0) -> dict:
    require_evaluable(model, "LIME")
    if samples < 10:
        raise DataError("samples must be at least 10")
    block1 = instance_block(model, instance)
    tr = ds.train_indices
    names = model.feature_names
    d = len(names)
    rng = child_rng(seed, "lime")

    # perturbed neighborhood around the instance
    perturbed = {}
    design_cols = []
    dist_sq = np.zeros(samples)
    stats = {}
    for f in names:
        col = ds.column(f)
        if col.kind == NUMERIC:
            train_vals = col.values[tr].astype(float)
            mu = float(train_vals.mean())
            sd = float(train_vals.std())
            x0 = float(block1[f][0])
            z = x0 + sd * rng.standard_normal(samples) if sd > 0 else np.full(samples, x0)
            perturbed[f] = z
            std_col = (z - mu) / sd if sd > 0 else np.zeros(samples)
            design_cols.append(std_col)
            if sd > 0:
                dist_sq += ((z - x0) / sd) ** 2
            stats[f] = {"kind": NUMERIC, "mean": mu, "sd": sd}
        else:
            train_levels = col.values[tr].astype(str)
            z = rng.choice(train_levels, size=samples, replace=True)
            perturbed[f] = z.astype(object)
            lv0 = str(block1[f][0])
            same = (z == lv0).astype(float)
            design_cols.append(same)
            dist_sq += (1.0 - same)
            stats[f] = {"kind": CATEGORICAL, "level": lv0}

    preds = np.asarray(model.predict(perturbed), dtype=float)
    kernel_width = LIME_KERNEL_SCALE * math.sqrt(d)
    weights = np.exp(-dist_sq / (kernel_width ** 2))

    X = np.column_stack(design_cols)
    corrs = [abs(_weighted_corr(X[:, j], preds, weights)) for j in range(d)]
    order = sorted(range(d), key=lambda j: (-corrs[j], j))
    selected = sorted(order[:min(LIME_TOP_K, d)])

    Xs = X[:, selected]
    A = np.column_stack([np.ones(samples), Xs])
    W = weights
    p = A.shape[1]
    pen = LIME_RIDGE * np.eye(p)
    pen[0, 0] = 0.0
    coef = np.linalg.solve(A.T @ (A * W[:, None]) + pen, A.T @ (W * preds))
    fitted = A @ coef
    sw = W.sum()
    ybar = (W * preds).sum() / sw
    ss_res = float((W * (preds - fitted) ** 2).sum())
    ss_tot = float((W * (preds - ybar) ** 2).sum())
    r2 = 1.0 - ss_res / ss_tot if ss_tot > 0 else 1.0

    return {
        "kind": "lime",
        "model": model.name,
        "samples": int(samples),
        "seed": int(seed),
        "kernel_width": float(kernel_width),
        "intercept": float(coef[0]),
        "features": [
            {"feature": names[j], "coefficient": float(coef[i + 1]),
             "scale": stats[names[j]]}
            for i, j in enumerate(selected)
        ],
        "r2": float(r2),
    }


# -- SHAP --------------------------------------------------------------------


def _background_block(model, ds, background, seed):
    tr = ds.train_indices
    if len(tr) == 0:
        raise DataError("empty train split")
    rng = child_rng(seed, "shap", "background")
    b = min(int(background), len(tr))
    if b < 1:
        raise DataError("background must be at least 1")
    chosen = np.sort(rng.choice(tr, size=b, replace=False))
    return ds.row_block(chosen), b


def _coalition_value(model, bg_block, block1, names, mask_members):
    b = dict(bg_block)
    n = len(next(iter(bg_block.values())))
    for f in mask_members:
        v = block1[f][0]
        if isinstance(v, (str, np.str_)):
            b[f] = np.array([v] * n, dtype=object)
        else:
            b[f] = np.full(n, v)
    return float(np.mean(model.predict(b)))


def _exact_shap(model, bg_block, block1, names):
    d = len(names)
    vs = np.zeros(1 << d)
    for mask in range(1 << d):
        members = [names[j] for j in range(d) if mask >> j & 1]
        vs[mask] = _coalition_value(model, bg_block, block1, names, members)
    fact = [math.factorial(i) for i in range(d + 1)]
    phi = np.zeros(d)
    for j in range(d):
        bit = 1 << j
        for mask in range(1 << d):
            if mask & bit:
                continue
            s = bin(mask).count("1")
            w = fact[s] * fact[d - s - 1] / fact[d]
            phi[j] += w * (vs[mask | bit] - vs[mask])
    return float(vs[0]), phi


def _sampled_shap(model, bg_block, block1, names, seed):
    d = len(names)
    rng = child_rng(seed, "shap", "coalitions")
    v_empty = _coalition_value(model, bg_block, block1, names, [])
    v_full = _coalition_value(model, bg_block, block1, names, list(names))
    total = v_full - v_empty

    sizes = np.arange(1, d)
    mass = np.array([(d - 1) / (s * (d - s)) for s in sizes])
    probs = mass / mass.sum()

    masks = []
    targets = []
    for _ in range(SHAP_SAMPLED_COALITIONS):
        s = int(rng.choice(sizes, p=probs))
        members = rng.choice(d, size=s, replace=False)
        mask = np.zeros(d, dtype=bool)
        mask[members] = True
        masks.append(mask)
        targets.append(_coalition_value(
            model, bg_block, block1, names, [names[j] for j in np.flatnonzero(mask)]))
    Z = np.array(masks, dtype=float)
    y = np.array(targets) - v_empty

    # efficiency enforced by substituting the last coefficient
    A = Z[:, :-1] - Z[:, [-1]]
    b = y - Z[:, -1] * total
    sol, *_ = np.linalg.lstsq(A, b, rcond=None)
    phi = np.empty(d)
    phi[:-1] = sol
    phi[-1] = total - sol.sum()
    return float(v_empty), phi


def shap_explain(model: TrainedModel, ds: Dataset, instance: dict,
                 background: int = DEFAULT_SHAP_BACKGROUND, seed: int = 0) -> dict:
    require_evaluable(model, "SHAP")
    block1 = instance_block(model, instance)
    names = model.feature_names
    if not names:
        raise DataError("model has no features to attribute")
    bg_block, b = _background_block(model, ds, background, seed)
    if len(names) <= SHAP_EXACT_LIMIT:
        base, phi = _exact_shap(model, bg_block, block1, names)
        mode = "exact"
    else:
        base, phi = _sampled_shap(model, bg_block, block1, names, seed)
        mode = "sampled"
    return {
        "kind": "shap",
        "model": model.name,
        "mode": mode,
        "base": float(base),
        "values": [{"feature": f, "value": float(phi[j])} for j, f in enumerate(names)],
        "prediction": float(model.predict(block1)[0]),
        "background": int(b),
        "seed": int(seed),
    }


# -- unified dispatch --------------------------------------------------------

_METHODS = {
    "pfi": {"metric", "repeats", "threshold"},
    "pdp": {"features", "grid"},
    "ale": {"feature", "bins"},
    "lime": {"row", "samples"},
    "shap": {"row", "background"},
}

EXPLAIN_METHODS = tuple(sorted(_METHODS))


def _instance_from_row(ds: Dataset, row: int) -> dict:
    if not (0 <= row < ds.n_rows):
        raise DataError(f"row {row} out of range for {ds.n_rows} rows")
    return {f: ds.column(f).values[row] for f in ds.feature_names}


def model_explain(model: TrainedModel, ds: Dataset, method: str,
                  config: dict | None = None, seed: int = 0) -> dict:
    """Run one named explainer with a config dict; unknown keys are errors."""
    if method not in _METHODS:
        raise ConfigError(f"unknown explainer {method!r}; expected one of "
                          f"{list(EXPLAIN_METHODS)}", key_path="method")
    config = dict(config or {})
    seed = int(config.pop("seed", seed))
    unknown = sorted(set(config) - _METHODS[method])
    if unknown:
        raise ConfigError(f"unknown config keys for {method}: {unknown}",
                          key_path=f"config.{unknown[0]}")
    if method == "pfi":
        return pfi(model, ds, seed=seed, **config)
    if method == "pdp":
        if "features" not in config:
            raise ConfigError("pdp needs features", key_path="config.features")
        return pdp(model, ds, **config)
    if method == "ale":
        if "feature" not in config:
            raise ConfigError("ale needs a feature", key_path="config.feature")
        return ale(model, ds, **config)
    instance = _instance_from_row(ds, int(config.pop("row", 0)))
    if method == "lime":
        return lime_explain(model, ds, instance, seed=seed, **config)
    return shap_explain(model, ds, instance, seed=seed, **config)
