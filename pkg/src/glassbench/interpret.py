"""Inherent interpretation for glass models, global and local.

Only models whose functional form is directly readable (GLM, GAM, Tree,
and the binned boosted models) are accepted; registered models are refused
with a capability error.

Global importance conventions per family, each normalized to sum to 1
when any entry is nonzero:

* GLM: |coefficient| times the train standard deviation of the (encoded)
  feature, so the ranking is invariant under feature rescaling.
* GAM and boosted models: train-weighted variance of each fitted effect
  (pairwise tables included for the depth-2 model, keyed "a:b").
* Tree: total impurity decrease attributed to each split feature.

Local attributions are reported on the margin (pre-link) scale, where
``base + sum(contributions) = margin`` holds exactly: GLM contributions are
measured from the train-mean baseline, additive-effect models report their
centered effect values with the intercept as base, and trees report the
value shift along the decision path starting from the root value.
"""

from __future__ import annotations

import numpy as np

from .data import CATEGORICAL, NUMERIC
from .errors import CapabilityError, DataError
from .models import GamModel, GlmModel, TrainedModel, TreeModel
from .models.boosting import BoostedEffectModel
from .models.binning import bin_codes

CURVE_POINTS = 20


def _require_glass(model: TrainedModel):
    if not model.interpretable:
        raise CapabilityError(
            f"model_interpret() is not valid for model '{model.name}' "
            f"(family '{model.family}'): inherent interpretation needs a glass model"
        )


def _normalized(pairs):
    total = float(sum(v for _, v in pairs))
    if total > 0.0:
        pairs = [(k, v / total) for k, v in pairs]
    pairs = sorted(pairs, key=lambda kv: (-kv[1], kv[0]))
    return [{"term": k, "value": float(v)} for k, v in pairs]


def _weighted_variance(values: np.ndarray, weights: np.ndarray) -> float:
    tot = float(weights.sum())
    if tot <= 0.0:
        return 0.0
    m = float((values * weights).sum() / tot)
    d = values - m
    return float((weights * d * d).sum() / tot)


def _count_leaves(node) -> int:
    if node["leaf"]:
        return 1
    return _count_leaves(node["left"]) + _count_leaves(node["right"])


def instance_block(model: TrainedModel, instance: dict) -> dict:
    """One-row feature block from a plain feature->value mapping."""
    if not isinstance(instance, dict):
        raise DataError("instance must be a mapping of feature name to value")
    kinds = {}
    if hasattr(model, "encoder"):
        kinds = model.encoder.kinds
    elif isinstance(model, TreeModel):
        kinds = model.kinds
    elif isinstance(model, GamModel):
        kinds = {f: t["kind"] for f, t in model.terms.items()}
    block = {}
    for f in model.feature_names:
        if f not in instance:
            raise DataError(f"instance is missing feature {f!r}")
        v = instance[f]
        if kinds.get(f, NUMERIC) == NUMERIC:
            try:
                block[f] = np.array([float(v)])
            except (TypeError, ValueError):
                raise DataError(f"feature {f!r} expects a numeric value, got {v!r}") from None
        else:
            block[f] = np.array([str(v)], dtype=object)
    return block


# -- global ------------------------------------------------------------------


def _glm_global(model: GlmModel):
    beta = model.coefficients
    raw = [(f, abs(float(beta[j])) * float(model.train_sds[j]))
           for j, f in enumerate(model.feature_names)]
    effects = []
    for j, f in enumerate(model.feature_names):
        if model.encoder.kinds.get(f, NUMERIC) == CATEGORICAL:
            levels = sorted(model.encoder.level_maps[f])
            vals = [float(beta[j]) * (model.encoder.level_maps[f][lv] - model.train_means[j])
                    for lv in levels]
            effects.append({"feature": f, "kind": CATEGORICAL,
                            "grid": levels, "value": vals})
        else:
            lo, hi = float(model.train_mins[j]), float(model.train_maxs[j])
            grid = np.linspace(lo, hi, CURVE_POINTS) if hi > lo else np.array([lo])
            vals = float(beta[j]) * (grid - float(model.train_means[j]))
            effects.append({"feature": f, "kind": NUMERIC,
                            "grid": grid.tolist(), "value": vals.tolist()})
    summary = {
        "intercept": model.intercept,
        "coefficients": {f: float(beta[j]) for j, f in enumerate(model.feature_names)},
        "alpha": model.alpha,
        "l1_ratio": model.l1_ratio,
        "kkt_residual": model.kkt_residual,
    }
    return raw, effects, [], summary


def _gam_global(model: GamModel):
    raw = [(f, float(model.effect_variance.get(f, 0.0))) for f in model.feature_names]
    effects = []
    for f in model.feature_names:
        if f in model.terms:
            s = model.shape_function(f, n_points=100)
            effects.append({"feature": f, "kind": s["kind"],
                            "grid": s["grid"], "value": s["values"]})
    summary = {
        "intercept": model.intercept,
        "smoothness": model.config.get("smoothness"),
        "terms": {f: model.terms[f]["kind"] for f in model.terms},
    }
    return raw, effects, [], summary


def _tree_global(model: TreeModel):
    raw = [(f, float(model.importance_raw.get(f, 0.0))) for f in model.feature_names]
    summary = {
        "max_depth": model.max_depth,
        "n_leaves": _count_leaves(model.root),
        "structure": model.root,
    }
    return raw, [], [], summary


def _boosted_global(model: BoostedEffectModel):
    rep = model.rep
    raw = []
    for f in model.feature_names:
        raw.append((f, _weighted_variance(rep.main[f], rep.main_weights[f])))
    for (a, b) in sorted(rep.pairs, key=lambda k: (rep._index[k[0]], rep._index[k[1]])):
        raw.append((f"{a}:{b}",
                    _weighted_variance(rep.pairs[(a, b)].ravel(),
                                       rep.pair_weights[(a, b)].ravel())))
    effects = []
    for f in model.feature_names:
        edges = rep.edges[f]
        if model.encoder.kinds.get(f, NUMERIC) == CATEGORICAL:
            levels = sorted(model.encoder.level_maps[f])
            enc = np.array([model.encoder.level_maps[f][lv] for lv in levels])
            codes = bin_codes(enc, edges)
            effects.append({"feature": f, "kind": CATEGORICAL, "grid": levels,
                            "value": [float(rep.main[f][c]) for c in codes]})
        else:
            effects.append({"feature": f, "kind": "step", "grid": edges.tolist(),
                            "value": rep.main[f].tolist(),
                            "count": rep.main_weights[f].tolist()})
    pair_effects = []
    for (a, b) in sorted(rep.pairs, key=lambda k: (rep._index[k[0]], rep._index[k[1]])):
        pair_effects.append({
            "features": [a, b],
            "grid_a": rep.edges[a].tolist(),
            "grid_b": rep.edges[b].tolist(),
            "value": rep.pairs[(a, b)].tolist(),
            "count": rep.pair_weights[(a, b)].tolist(),
        })
    summary = {
        "intercept": rep.intercept,
        "purified": rep.purified,
        "rounds_kept": model.best_rounds,
        "n_pairs": len(rep.pairs),
    }
    return raw, effects, pair_effects, summary


def interpret_global(model: TrainedModel) -> dict:
    _require_glass(model)
    if isinstance(model, GlmModel):
        raw, effects, pair_effects, summary = _glm_global(model)
    elif isinstance(model, GamModel):
        raw, effects, pair_effects, summary = _gam_global(model)
    elif isinstance(model, TreeModel):
        raw, effects, pair_effects, summary = _tree_global(model)
    elif isinstance(model, BoostedEffectModel):
        raw, effects, pair_effects, summary = _boosted_global(model)
    else:
        raise CapabilityError(
            f"model_interpret() is not valid for family '{model.family}'")
    return {
        "kind": "global_interpretation",
        "model": model.name,
        "family": model.family,
        "importance": _normalized(raw),
        "effects": effects,
        "pair_effects": pair_effects,
        "summary": summary,
    }


# -- local -------------------------------------------------------------------


def interpret_local(model: TrainedModel, instance: dict) -> dict:
    _require_glass(model)
    block = instance_block(model, instance)
    margin = float(model.predict_margin(block)[0])
    prediction = float(model.predict(block)[0])
    path = None

    if isinstance(model, GlmModel):
        x = model.encoder.encode(block)[0]
        beta = model.coefficients
        contributions = [
            {"term": f, "value": float(beta[j] * (x[j] - model.train_means[j]))}
            for j, f in enumerate(model.feature_names)
        ]
        base = model.intercept + float(beta @ model.train_means)
    elif isinstance(model, GamModel):
        contributions = [
            {"term": f, "value": float(model._term_values(f, block[f])[0])}
            for f in model.feature_names if f in model.terms
        ]
        base = model.intercept
    elif isinstance(model, BoostedEffectModel):
        rep = model.rep
        codes = rep.codes_from_matrix(model.encoder.encode(block))[0]
        idx = {f: j for j, f in enumerate(rep.feature_names)}
        contributions = [
            {"term": f, "value": float(rep.main[f][codes[idx[f]]])}
            for f in model.feature_names
        ]
        for (a, b) in sorted(rep.pairs, key=lambda k: (idx[k[0]], idx[k[1]])):
            contributions.append({
                "term": f"{a}:{b}",
                "value": float(rep.pairs[(a, b)][codes[idx[a]], codes[idx[b]]]),
            })
        base = rep.intercept
    elif isinstance(model, TreeModel):
        conds, leaf_value = model.decision_path(block, 0)
        base = conds[0]["value_before"] if conds else leaf_value
        contributions = []
        path = []
        for c in conds:
            contributions.append({
                "term": c["feature"],
                "value": float(c["value_after"] - c["value_before"]),
            })
            step = {k: c[k] for k in c if k not in ("value_before", "value_after")}
            step["value"] = c["value_after"]
            path.append(step)
    else:
        raise CapabilityError(
            f"model_interpret() is not valid for family '{model.family}'")

    out = {
        "kind": "local_interpretation",
        "model": model.name,
        "family": model.family,
        "base": float(base),
        "contributions": contributions,
        "margin": margin,
        "prediction": prediction,
    }
    if path is not None:
        out["path"] = path
    return out
