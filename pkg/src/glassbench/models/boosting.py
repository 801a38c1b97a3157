"""Gradient boosting on binned features, restricted to depth 1 or 2.

Depth-1 stumps yield a pure main-effect model; depth-2 trees add pairwise
terms.  After fitting, the kept rounds are re-indexed into an
``EffectRepresentation`` whose additive evaluation reproduces the ensemble
margin exactly, so the model is read through its effect tables rather than
through the tree list.

Second-order boosting: squared loss uses g = margin - y, h = 1; logistic
loss uses g = p - y, h = p(1 - p).  Leaf values are -G/H, scaled by the
learning rate.  A validation carve-out drawn from the training split stops
boosting when validation loss fails to improve for ``patience`` rounds, and
the round count with the best validation loss is kept.
"""

from __future__ import annotations

import numpy as np

from .. import _kernels
from ..data import BINARY, Dataset
from ..errors import DataError
from ..utils import child_rng, sigmoid
from .base import (FeatureEncoder, ModelSpec, TrainedModel, bounded_float,
                   check_training_data, positive_int)
from .binning import bin_codes, n_bins, optimal_edges, quantile_edges
from .effects import EffectRepresentation

DEFAULT_ROUNDS = 500
DEFAULT_LEARNING_RATE = 0.1
DEFAULT_MAX_BINS_PAIRWISE = 32
DEFAULT_MAX_BINS_MAIN = 10
DEFAULT_MIN_CHILD = 5
DEFAULT_VAL_FRACTION = 0.2
DEFAULT_PATIENCE = 20
_H_FLOOR = 1e-12


def _leaf(idx, g, h):
    G = float(g[idx].sum())
    H = float(h[idx].sum())
    if H <= _H_FLOOR:
        return {"leaf": True, "value": 0.0}
    return {"leaf": True, "value": -G / H}


def _split_once(codes, idx, g, h, nbins, min_child):
    feat, b, gain = _kernels.node_split(codes, idx, g, h, nbins, min_child, int(nbins.max()))
    if feat < 0:
        return None
    mask = codes[idx, feat] <= b
    return int(feat), int(b), idx[mask], idx[~mask]


def _fit_tree(codes, idx, g, h, nbins, min_child, depth):
    root = _split_once(codes, idx, g, h, nbins, min_child)
    if root is None:
        return _leaf(idx, g, h)
    feat, b, li, ri = root

    def child(sub):
        if depth == 1:
            return _leaf(sub, g, h)
        inner = _split_once(codes, sub, g, h, nbins, min_child)
        if inner is None:
            return _leaf(sub, g, h)
        f2, b2, l2, r2 = inner
        return {"leaf": False, "feature": f2, "bin": b2,
                "left": _leaf(l2, g, h), "right": _leaf(r2, g, h)}

    return {"leaf": False, "feature": feat, "bin": b, "left": child(li), "right": child(ri)}


def _tree_margin(codes, tree):
    out = np.zeros(codes.shape[0])

    def rec(node, mask):
        if node["leaf"]:
            out[mask] = node["value"]
            return
        cond = codes[:, node["feature"]] <= node["bin"]
        rec(node["left"], mask & cond)
        rec(node["right"], mask & ~cond)

    rec(tree, np.ones(codes.shape[0], dtype=bool))
    return out


def _accumulate_tree(rep: EffectRepresentation, tree, scale: float, nbins):
    """Add one tree's leaf values into the effect tables.

    Each leaf covers a rectangle in bin space (an interval per conditioned
    feature); the leaves partition that space, so adding every leaf's value
    over its rectangle reproduces the tree function exactly.
    """
    names = rep.feature_names

    def add_region(conds, value):
        ranges: dict[int, tuple[int, int]] = {}
        for j, lo, hi in conds:
            if j in ranges:
                plo, phi = ranges[j]
                ranges[j] = (max(plo, lo), min(phi, hi))
            else:
                ranges[j] = (lo, hi)
        for lo, hi in ranges.values():
            if lo > hi:
                return
        feats = sorted(ranges)
        if not feats:
            rep.intercept += value
        elif len(feats) == 1:
            j = feats[0]
            lo, hi = ranges[j]
            rep.main[names[j]][lo:hi + 1] += value
        else:
            a, b = feats
            key = rep.ensure_pair(names[a], names[b])
            (alo, ahi) = ranges[a]
            (blo, bhi) = ranges[b]
            rep.pairs[key][alo:ahi + 1, blo:bhi + 1] += value

    def walk(node, conds):
        if node["leaf"]:
            add_region(conds, scale * node["value"])
            return
        j, b = node["feature"], node["bin"]
        walk(node["left"], conds + [(j, 0, b)])
        walk(node["right"], conds + [(j, b + 1, int(nbins[j]) - 1)])

    walk(tree, [])


def _boost_loss(task, y, margins):
    if task == BINARY:
        p = np.clip(sigmoid(margins), 1e-15, 1.0 - 1e-15)
        return float(-np.mean(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)))
    d = margins - y
    return float(np.mean(d * d))


class BoostedEffectModel(TrainedModel):
    interpretable = True

    def __init__(self, name, task, feature_names, encoder, rep, config,
                 train_history, val_history, best_rounds):
        super().__init__(name, task, feature_names)
        self.encoder = encoder
        self.rep = rep
        self.config = dict(config)
        self.train_history = list(train_history)
        self.val_history = list(val_history)
        self.best_rounds = int(best_rounds)
        self._trees = []          # runtime only, kept for diagnostics in-session
        self._lr = float(config["learning_rate"])
        self.purify_sweeps = None

    def predict_margin(self, block):
        X = self.encoder.encode(block)
        codes = self.rep.codes_from_matrix(X)
        return self.rep.margin_from_codes(codes)

    def predict(self, block):
        m = self.predict_margin(block)
        if self.task == BINARY:
            return sigmoid(m)
        return m

    def payload(self):
        return {
            "name": self.name,
            "task": self.task,
            "feature_names": self.feature_names,
            "encoder": self.encoder.to_dict(),
            "effects": self.rep.to_dict(),
            "config": self.config,
            "train_history": self.train_history,
            "val_history": self.val_history,
            "best_rounds": self.best_rounds,
            "purify_sweeps": self.purify_sweeps,
        }

    @classmethod
    def from_payload(cls, payload):
        model = cls(payload["name"], payload["task"], payload["feature_names"],
                    FeatureEncoder.from_dict(payload["encoder"]),
                    EffectRepresentation.from_dict(payload["effects"]),
                    payload["config"], payload["train_history"],
                    payload["val_history"], payload["best_rounds"])
        model.purify_sweeps = payload.get("purify_sweeps")
        return model

    def describe(self):
        d = super().describe()
        d["rounds_kept"] = self.best_rounds
        d["purified"] = self.rep.purified
        d["n_pairs"] = len(self.rep.pairs)
        return d


class Xgb1Model(BoostedEffectModel):
    family = "xgb1"


class Xgb2Model(BoostedEffectModel):
    family = "xgb2"


def _read_params(spec: ModelSpec, depth: int):
    p = spec.params
    rounds = positive_int(p, "rounds", DEFAULT_ROUNDS, 1, 100_000)
    lr = bounded_float(p, "learning_rate", DEFAULT_LEARNING_RATE, 0.0, 1.0, lo_open=True)
    default_bins = DEFAULT_MAX_BINS_MAIN if depth == 1 else DEFAULT_MAX_BINS_PAIRWISE
    max_bins = positive_int(p, "max_bins", default_bins, 2, 1024)
    min_child = positive_int(p, "min_child_samples", DEFAULT_MIN_CHILD, 1, 10_000_000)
    val_fraction = bounded_float(p, "val_fraction", DEFAULT_VAL_FRACTION, 0.0, 0.5)
    patience = positive_int(p, "patience", DEFAULT_PATIENCE, 1, 100_000)
    return rounds, lr, max_bins, min_child, val_fraction, patience


def _train_boosted(ds: Dataset, spec: ModelSpec, depth: int) -> BoostedEffectModel:
    check_training_data(ds)
    rounds, lr, max_bins, min_child, val_fraction, patience = _read_params(spec, depth)
    encoder = FeatureEncoder.fit(ds)
    tr = ds.train_indices
    X = encoder.encode(ds.row_block(tr))
    y = ds.y[tr].astype(float)
    n, d = X.shape

    edges = {}
    for j, f in enumerate(encoder.feature_names):
        if depth == 1:
            e, _method = optimal_edges(X[:, j], y, max_bins=max_bins)
        else:
            e = quantile_edges(X[:, j], max_bins)
        edges[f] = e
    codes = np.column_stack(
        [bin_codes(X[:, j], edges[f]) for j, f in enumerate(encoder.feature_names)]
    ).astype(np.int32)
    codes = np.ascontiguousarray(codes)
    nbins = np.array([n_bins(edges[f]) for f in encoder.feature_names], dtype=np.int64)

    n_val = int(np.floor(val_fraction * n + 0.5)) if val_fraction > 0 else 0
    if n_val < 1 or n - n_val < max(2 * min_child, 2):
        n_val = 0
    rng = child_rng(spec.seed, "boost", "val-split")
    perm = rng.permutation(n)
    val_idx = np.sort(perm[:n_val]).astype(np.int64)
    boost_idx = np.sort(perm[n_val:]).astype(np.int64)

    yb = y[boost_idx]
    if ds.task == BINARY:
        p0 = float(np.clip(yb.mean(), 1e-6, 1.0 - 1e-6))
        base = float(np.log(p0 / (1.0 - p0)))
    else:
        base = float(yb.mean())
    margins = np.full(n, base)

    trees = []
    train_history = []
    val_history = []
    best_val = np.inf
    best_rounds = 0
    stall = 0
    for _ in range(rounds):
        if ds.task == BINARY:
            p = sigmoid(margins)
            g = p - y
            h = np.maximum(p * (1.0 - p), _H_FLOOR)
        else:
            g = margins - y
            h = np.ones(n)
        tree = _fit_tree(codes, boost_idx, g, h, nbins, min_child, depth)
        if tree["leaf"] and abs(tree["value"]) < 1e-15:
            break
        margins += lr * _tree_margin(codes, tree)
        trees.append(tree)
        train_history.append(_boost_loss(ds.task, yb, margins[boost_idx]))
        if n_val:
            vl = _boost_loss(ds.task, y[val_idx], margins[val_idx])
            val_history.append(vl)
            if vl < best_val - 1e-12:
                best_val = vl
                best_rounds = len(trees)
                stall = 0
            else:
                stall += 1
                if stall >= patience:
                    break

    n_use = best_rounds if (n_val and best_rounds > 0) else len(trees)
    rep = EffectRepresentation(encoder.feature_names, edges, intercept=base)
    for tree in trees[:n_use]:
        _accumulate_tree(rep, tree, lr, nbins)
    rep.set_weights_from_codes(codes, ds.row_weights()[tr])

    cls = Xgb1Model if depth == 1 else Xgb2Model
    config = {
        "rounds": rounds,
        "learning_rate": lr,
        "max_bins": max_bins,
        "min_child_samples": min_child,
        "val_fraction": val_fraction,
        "patience": patience,
        "seed": spec.seed,
        "depth": depth,
    }
    name = spec.name or cls.family
    model = cls(name, ds.task, encoder.feature_names, encoder, rep, config,
                train_history, val_history, n_use)
    model._trees = trees[:n_use]
    model._codes_train = codes
    model._margin_base = base
    return model


def train_xgb1(ds: Dataset, spec: ModelSpec) -> Xgb1Model:
    return _train_boosted(ds, spec, depth=1)


def train_xgb2(ds: Dataset, spec: ModelSpec) -> Xgb2Model:
    return _train_boosted(ds, spec, depth=2)


def purify(model: BoostedEffectModel) -> BoostedEffectModel:
    """Return a copy of the model with centered effect tables."""
    if not isinstance(model, BoostedEffectModel):
        raise DataError("purify applies to binned boosted models only")
    rep = model.rep.copy()
    sweeps = rep.purify()
    out = type(model)(model.name, model.task, model.feature_names, model.encoder,
                      rep, model.config, model.train_history, model.val_history,
                      model.best_rounds)
    out.purify_sweeps = sweeps
    out._trees = model._trees
    return out
