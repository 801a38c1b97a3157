"""Greedy CART decision tree for regression and binary classification.

Impurity is the within-node squared-error sum (regression) or Gini times the
node size (binary).  Numeric splits sit at midpoints between sorted distinct
values; categorical splits order levels by their target mean and cut the
ordering.  Equal-gain ties go to the lower feature index, then the lower
threshold / shorter level prefix.  A node keeps splitting while it is impure,
depth remains, and a partition respecting min_samples_leaf exists; zero-gain
splits are allowed (they let depth-2 trees solve XOR-style targets).
"""

from __future__ import annotations

import numpy as np

from ..data import BINARY, CATEGORICAL, Dataset
from .base import ModelSpec, TrainedModel, check_training_data, positive_int


def _impurity_sum(y, task):
    n = len(y)
    if n == 0:
        return 0.0
    if task == BINARY:
        p = y.mean()
        return n * 2.0 * p * (1.0 - p)  # n * gini
    return float(((y - y.mean()) ** 2).sum())


def _leaf_value(y, task):
    return float(y.mean())  # class-1 proportion doubles as the mean of 0/1 labels


def _best_numeric_split(v, y, task, min_leaf):
    order = np.argsort(v, kind="stable")
    vs = v[order]
    ys = y[order]
    n = len(ys)
    s1 = np.concatenate([[0.0], np.cumsum(ys)])
    s2 = np.concatenate([[0.0], np.cumsum(ys * ys)])
    parent = _impurity_sum(ys, task)
    best = None
    for pos in range(min_leaf, n - min_leaf + 1):
        if vs[pos - 1] >= vs[pos]:
            continue
        nl, nr = pos, n - pos
        l1, l2 = s1[pos], s2[pos]
        r1, r2 = s1[n] - l1, s2[n] - l2
        if task == BINARY:
            pl, pr = l1 / nl, r1 / nr
            child = nl * 2 * pl * (1 - pl) + nr * 2 * pr * (1 - pr)
        else:
            child = (l2 - l1 * l1 / nl) + (r2 - r1 * r1 / nr)
        gain = parent - child
        if best is None or gain > best[0]:
            best = (gain, 0.5 * (vs[pos - 1] + vs[pos]))
    if best is None:
        return None
    return {"gain": best[0], "kind": "numeric", "threshold": float(best[1])}


def _best_categorical_split(v, y, task, min_leaf):
    levels = np.asarray([str(x) for x in v], dtype=object)
    uniq = np.unique(levels)
    if len(uniq) < 2:
        return None
    means = {lev: y[levels == lev].mean() for lev in uniq}
    ordered = sorted(uniq, key=lambda lev: (means[lev], lev))
    parent = _impurity_sum(y, task)
    best = None
    left_mask = np.zeros(len(y), dtype=bool)
    for i in range(len(ordered) - 1):
        left_mask |= levels == ordered[i]
        nl = int(left_mask.sum())
        nr = len(y) - nl
        if nl < min_leaf or nr < min_leaf:
            continue
        child = _impurity_sum(y[left_mask], task) + _impurity_sum(y[~left_mask], task)
        gain = parent - child
        if best is None or gain > best[0]:
            best = (gain, i + 1)
    if best is None:
        return None
    return {"gain": best[0], "kind": "categorical", "left_levels": [str(l) for l in ordered[: best[1]]]}


def _grow(cols, y, task, depth, max_depth, min_leaf, importance):
    node = {"leaf": True, "value": _leaf_value(y, task), "n": int(len(y))}
    if depth >= max_depth or len(y) < 2 * min_leaf:
        return node
    parent_imp = _impurity_sum(y, task)
    if parent_imp <= 0.0:
        return node
    best = None
    best_j = -1
    for j, (name, kind, v) in enumerate(cols):
        if kind == CATEGORICAL:
            cand = _best_categorical_split(v, y, task, min_leaf)
        else:
            cand = _best_numeric_split(v, y, task, min_leaf)
        if cand is None:
            continue
        if best is None or cand["gain"] > best["gain"]:
            best = cand
            best_j = j
    if best is None or best["gain"] < 0.0:
        return node
    name, kind, v = cols[best_j]
    if best["kind"] == "numeric":
        mask = v.astype(float) <= best["threshold"]
    else:
        left = set(best["left_levels"])
        mask = np.array([str(x) in left for x in v])
    importance[name] = importance.get(name, 0.0) + float(best["gain"])
    left_cols = [(nm, kd, vv[mask]) for nm, kd, vv in cols]
    right_cols = [(nm, kd, vv[~mask]) for nm, kd, vv in cols]
    node.update({
        "leaf": False,
        "feature": name,
        "kind": best["kind"],
        "gain": float(best["gain"]),
    })
    if best["kind"] == "numeric":
        node["threshold"] = best["threshold"]
    else:
        node["left_levels"] = best["left_levels"]
    node["left"] = _grow(left_cols, y[mask], task, depth + 1, max_depth, min_leaf, importance)
    node["right"] = _grow(right_cols, y[~mask], task, depth + 1, max_depth, min_leaf, importance)
    return node


class TreeModel(TrainedModel):
    family = "tree"
    interpretable = True

    def __init__(self, name, task, feature_names, kinds, root, max_depth, min_samples_leaf,
                 importance):
        super().__init__(name, task, feature_names)
        self.kinds = dict(kinds)
        self.root = root
        self.max_depth = int(max_depth)
        self.min_samples_leaf = int(min_samples_leaf)
        self.importance_raw = {k: float(v) for k, v in importance.items()}

    def _route(self, node, block, i):
        while not node["leaf"]:
            v = block[node["feature"]][i]
            if node["kind"] == "numeric":
                go_left = float(v) <= node["threshold"]
            else:
                go_left = str(v) in set(node["left_levels"])
            node = node["left"] if go_left else node["right"]
        return node

    def predict(self, block):
        n = len(next(iter(block.values())))
        out = np.empty(n)
        for i in range(n):
            out[i] = self._route(self.root, block, i)["value"]
        return out

    def decision_path(self, block, i):
        """Ordered satisfied conditions plus node values along the route."""
        node = self.root
        path = []
        while not node["leaf"]:
            v = block[node["feature"]][i]
            if node["kind"] == "numeric":
                go_left = float(v) <= node["threshold"]
                cond = {
                    "feature": node["feature"],
                    "op": "<=" if go_left else ">",
                    "threshold": node["threshold"],
                }
            else:
                go_left = str(v) in set(node["left_levels"])
                cond = {
                    "feature": node["feature"],
                    "op": "in" if go_left else "not in",
                    "levels": list(node["left_levels"]),
                }
            child = node["left"] if go_left else node["right"]
            cond["value_before"] = node["value"]
            cond["value_after"] = child["value"]
            path.append(cond)
            node = child
        return path, node["value"]

    def payload(self):
        return {
            "name": self.name,
            "task": self.task,
            "feature_names": self.feature_names,
            "kinds": self.kinds,
            "root": self.root,
            "max_depth": self.max_depth,
            "min_samples_leaf": self.min_samples_leaf,
            "importance_raw": self.importance_raw,
        }

    @staticmethod
    def from_payload(d) -> "TreeModel":
        return TreeModel(
            name=d["name"], task=d["task"], feature_names=d["feature_names"],
            kinds=d["kinds"], root=d["root"], max_depth=d["max_depth"],
            min_samples_leaf=d["min_samples_leaf"], importance=d["importance_raw"],
        )


def train_tree(ds: Dataset, spec: ModelSpec) -> TreeModel:
    check_training_data(ds)
    max_depth = positive_int(spec.params, "max_depth", 3, lo=1, hi=32)
    min_leaf = positive_int(spec.params, "min_samples_leaf", 5, lo=1)
    tr = ds.train_indices
    y = ds.y[tr]
    cols = []
    for c in ds.feature_columns:
        cols.append((c.name, c.kind, c.values[tr]))
    importance = {}
    root = _grow(cols, y, ds.task, 0, max_depth, min_leaf, importance)
    return TreeModel(
        name=spec.name or "tree", task=ds.task,
        feature_names=[c.name for c in ds.feature_columns],
        kinds={c.name: c.kind for c in ds.feature_columns},
        root=root, max_depth=max_depth, min_samples_leaf=min_leaf, importance=importance,
    )
