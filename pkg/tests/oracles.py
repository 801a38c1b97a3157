"""Independent reference implementations used to check engine results.

Everything here is written the slow, obvious way (pairwise loops, explicit
subset enumeration, brute-force bin membership) so it shares no code with
the engine modules under test.
"""

import itertools
import math

import numpy as np


def pairwise_auc(y, scores):
    """O(n^2) AUC: fraction of (pos, neg) pairs ranked correctly, ties 0.5."""
    y = np.asarray(y)
    scores = np.asarray(scores, dtype=float)
    pos = scores[y == 1]
    neg = scores[y == 0]
    if len(pos) == 0 or len(neg) == 0:
        return None
    wins = 0.0
    for p in pos:
        for q in neg:
            if p > q:
                wins += 1.0
            elif p == q:
                wins += 0.5
    return wins / (len(pos) * len(neg))


def exact_shap(predict, background_rows, instance, names):
    """Interventional Shapley values by full subset enumeration.

    predict takes {name: array}; background_rows is a dict of arrays; the
    value of a coalition S is the mean prediction with S's features set to
    the instance and the rest left at background values.
    """
    d = len(names)
    b = len(next(iter(background_rows.values())))

    def value(subset):
        block = {k: np.asarray(v).copy() for k, v in background_rows.items()}
        for j in subset:
            name = names[j]
            col = block[name]
            fill = instance[name]
            if col.dtype == object:
                block[name] = np.array([fill] * b, dtype=object)
            else:
                block[name] = np.full(b, float(fill))
        return float(np.mean(predict(block)))

    phi = np.zeros(d)
    all_j = set(range(d))
    for j in range(d):
        others = sorted(all_j - {j})
        for size in range(d):
            for subset in itertools.combinations(others, size):
                weight = (math.factorial(size) * math.factorial(d - size - 1)
                          / math.factorial(d))
                phi[j] += weight * (value(subset + (j,)) - value(subset))
    return value(()), phi


def slice_stats_1d(values, losses, edges):
    """Per-bin counts and mean losses by explicit membership checks."""
    out = []
    for k in range(len(edges) - 1):
        lo, hi = edges[k], edges[k + 1]
        if k == len(edges) - 2:
            member = (values >= lo) & (values <= hi)
        else:
            member = (values >= lo) & (values < hi)
        rows = np.flatnonzero(member)
        mean = float(losses[rows].mean()) if len(rows) else None
        out.append((int(len(rows)), mean))
    return out


def slice_stats_2d(va, vb, losses, edges_a, edges_b):
    def member(values, edges, k):
        lo, hi = edges[k], edges[k + 1]
        if k == len(edges) - 2:
            return (values >= lo) & (values <= hi)
        return (values >= lo) & (values < hi)

    out = []
    for ka in range(len(edges_a) - 1):
        for kb in range(len(edges_b) - 1):
            m = member(va, edges_a, ka) & member(vb, edges_b, kb)
            rows = np.flatnonzero(m)
            mean = float(losses[rows].mean()) if len(rows) else None
            out.append((ka, kb, int(len(rows)), mean))
    return out


def psi(p_values, q_values, edges, eps=1e-6):
    """Population stability index with explicit proportion flooring."""
    def props(vals):
        counts = []
        for k in range(len(edges) - 1):
            lo, hi = edges[k], edges[k + 1]
            if k == len(edges) - 2:
                counts.append(int(((vals >= lo) & (vals <= hi)).sum()))
            else:
                counts.append(int(((vals >= lo) & (vals < hi)).sum()))
        total = len(vals)
        return [max(c / total, eps) for c in counts]

    p = props(p_values)
    q = props(q_values)
    return sum((pi - qi) * math.log(pi / qi) for pi, qi in zip(p, q))


def conformal_quantile(scores, alpha):
    """k-th smallest with k = ceil((n+1)(1-alpha)); None when k > n."""
    n = len(scores)
    k = math.ceil((n + 1) * (1.0 - alpha))
    if k > n:
        return None
    return float(sorted(scores)[k - 1])


def glm_objective(X, y, w, intercept, l1, l2, sample_weight=None):
    """Elastic-net least squares objective at original scale."""
    n = len(y)
    sw = np.ones(n) if sample_weight is None else np.asarray(sample_weight)
    r = y - intercept - X @ w
    return (0.5 * float((sw * r * r).sum()) / n
            + l1 * float(np.abs(w).sum()) + 0.5 * l2 * float(w @ w))


def kkt_residual(X, y, w, intercept, l1, l2, sample_weight=None):
    """Max violation of the subgradient conditions for standardized enet."""
    n = len(y)
    sw = np.ones(n) if sample_weight is None else np.asarray(sample_weight)
    r = y - intercept - X @ w
    grad = -(X.T * sw) @ r / n + l2 * w
    res = 0.0
    for j in range(len(w)):
        if w[j] > 0:
            res = max(res, abs(grad[j] + l1))
        elif w[j] < 0:
            res = max(res, abs(grad[j] - l1))
        else:
            res = max(res, max(0.0, abs(grad[j]) - l1))
    return res


def weighted_marginal_maxima(tables, weights):
    """Max |weighted marginal mean| over rows and columns of pair tables."""
    worst = 0.0
    for T, W in zip(tables, weights):
        T = np.asarray(T, dtype=float)
        W = np.asarray(W, dtype=float)
        for a in range(T.shape[0]):
            mass = W[a, :].sum()
            if mass > 0:
                worst = max(worst, abs(float((T[a, :] * W[a, :]).sum() / mass)))
        for b in range(T.shape[1]):
            mass = W[:, b].sum()
            if mass > 0:
                worst = max(worst, abs(float((T[:, b] * W[:, b]).sum() / mass)))
    return worst
