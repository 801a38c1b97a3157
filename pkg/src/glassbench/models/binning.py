"""Feature discretization: quantile edges and supervised (tree-based) edges.

The supervised variant grows a single-feature decision tree best-first until
the leaf cap is reached, then uses the split thresholds as interior edges.
Squared-error impurity is used for both tasks: for 0/1 targets it equals
half the Gini criterion, so the chosen splits are identical.
"""

from __future__ import annotations

import math

import numpy as np

from ..data import quantile


def quantile_edges(values: np.ndarray, n_bins: int) -> np.ndarray:
    """Edges at evenly spaced quantiles, deduplicated; spans the data range."""
    v = np.asarray(values, dtype=float)
    lo, hi = float(v.min()), float(v.max())
    if lo == hi:
        return np.array([lo, hi])
    edges = np.unique(quantile(v, np.linspace(0.0, 1.0, n_bins + 1)))
    if len(edges) < 2:
        return np.array([lo, hi])
    edges[0], edges[-1] = lo, hi
    return edges


def bin_codes(values: np.ndarray, edges: np.ndarray) -> np.ndarray:
    """Bin index per value: bins are [e_i, e_{i+1}) with the last closed;
    out-of-range values clamp into the first/last bin."""
    return np.searchsorted(edges[1:-1], np.asarray(values, dtype=float),
                           side="right").astype(np.int32)


def n_bins(edges: np.ndarray) -> int:
    return max(1, len(edges) - 1)


def _best_split_range(xs, s1, s2, start, end, min_leaf):
    """Best SSE-reducing split of sorted range [start, end).

    Returns (gain, pos, threshold) or None.  Candidates sit between distinct
    consecutive values; ties keep the lowest position (scan order).
    """
    n = end - start
    if n < 2 * min_leaf:
        return None
    tot1 = s1[end] - s1[start]
    tot2 = s2[end] - s2[start]
    sse_parent = tot2 - tot1 * tot1 / n
    best = None
    for pos in range(start + min_leaf, end - min_leaf + 1):
        if xs[pos - 1] >= xs[pos]:
            continue
        nl = pos - start
        nr = end - pos
        l1 = s1[pos] - s1[start]
        l2 = s2[pos] - s2[start]
        sse_l = l2 - l1 * l1 / nl
        r1 = tot1 - l1
        r2 = tot2 - l2
        sse_r = r2 - r1 * r1 / nr
        gain = sse_parent - sse_l - sse_r
        if best is None or gain > best[0]:
            best = (gain, pos, 0.5 * (xs[pos - 1] + xs[pos]))
    return best


def optimal_edges(x: np.ndarray, y: np.ndarray, max_bins: int = 10,
                  min_frac: float = 0.05):
    """Supervised edges from a depth-unbounded tree with at most max_bins leaves.

    Falls back to quantile edges when no split improves the fit; a constant
    column yields a single degenerate bin.  Returns (edges, method) with
    method one of "tree", "quantile_fallback", "constant".
    """
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    lo, hi = float(x.min()), float(x.max())
    if lo == hi:
        return np.array([lo, hi]), "constant"
    n = len(x)
    min_leaf = max(1, int(math.ceil(min_frac * n)))
    order = np.argsort(x, kind="stable")
    xs = x[order]
    ys = y[order]
    s1 = np.concatenate([[0.0], np.cumsum(ys)])
    s2 = np.concatenate([[0.0], np.cumsum(ys * ys)])

    leaves = [(0, n)]
    candidates = {(0, n): _best_split_range(xs, s1, s2, 0, n, min_leaf)}
    thresholds = []
    while len(leaves) < max_bins:
        best_leaf = None
        best = None
        for leaf in leaves:
            cand = candidates[leaf]
            if cand is None or cand[0] <= 0.0:
                continue
            # ties toward the leaf covering the lower value range
            if best is None or cand[0] > best[0] or (cand[0] == best[0] and leaf[0] < best_leaf[0]):
                best = cand
                best_leaf = leaf
        if best is None:
            break
        _, pos, thr = best
        start, end = best_leaf
        leaves.remove(best_leaf)
        del candidates[best_leaf]
        for child in ((start, pos), (pos, end)):
            leaves.append(child)
            candidates[child] = _best_split_range(xs, s1, s2, child[0], child[1], min_leaf)
        thresholds.append(thr)
    if not thresholds:
        return quantile_edges(x, max_bins), "quantile_fallback"
    edges = np.array([lo] + sorted(thresholds) + [hi])
    return edges, "tree"
