"""Additive effect store for boosted-tree models.

A fitted ensemble over binned features is re-indexed here as

    margin(x) = intercept + sum_j main_j(bin_j(x)) + sum_{j<k} pair_jk(bin_j(x), bin_k(x))

which reproduces the ensemble output exactly.  ``purify`` centers the store:
weighted row/column means of each pairwise table move into the main effects,
weighted means of the main effects move into the intercept, iterated until
every marginal mean is at most 1e-10 (empirical train bin frequencies are
the weights; empty bins carry zero weight and are excluded from the means).
Because each transfer subtracts and adds the same quantity along any
evaluation path, predictions are unchanged up to float round-off.
"""

from __future__ import annotations

import numpy as np

from ..errors import DataError
from .binning import bin_codes, n_bins

PURIFY_TOL = 1e-10
PURIFY_MAX_SWEEPS = 100


class EffectRepresentation:
    def __init__(self, feature_names, edges, intercept=0.0):
        self.feature_names = list(feature_names)
        self._index = {f: i for i, f in enumerate(self.feature_names)}
        self.edges = {f: np.asarray(edges[f], dtype=float) for f in self.feature_names}
        self.intercept = float(intercept)
        self.main = {f: np.zeros(n_bins(self.edges[f])) for f in self.feature_names}
        self.pairs: dict[tuple[str, str], np.ndarray] = {}
        self.main_weights = {f: np.zeros(n_bins(self.edges[f])) for f in self.feature_names}
        self.pair_weights: dict[tuple[str, str], np.ndarray] = {}
        self.purified = False

    # -- structure ----------------------------------------------------------

    def nbins(self, feature: str) -> int:
        return n_bins(self.edges[feature])

    def pair_key(self, a: str, b: str) -> tuple[str, str]:
        if self._index[a] <= self._index[b]:
            return (a, b)
        return (b, a)

    def ensure_pair(self, a: str, b: str) -> tuple[str, str]:
        key = self.pair_key(a, b)
        if key not in self.pairs:
            self.pairs[key] = np.zeros((self.nbins(key[0]), self.nbins(key[1])))
            self.pair_weights[key] = np.zeros_like(self.pairs[key])
        return key

    # -- evaluation ---------------------------------------------------------

    def codes_from_matrix(self, X: np.ndarray) -> np.ndarray:
        cols = [bin_codes(X[:, j], self.edges[f]) for j, f in enumerate(self.feature_names)]
        return np.column_stack(cols).astype(np.int32)

    def margin_from_codes(self, codes: np.ndarray) -> np.ndarray:
        out = np.full(codes.shape[0], self.intercept)
        for j, f in enumerate(self.feature_names):
            out += self.main[f][codes[:, j]]
        for (a, b), table in self.pairs.items():
            out += table[codes[:, self._index[a]], codes[:, self._index[b]]]
        return out

    # -- weights ------------------------------------------------------------

    def set_weights_from_codes(self, codes: np.ndarray, row_weights: np.ndarray):
        for j, f in enumerate(self.feature_names):
            self.main_weights[f] = np.bincount(
                codes[:, j], weights=row_weights, minlength=self.nbins(f)
            ).astype(float)
        for (a, b) in self.pairs:
            W = np.zeros_like(self.pairs[(a, b)])
            np.add.at(W, (codes[:, self._index[a]], codes[:, self._index[b]]), row_weights)
            self.pair_weights[(a, b)] = W

    # -- purification -------------------------------------------------------

    def marginal_abs_max(self) -> float:
        """Largest |weighted marginal mean| over pair rows/columns and mains."""
        worst = 0.0
        for key, T in self.pairs.items():
            W = self.pair_weights[key]
            roww = W.sum(axis=1)
            colw = W.sum(axis=0)
            if (roww > 0).any():
                rm = np.abs((T * W).sum(axis=1)[roww > 0] / roww[roww > 0])
                worst = max(worst, float(rm.max()))
            if (colw > 0).any():
                cm = np.abs((T * W).sum(axis=0)[colw > 0] / colw[colw > 0])
                worst = max(worst, float(cm.max()))
        for f in self.feature_names:
            w = self.main_weights[f]
            tot = w.sum()
            if tot > 0:
                worst = max(worst, abs(float(self.main[f] @ w) / tot))
        return worst

    def purify(self, tol: float = PURIFY_TOL, max_sweeps: int = PURIFY_MAX_SWEEPS) -> int:
        """Iterative weighted marginal centering; returns sweeps used."""
        for key in self.pairs:
            if self.pair_weights[key].sum() <= 0:
                raise DataError(f"pair {key} has no bin weights; fit weights before purify")
        sweeps = 0
        ordered = sorted(self.pairs, key=lambda k: (self._index[k[0]], self._index[k[1]]))
        for _ in range(max_sweeps):
            sweeps += 1
            for key in ordered:
                a, b = key
                T = self.pairs[key]
                W = self.pair_weights[key]
                roww = W.sum(axis=1)
                colw = W.sum(axis=0)
                rm = np.where(roww > 0, (T * W).sum(axis=1) / np.where(roww > 0, roww, 1.0), 0.0)
                T -= rm[:, None]
                self.main[a] += rm
                cm = np.where(colw > 0, (T * W).sum(axis=0) / np.where(colw > 0, colw, 1.0), 0.0)
                T -= cm[None, :]
                self.main[b] += cm
            for f in self.feature_names:
                w = self.main_weights[f]
                tot = w.sum()
                if tot > 0:
                    m = float(self.main[f] @ w) / tot
                    self.main[f] -= m
                    self.intercept += m
            if self.marginal_abs_max() <= tol:
                break
        self.purified = True
        return sweeps

    # -- persistence --------------------------------------------------------

    def copy(self) -> "EffectRepresentation":
        rep = EffectRepresentation(self.feature_names, self.edges, self.intercept)
        rep.main = {f: v.copy() for f, v in self.main.items()}
        rep.pairs = {k: v.copy() for k, v in self.pairs.items()}
        rep.main_weights = {f: v.copy() for f, v in self.main_weights.items()}
        rep.pair_weights = {k: v.copy() for k, v in self.pair_weights.items()}
        rep.purified = self.purified
        return rep

    def to_dict(self):
        return {
            "feature_names": self.feature_names,
            "edges": {f: e.tolist() for f, e in self.edges.items()},
            "intercept": self.intercept,
            "main": {f: v.tolist() for f, v in self.main.items()},
            "main_weights": {f: v.tolist() for f, v in self.main_weights.items()},
            "pairs": [
                {
                    "features": list(k),
                    "table": self.pairs[k].tolist(),
                    "weights": self.pair_weights[k].tolist(),
                }
                for k in sorted(self.pairs, key=lambda k: (self._index[k[0]], self._index[k[1]]))
            ],
            "purified": self.purified,
        }

    @staticmethod
    def from_dict(d) -> "EffectRepresentation":
        rep = EffectRepresentation(d["feature_names"], {f: np.array(e) for f, e in d["edges"].items()},
                                   d["intercept"])
        rep.main = {f: np.array(v, dtype=float) for f, v in d["main"].items()}
        rep.main_weights = {f: np.array(v, dtype=float) for f, v in d["main_weights"].items()}
        for p in d["pairs"]:
            key = tuple(p["features"])
            rep.pairs[key] = np.array(p["table"], dtype=float)
            rep.pair_weights[key] = np.array(p["weights"], dtype=float)
        rep.purified = bool(d["purified"])
        return rep
