"""Data pipeline: CSV ingestion, EDA summaries, quality checks, feature
screening and train/test preparation.

Conventions used throughout the package are fixed here once:

* quantiles are computed with linear interpolation between order statistics
  (numpy's default, the "type 7" rule);
* numeric missing values are carried as NaN plus an explicit mask; imputation
  happens only in :func:`prepare` (train-split median / dedicated "missing"
  category level);
* CSV files are RFC-4180 with a mandatory header, "." decimal separator and
  empty cells meaning missing.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import rankdata

from .errors import DataError
from .utils import child_rng

NUMERIC = "numeric"
CATEGORICAL = "categorical"
REGRESSION = "regression"
BINARY = "binary"

TRAIN = 0
TEST = 1

MISSING_LEVEL = "missing"


def quantile(values, q):
    """Type-7 quantile of a 1-D array (the package-wide rule)."""
    return np.quantile(np.asarray(values, dtype=float), q)


@dataclass
class Column:
    name: str
    kind: str  # NUMERIC | CATEGORICAL
    values: np.ndarray  # float64 (NaN where missing) or object (str)
    missing: np.ndarray  # bool mask

    def non_missing(self):
        return self.values[~self.missing]

    def copy(self) -> "Column":
        return Column(self.name, self.kind, self.values.copy(), self.missing.copy())

    def to_dict(self):
        if self.kind == NUMERIC:
            vals = [None if m else float(v) for v, m in zip(self.values, self.missing)]
        else:
            vals = [None if m else str(v) for v, m in zip(self.values, self.missing)]
        return {"name": self.name, "kind": self.kind, "values": vals}

    @staticmethod
    def from_dict(d) -> "Column":
        raw = d["values"]
        missing = np.array([v is None for v in raw], dtype=bool)
        if d["kind"] == NUMERIC:
            values = np.array([math.nan if v is None else float(v) for v in raw])
        else:
            values = np.array(["" if v is None else str(v) for v in raw], dtype=object)
        return Column(d["name"], d["kind"], values, missing)


@dataclass
class Dataset:
    name: str
    columns: list[Column]
    target: str
    task: str  # REGRESSION | BINARY
    split: np.ndarray = field(default=None)  # int8, TRAIN/TEST per row
    weights: np.ndarray | None = None
    prepared: bool = False

    def __post_init__(self):
        if not self.columns:
            raise DataError("dataset has no columns")
        n = len(self.columns[0].values)
        if n < 1:
            raise DataError("dataset has zero rows")
        for c in self.columns:
            if len(c.values) != n or len(c.missing) != n:
                raise DataError(f"column {c.name!r} row count differs from the rest")
        names = [c.name for c in self.columns]
        if len(set(names)) != len(names):
            raise DataError("duplicate column names")
        if self.target not in names:
            raise DataError(f"target column {self.target!r} not present")
        if self.split is None:
            self.split = np.zeros(n, dtype=np.int8)
        self._validate_target()

    def _validate_target(self):
        tcol = self.column(self.target)
        if tcol.kind != NUMERIC:
            raise DataError(f"target {self.target!r} must be numeric")
        if tcol.missing.any() or np.isnan(tcol.values.astype(float)).any():
            raise DataError(f"target {self.target!r} contains missing values")
        if self.task == BINARY:
            vals = np.unique(tcol.values)
            if not np.isin(vals, [0.0, 1.0]).all():
                bad = [v for v in vals if v not in (0.0, 1.0)]
                raise DataError(f"binary target contains values outside {{0,1}}: {bad[:5]}")
        elif self.task != REGRESSION:
            raise DataError(f"unknown task {self.task!r}")

    # -- accessors ----------------------------------------------------------

    @property
    def n_rows(self) -> int:
        return len(self.columns[0].values)

    def column(self, name: str) -> Column:
        for c in self.columns:
            if c.name == name:
                return c
        raise DataError(f"no column named {name!r}")

    @property
    def feature_names(self) -> list[str]:
        return [c.name for c in self.columns if c.name != self.target]

    @property
    def feature_columns(self) -> list[Column]:
        return [c for c in self.columns if c.name != self.target]

    @property
    def y(self) -> np.ndarray:
        return self.column(self.target).values.astype(float)

    def indices(self, split: int) -> np.ndarray:
        return np.flatnonzero(self.split == split)

    @property
    def train_indices(self) -> np.ndarray:
        return self.indices(TRAIN)

    @property
    def test_indices(self) -> np.ndarray:
        return self.indices(TEST)

    def row_block(self, indices=None) -> dict[str, np.ndarray]:
        """Feature columns as name -> values (copies), for model evaluation."""
        if indices is None:
            return {c.name: c.values.copy() for c in self.feature_columns}
        indices = np.asarray(indices)
        return {c.name: c.values[indices].copy() for c in self.feature_columns}

    def copy(self) -> "Dataset":
        return Dataset(
            name=self.name,
            columns=[c.copy() for c in self.columns],
            target=self.target,
            task=self.task,
            split=self.split.copy(),
            weights=None if self.weights is None else self.weights.copy(),
            prepared=self.prepared,
        )

    def row_weights(self) -> np.ndarray:
        if self.weights is None:
            return np.ones(self.n_rows)
        return self.weights.astype(float)

    # -- persistence --------------------------------------------------------

    def to_dict(self):
        return {
            "name": self.name,
            "target": self.target,
            "task": self.task,
            "columns": [c.to_dict() for c in self.columns],
            "split": self.split.astype(int).tolist(),
            "weights": None if self.weights is None else [float(w) for w in self.weights],
            "prepared": bool(self.prepared),
        }

    @staticmethod
    def from_dict(d) -> "Dataset":
        return Dataset(
            name=d["name"],
            columns=[Column.from_dict(c) for c in d["columns"]],
            target=d["target"],
            task=d["task"],
            split=np.array(d["split"], dtype=np.int8),
            weights=None if d.get("weights") is None else np.array(d["weights"], dtype=float),
            prepared=bool(d.get("prepared", False)),
        )


# ---------------------------------------------------------------------------
# Loading / saving
# ---------------------------------------------------------------------------


def _parse_numeric(cell: str):
    """Strict parse: finite decimal numbers only ("nan"/"inf" strings are text)."""
    try:
        v = float(cell)
    except ValueError:
        return None
    return v if math.isfinite(v) else None


def load_csv(path, target: str, task: str, name: str | None = None) -> Dataset:
    """Read a CSV file into a Dataset with inferred column kinds.

    A column is numeric when every non-missing cell parses as a finite
    number, else categorical.  Empty cells are flagged missing.  The split
    starts out all-train.
    """
    try:
        with open(path, "r", encoding="utf-8", newline="") as fh:
            reader = csv.reader(fh)
            try:
                header = next(reader)
            except StopIteration:
                raise DataError(f"{path}: empty file (header row required)")
            rows = [row for row in reader if row]
    except OSError as exc:
        raise DataError(f"cannot read {path}: {exc}") from exc
    header = [h.strip() for h in header]
    if target not in header:
        raise DataError(f"target column {target!r} not found in header {header}")
    if not rows:
        raise DataError(f"{path}: zero data rows")
    for i, row in enumerate(rows):
        if len(row) != len(header):
            raise DataError(f"{path}: row {i + 2} has {len(row)} cells, expected {len(header)}")

    columns = []
    for j, cname in enumerate(header):
        cells = [row[j] for row in rows]
        missing = np.array([cell == "" for cell in cells], dtype=bool)
        parsed = [None if m else _parse_numeric(cell) for cell, m in zip(cells, missing)]
        is_numeric = all(p is not None for p, m in zip(parsed, missing) if not m)
        if is_numeric:
            values = np.array(
                [math.nan if m else p for p, m in zip(parsed, missing)], dtype=float
            )
            columns.append(Column(cname, NUMERIC, values, missing))
        else:
            values = np.array(["" if m else cell for cell, m in zip(cells, missing)], dtype=object)
            columns.append(Column(cname, CATEGORICAL, values, missing))

    ds_name = name if name is not None else str(path)
    return Dataset(name=ds_name, columns=columns, target=target, task=task)


def save_csv(ds: Dataset, path) -> None:
    """Inverse of load_csv: floats written with round-trip repr, missing as empty."""
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow([c.name for c in ds.columns])
        for i in range(ds.n_rows):
            row = []
            for c in ds.columns:
                if c.missing[i]:
                    row.append("")
                elif c.kind == NUMERIC:
                    row.append(repr(float(c.values[i])))
                else:
                    row.append(str(c.values[i]))
            writer.writerow(row)


# ---------------------------------------------------------------------------
# Summaries
# ---------------------------------------------------------------------------


@dataclass
class EdaSummary:
    numeric: dict
    categorical: dict
    corr_columns: list[str]
    pearson: list[list]
    spearman: list[list]
    class_balance: dict | None

    def to_dict(self):
        return {
            "numeric": self.numeric,
            "categorical": self.categorical,
            "correlation": {
                "columns": self.corr_columns,
                "pearson": self.pearson,
                "spearman": self.spearman,
            },
            "class_balance": self.class_balance,
        }


def _pearson(a: np.ndarray, b: np.ndarray):
    """Pearson r over two complete vectors, or None when undefined."""
    if len(a) < 2:
        return None
    a = a - a.mean()
    b = b - b.mean()
    va = (a * a).sum()
    vb = (b * b).sum()
    if va <= 0.0 or vb <= 0.0:
        return None
    return float((a * b).sum() / math.sqrt(va * vb))


def _pairwise_corr(cols: list[Column], method: str):
    k = len(cols)
    out = [[None] * k for _ in range(k)]
    for i in range(k):
        for j in range(i, k):
            both = ~(cols[i].missing | cols[j].missing)
            a = cols[i].values[both].astype(float)
            b = cols[j].values[both].astype(float)
            if method == "spearman" and len(a) >= 2:
                a = rankdata(a)  # average ranks on ties
                b = rankdata(b)
            r = _pearson(a, b)
            out[i][j] = r
            out[j][i] = r
    return out


def summarize(ds: Dataset) -> EdaSummary:
    """Deterministic EDA summary; correlations are pairwise-complete."""
    numeric = {}
    categorical = {}
    for c in ds.columns:
        if c.kind == NUMERIC:
            v = c.values[~c.missing]
            if len(v) == 0:
                numeric[c.name] = {"count": 0}
                continue
            sd = float(np.std(v, ddof=1)) if len(v) >= 2 else 0.0
            hist_counts, hist_edges = np.histogram(v, bins=20)
            numeric[c.name] = {
                "count": int(len(v)),
                "mean": float(v.mean()),
                "sd": sd,
                "min": float(v.min()),
                "q1": float(quantile(v, 0.25)),
                "median": float(quantile(v, 0.5)),
                "q3": float(quantile(v, 0.75)),
                "max": float(v.max()),
                "histogram": {
                    "edges": [float(e) for e in hist_edges],
                    "counts": [int(x) for x in hist_counts],
                },
            }
        else:
            v = c.values[~c.missing]
            levels, counts = np.unique(v.astype(str), return_counts=True)
            categorical[c.name] = {
                "count": int(len(v)),
                "frequencies": {str(l): int(n) for l, n in zip(levels, counts)},
            }
    num_cols = [c for c in ds.columns if c.kind == NUMERIC]
    pearson = _pairwise_corr(num_cols, "pearson")
    spearman = _pairwise_corr(num_cols, "spearman")
    balance = None
    if ds.task == BINARY:
        y = ds.y
        balance = {"0": float((y == 0).mean()), "1": float((y == 1).mean())}
    return EdaSummary(
        numeric=numeric,
        categorical=categorical,
        corr_columns=[c.name for c in num_cols],
        pearson=pearson,
        spearman=spearman,
        class_balance=balance,
    )


@dataclass
class DataQualityReport:
    missing_counts: dict
    constant_columns: list[str]
    duplicate_rows: int
    outlier_counts: dict

    def to_dict(self):
        return {
            "missing_counts": self.missing_counts,
            "constant_columns": self.constant_columns,
            "duplicate_rows": self.duplicate_rows,
            "outlier_counts": self.outlier_counts,
        }


def data_quality(ds: Dataset) -> DataQualityReport:
    missing = {c.name: int(c.missing.sum()) for c in ds.columns}
    constant = []
    for c in ds.columns:
        v = c.non_missing()
        if len(v) == 0 or len(np.unique(v.astype(str) if c.kind == CATEGORICAL else v)) <= 1:
            constant.append(c.name)

    # duplicate rows: missing cells compare equal to each other
    seen = {}
    dup = 0
    for i in range(ds.n_rows):
        key = tuple(
            ("?",) if c.missing[i] else (c.values[i],) for c in ds.columns
        )
        if key in seen:
            dup += 1
        else:
            seen[key] = i

    outliers = {}
    for c in ds.columns:
        if c.kind != NUMERIC:
            continue
        v = c.non_missing()
        if len(v) == 0:
            outliers[c.name] = 0
            continue
        q1 = quantile(v, 0.25)
        q3 = quantile(v, 0.75)
        iqr = q3 - q1
        lo, hi = q1 - 1.5 * iqr, q3 + 1.5 * iqr
        outliers[c.name] = int(((v < lo) | (v > hi)).sum())
    return DataQualityReport(missing, constant, dup, outliers)


# ---------------------------------------------------------------------------
# Feature screening
# ---------------------------------------------------------------------------


@dataclass
class FeatureRanking:
    ranking: list[tuple[str, float]]
    truncated: bool

    def to_dict(self):
        return {
            "ranking": [{"feature": f, "score": s} for f, s in self.ranking],
            "truncated": self.truncated,
        }


def _eta(levels: np.ndarray, y: np.ndarray) -> float:
    """Correlation ratio between a categorical feature and a numeric target."""
    ybar = y.mean()
    ss_total = ((y - ybar) ** 2).sum()
    if ss_total <= 0.0:
        return 0.0
    ss_between = 0.0
    for lev in np.unique(levels.astype(str)):
        grp = y[levels.astype(str) == lev]
        ss_between += len(grp) * (grp.mean() - ybar) ** 2
    return float(math.sqrt(ss_between / ss_total))


def feature_select(ds: Dataset, top_k: int) -> FeatureRanking:
    """Rank features by |Pearson r| (numeric) or correlation ratio (categorical).

    Descending score, ties kept in column order.  top_k beyond the feature
    count truncates and sets the warning flag.
    """
    feats = ds.feature_columns
    if not feats:
        raise DataError("no feature columns to rank")
    if top_k < 1:
        raise DataError("top_k must be >= 1")
    y = ds.y
    scores = []
    for c in feats:
        ok = ~c.missing
        if c.kind == NUMERIC:
            r = _pearson(c.values[ok].astype(float), y[ok])
            scores.append(abs(r) if r is not None else 0.0)
        else:
            scores.append(_eta(c.values[ok], y[ok]) if ok.sum() >= 1 else 0.0)
    order = sorted(range(len(feats)), key=lambda i: (-scores[i], i))
    truncated = top_k > len(feats)
    k = min(top_k, len(feats))
    ranking = [(feats[i].name, float(scores[i])) for i in order[:k]]
    return FeatureRanking(ranking=ranking, truncated=truncated)


# ---------------------------------------------------------------------------
# Preparation (split + imputation)
# ---------------------------------------------------------------------------


def _round_half_up(x: float) -> int:
    return int(math.floor(x + 0.5))


def prepare(ds: Dataset, test_ratio: float, seed: int) -> Dataset:
    """Split into train/test and impute missing values; pure given inputs.

    Test size is round(ratio * n).  Binary tasks are stratified by class with
    largest-remainder allocation, keeping every class within one row of its
    exact quota.  Numeric missing cells become the train-split median of the
    column; categorical missing cells become the dedicated "missing" level.
    """
    n = ds.n_rows
    if n < 5:
        raise DataError(f"need at least 5 rows to prepare, got {n}")
    if not (0.0 < test_ratio < 1.0):
        raise DataError(f"test_ratio must be in (0,1), got {test_ratio}")
    n_test = _round_half_up(test_ratio * n)
    if n_test < 1 or n_test >= n:
        raise DataError(f"test_ratio {test_ratio} leaves an empty partition (n={n})")

    rng = child_rng(seed, "prepare")
    out = ds.copy()
    split = np.zeros(n, dtype=np.int8)
    if ds.task == BINARY:
        y = ds.y
        classes = [0.0, 1.0]
        quotas = [test_ratio * int((y == c).sum()) for c in classes]
        base = [int(math.floor(q)) for q in quotas]
        leftover = n_test - sum(base)
        frac_order = sorted(range(len(classes)), key=lambda i: (-(quotas[i] - base[i]), i))
        take = list(base)
        for i in frac_order:
            if leftover <= 0:
                break
            if take[i] < int((y == classes[i]).sum()):
                take[i] += 1
                leftover -= 1
        for c, k in zip(classes, take):
            idx = np.flatnonzero(y == c)
            perm = rng.permutation(len(idx))
            split[idx[perm[:k]]] = TEST
    else:
        perm = rng.permutation(n)
        split[perm[:n_test]] = TEST
    out.split = split

    train_mask = split == TRAIN
    for c in out.columns:
        if c.name == out.target or not c.missing.any():
            c.missing[:] = False
            continue
        if c.kind == NUMERIC:
            train_vals = c.values[train_mask & ~c.missing]
            fill = float(np.median(train_vals)) if len(train_vals) else 0.0
            c.values[c.missing] = fill
        else:
            c.values[c.missing] = MISSING_LEVEL
        c.missing[:] = False
    out.prepared = True
    return out
