import numpy as np
import pytest

from glassbench.data import (BINARY, CATEGORICAL, NUMERIC, REGRESSION, Column,
                             Dataset, prepare)


def build_dataset(columns, target, task, name="fixture"):
    """Assemble a Dataset from {name: (kind, values)} specs, no missing cells."""
    cols = []
    for cname, (kind, values) in columns.items():
        if kind == NUMERIC:
            arr = np.asarray(values, dtype=float)
        else:
            arr = np.asarray([str(v) for v in values], dtype=object)
        cols.append(Column(cname, kind, arr, np.zeros(len(arr), dtype=bool)))
    return Dataset(name=name, columns=cols, target=target, task=task)


def regression_dataset(n=400, seed=0, noise=0.1, categorical=False, name="reg"):
    rng = np.random.default_rng(seed)
    x1 = rng.normal(size=n)
    x2 = rng.normal(size=n)
    x3 = rng.uniform(-2.0, 2.0, size=n)
    y = x1 * x2 + np.sin(x3) + noise * rng.normal(size=n)
    cols = {"x1": (NUMERIC, x1), "x2": (NUMERIC, x2), "x3": (NUMERIC, x3)}
    if categorical:
        cat = rng.choice(["a", "b", "c"], size=n)
        y = y + 0.5 * (cat == "a")
        cols["cat"] = (CATEGORICAL, cat)
    cols["y"] = (NUMERIC, y)
    ds = build_dataset(cols, "y", REGRESSION, name=name)
    return prepare(ds, 0.25, seed)


def linear_dataset(n=500, seed=0, beta=(2.0, -1.0, 0.0), noise=0.1, name="lin"):
    rng = np.random.default_rng(seed)
    X = rng.normal(size=(n, len(beta)))
    y = X @ np.asarray(beta) + noise * rng.normal(size=n)
    cols = {f"x{j + 1}": (NUMERIC, X[:, j]) for j in range(len(beta))}
    cols["y"] = (NUMERIC, y)
    ds = build_dataset(cols, "y", REGRESSION, name=name)
    return prepare(ds, 0.3, seed)


def binary_dataset(n=600, seed=0, categorical=False, name="bin"):
    rng = np.random.default_rng(seed)
    x1 = rng.normal(size=n)
    x2 = rng.normal(size=n)
    logit = 1.2 * x1 - 0.8 * x2
    cols = {"x1": (NUMERIC, x1), "x2": (NUMERIC, x2)}
    if categorical:
        cat = rng.choice(["u", "v"], size=n)
        logit = logit + 0.7 * (cat == "u")
        cols["cat"] = (CATEGORICAL, cat)
    p = 1.0 / (1.0 + np.exp(-logit))
    y = (rng.uniform(size=n) < p).astype(float)
    cols["y"] = (NUMERIC, y)
    ds = build_dataset(cols, "y", BINARY, name=name)
    return prepare(ds, 0.25, seed)


def write_csv(path, header, rows):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


@pytest.fixture
def reg_ds():
    return regression_dataset()


@pytest.fixture
def bin_ds():
    return binary_dataset()


@pytest.fixture
def lin_ds():
    return linear_dataset()
