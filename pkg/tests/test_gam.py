import numpy as np
import pytest

from conftest import binary_dataset, build_dataset
from glassbench.data import CATEGORICAL, NUMERIC, REGRESSION, prepare
from glassbench.metrics import metric_set
from glassbench.models import ModelSpec, model_from_dict, model_to_dict
from glassbench.models.gam import SMOOTHNESS_GRID, train_gam


def _smooth_ds(n=700, seed=0, noise=0.05):
    rng = np.random.default_rng(seed)
    x1 = rng.uniform(-3, 3, size=n)
    x2 = rng.normal(size=n)
    y = np.sin(x1) + 0.5 * x2 + noise * rng.normal(size=n)
    ds = build_dataset({"x1": (NUMERIC, x1), "x2": (NUMERIC, x2),
                        "y": (NUMERIC, y)}, "y", REGRESSION)
    return prepare(ds, 0.25, seed=seed)


def test_recovers_smooth_additive_signal():
    ds = _smooth_ds()
    model = train_gam(ds, ModelSpec("gam"))
    pred = model.predict_dataset(ds, ds.test_indices)
    m = metric_set("regression", ds.y[ds.test_indices], pred)
    assert m["R2"] > 0.95


def test_fixed_smoothness_respected():
    ds = _smooth_ds(n=300)
    model = train_gam(ds, ModelSpec("gam", params={"smoothness": 0.5}))
    assert model.config["smoothness"] == 0.5
    assert model.config["smoothness_selected"] is False


def test_smoothness_selected_from_grid():
    ds = _smooth_ds(n=400, seed=1)
    model = train_gam(ds, ModelSpec("gam"))
    assert model.config["smoothness_selected"] is True
    assert model.config["smoothness"] in SMOOTHNESS_GRID


def test_heavier_smoothness_flattens_shape():
    ds = _smooth_ds(n=500, seed=2)
    rough = train_gam(ds, ModelSpec("gam", params={"smoothness": 1e-3}))
    flat = train_gam(ds, ModelSpec("gam", params={"smoothness": 1e6}))
    assert sum(flat.roughness.values()) < sum(rough.roughness.values())


def test_shape_function_grid():
    ds = _smooth_ds(n=400, seed=3)
    model = train_gam(ds, ModelSpec("gam"))
    sf = model.shape_function("x1", n_points=50)
    assert sf["kind"] == NUMERIC
    assert len(sf["grid"]) == 50 and len(sf["values"]) == 50
    # shape tracks sin up to the additive constant
    g = np.array(sf["grid"])
    v = np.array(sf["values"])
    target = np.sin(g)
    assert np.corrcoef(v, target)[0, 1] > 0.99
    missing = model.shape_function("nope")
    assert missing["grid"] == [] and missing["values"] == []


def test_categorical_terms():
    rng = np.random.default_rng(4)
    n = 500
    x = rng.normal(size=n)
    cat = rng.choice(["a", "b", "c"], size=n)
    bump = np.where(cat == "a", 1.0, np.where(cat == "b", -1.0, 0.0))
    y = x + bump + 0.05 * rng.normal(size=n)
    ds = build_dataset({"x": (NUMERIC, x), "cat": (CATEGORICAL, cat),
                        "y": (NUMERIC, y)}, "y", REGRESSION)
    ds = prepare(ds, 0.25, seed=4)
    model = train_gam(ds, ModelSpec("gam"))
    sf = model.shape_function("cat")
    assert sf["kind"] == CATEGORICAL
    offsets = dict(zip(sf["grid"], sf["values"]))
    assert offsets["a"] - offsets["b"] == pytest.approx(2.0, abs=0.15)
    pred = model.predict_dataset(ds, ds.test_indices)
    m = metric_set("regression", ds.y[ds.test_indices], pred)
    assert m["R2"] > 0.95


def test_binary_probabilities():
    ds = binary_dataset(n=800, seed=5)
    model = train_gam(ds, ModelSpec("gam"))
    p = model.predict_dataset(ds, ds.test_indices)
    assert ((p > 0) & (p < 1)).all()
    assert metric_set("binary", ds.y[ds.test_indices], p)["AUC"] > 0.72


def test_determinism_and_roundtrip():
    ds = _smooth_ds(n=300, seed=6)
    a = train_gam(ds, ModelSpec("gam"))
    b = train_gam(ds, ModelSpec("gam"))
    block = ds.row_block(ds.test_indices)
    np.testing.assert_array_equal(a.predict(block), b.predict(block))
    back = model_from_dict(model_to_dict(a))
    np.testing.assert_allclose(back.predict(block), a.predict(block), atol=1e-15)


def test_tiny_dataset_skips_selection():
    ds = _smooth_ds(n=7, seed=7)
    model = train_gam(ds, ModelSpec("gam", params={"knots": 3}))
    assert model.config["smoothness_selected"] is False
    assert model.config["smoothness"] == 1.0
