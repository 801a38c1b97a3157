import numpy as np
import pytest

from conftest import build_dataset, linear_dataset
from glassbench.data import CATEGORICAL, NUMERIC, REGRESSION, prepare
from glassbench.errors import CapabilityError, ConfigError, DataError
from glassbench.explain import (ale, lime_explain, model_explain, pdp, pfi,
                                shap_explain)
from glassbench.models import ModelSpec, train
from glassbench.models.registered import register
from oracles import exact_shap


BETA = (2.0, -1.0, 0.0)


def _linear_model():
    def fn(block):
        return (BETA[0] * np.asarray(block["x1"], dtype=float)
                + BETA[1] * np.asarray(block["x2"], dtype=float)
                + BETA[2] * np.asarray(block["x3"], dtype=float))
    return register("lin", "regression", predict_fn=fn,
                    feature_names=["x1", "x2", "x3"])


def test_pfi_zero_for_ignored_feature(lin_ds):
    model = _linear_model()
    out = pfi(model, lin_ds, repeats=4, seed=0)
    by = {f["feature"]: f for f in out["features"]}
    assert by["x3"]["mean"] == 0.0
    assert all(v == 0.0 for v in by["x3"]["values"])
    assert by["x1"]["mean"] > 0.0 and by["x2"]["mean"] > 0.0
    # shuffling the strongest feature hurts most
    assert by["x1"]["mean"] > by["x2"]["mean"]


def test_pfi_deterministic(lin_ds):
    model = _linear_model()
    a = pfi(model, lin_ds, repeats=3, seed=5)
    b = pfi(model, lin_ds, repeats=3, seed=5)
    assert a == b
    c = pfi(model, lin_ds, repeats=3, seed=6)
    assert a != c


def test_pdp_linear_matches_brute_force(lin_ds):
    model = _linear_model()
    out = pdp(model, lin_ds, "x1", grid=7)
    te = lin_ds.test_indices
    block = lin_ds.row_block(te)
    for g, v in zip(out["grid"], out["value"]):
        b = dict(block)
        b["x1"] = np.full(len(te), g)
        assert v == pytest.approx(float(np.mean(model.predict(b))), abs=1e-12)
    # linear model: pdp slope equals the coefficient
    g = np.array(out["grid"])
    vals = np.array(out["value"])
    slopes = np.diff(vals) / np.diff(g)
    np.testing.assert_allclose(slopes, BETA[0], atol=1e-10)


def test_pdp_two_features(lin_ds):
    model = _linear_model()
    out = pdp(model, lin_ds, ["x1", "x2"], grid=4)
    assert out["features"] == ["x1", "x2"]
    m = np.array(out["value"])
    assert m.shape == (len(out["grid_a"]), len(out["grid_b"]))
    te = lin_ds.test_indices
    block = lin_ds.row_block(te)
    b = dict(block)
    b["x1"] = np.full(len(te), out["grid_a"][0])
    b["x2"] = np.full(len(te), out["grid_b"][-1])
    assert m[0, -1] == pytest.approx(float(np.mean(model.predict(b))), abs=1e-12)


def test_pdp_categorical_levels():
    rng = np.random.default_rng(3)
    n = 300
    x = rng.normal(size=n)
    c = rng.choice(["u", "v"], size=n)
    y = x + (c == "u") * 1.0
    ds = build_dataset({"x": (NUMERIC, x), "c": (CATEGORICAL, c),
                        "y": (NUMERIC, y)}, "y", REGRESSION)
    ds = prepare(ds, 0.25, seed=3)
    model = train(ds, ModelSpec("xgb1", params={"rounds": 80}))
    out = pdp(model, ds, "c")
    assert out["feature_kind"] == CATEGORICAL
    assert out["grid"] == ["u", "v"]
    got = dict(zip(out["grid"], out["value"]))
    assert got["u"] - got["v"] == pytest.approx(1.0, abs=0.2)


def test_pdp_argument_errors(lin_ds):
    model = _linear_model()
    with pytest.raises(DataError):
        pdp(model, lin_ds, ["x1", "x2", "x3"])
    with pytest.raises(DataError):
        pdp(model, lin_ds, "x1", grid=1)


def test_ale_linear_slope(lin_ds):
    model = _linear_model()
    out = ale(model, lin_ds, "x1", bins=8)
    edges = np.array(out["edges"])
    vals = np.array(out["value"])
    counts = np.array(out["count"])
    assert counts.sum() == len(lin_ds.test_indices)
    # weighted center is zero
    assert float((vals * counts).sum() / counts.sum()) == pytest.approx(0.0, abs=1e-10)
    # accumulated effect of a linear model increases by beta * bin width
    diffs = np.diff(vals)
    widths = np.diff(edges[1:])
    np.testing.assert_allclose(diffs / widths, BETA[0], atol=1e-10)


def test_ale_errors(lin_ds):
    model = _linear_model()
    with pytest.raises(DataError):
        ale(model, lin_ds, "x1", bins=0)
    const = build_dataset(
        {"x1": (NUMERIC, np.zeros(40)), "x2": (NUMERIC, np.arange(40.0)),
         "x3": (NUMERIC, np.arange(40.0)), "y": (NUMERIC, np.arange(40.0))},
        "y", REGRESSION)
    const = prepare(const, 0.25, seed=0)
    with pytest.raises(DataError, match="constant"):
        ale(model, const, "x1")


def test_lime_recovers_linear_coefficients(lin_ds):
    model = _linear_model()
    inst = {"x1": 0.2, "x2": -0.4, "x3": 0.1}
    out = lime_explain(model, lin_ds, inst, samples=4000, seed=0)
    assert out["r2"] > 0.999
    tr = lin_ds.train_indices
    for entry in out["features"]:
        f = entry["feature"]
        sd = lin_ds.column(f).values[tr].astype(float).std()
        want = BETA[int(f[1]) - 1] * sd      # standardized design: beta per sd
        assert entry["coefficient"] == pytest.approx(want, rel=0.05, abs=0.02)


def test_lime_deterministic(lin_ds):
    model = _linear_model()
    inst = {"x1": 0.0, "x2": 0.0, "x3": 0.0}
    a = lime_explain(model, lin_ds, inst, samples=200, seed=2)
    b = lime_explain(model, lin_ds, inst, samples=200, seed=2)
    assert a == b
    with pytest.raises(DataError):
        lime_explain(model, lin_ds, inst, samples=5)


def test_shap_linear_closed_form(lin_ds):
    model = _linear_model()
    inst = {"x1": 1.0, "x2": 0.5, "x3": -2.0}
    out = shap_explain(model, lin_ds, inst, background=50, seed=1)
    assert out["mode"] == "exact"
    # efficiency
    total = out["base"] + sum(v["value"] for v in out["values"])
    assert total == pytest.approx(out["prediction"], abs=1e-10)
    # additive model: phi_j = beta_j * (x_j - background mean of x_j)
    from glassbench.explain import _background_block
    bg_block, _b = _background_block(model, lin_ds, 50, 1)
    by = {v["feature"]: v["value"] for v in out["values"]}
    for j, f in enumerate(("x1", "x2", "x3")):
        want = BETA[j] * (inst[f] - float(np.mean(bg_block[f])))
        assert by[f] == pytest.approx(want, abs=1e-10)
    assert by["x3"] == 0.0


def test_shap_matches_enumeration_oracle():
    rng = np.random.default_rng(7)
    n = 200
    cols = {f"x{j}": (NUMERIC, rng.normal(size=n)) for j in range(1, 5)}
    x1, x2, x3, x4 = (cols[f"x{j}"][1] for j in range(1, 5))
    y = x1 * x2 + np.sin(x3) + 0.3 * x4
    cols["y"] = (NUMERIC, y)
    ds = prepare(build_dataset(cols, "y", REGRESSION), 0.25, seed=7)
    model = train(ds, ModelSpec("xgb2", params={"rounds": 60}))
    inst = {f: ds.column(f).values[0] for f in ds.feature_names}
    out = shap_explain(model, ds, inst, background=40, seed=3)

    # rebuild the identical background rows the engine chose
    from glassbench.explain import _background_block
    bg_block, _b = _background_block(model, ds, 40, 3)
    base, phi = exact_shap(model.predict, bg_block, inst, ds.feature_names)
    assert out["base"] == pytest.approx(base, abs=1e-10)
    got = np.array([v["value"] for v in out["values"]])
    np.testing.assert_allclose(got, phi, atol=1e-10)


def test_dispatcher_routing_and_errors(lin_ds):
    model = _linear_model()
    out = model_explain(model, lin_ds, "pdp", {"features": ["x1"], "grid": 5})
    assert out["kind"] == "pdp"
    out = model_explain(model, lin_ds, "shap", {"row": 2, "background": 20})
    assert out["kind"] == "shap"
    with pytest.raises(ConfigError) as err:
        model_explain(model, lin_ds, "nope", {})
    assert err.value.key_path == "method"
    with pytest.raises(ConfigError) as err:
        model_explain(model, lin_ds, "pfi", {"bogus": 1})
    assert err.value.key_path == "config.bogus"
    with pytest.raises(ConfigError) as err:
        model_explain(model, lin_ds, "pdp", {})
    assert err.value.key_path == "config.features"
    with pytest.raises(ConfigError) as err:
        model_explain(model, lin_ds, "ale", {})
    assert err.value.key_path == "config.feature"
    with pytest.raises(DataError):
        model_explain(model, lin_ds, "shap", {"row": 10_000})


def test_explainers_require_evaluable(lin_ds):
    table = register("t", "regression", scores=np.zeros(lin_ds.n_rows),
                     dataset=lin_ds)
    for call in (lambda: pfi(table, lin_ds),
                 lambda: pdp(table, lin_ds, "x1"),
                 lambda: ale(table, lin_ds, "x1"),
                 lambda: lime_explain(table, lin_ds, {"x1": 0}, samples=50),
                 lambda: shap_explain(table, lin_ds, {"x1": 0})):
        with pytest.raises(CapabilityError):
            call()
