import numpy as np
import pytest

from conftest import binary_dataset, build_dataset, regression_dataset
from glassbench.data import NUMERIC, REGRESSION, prepare
from glassbench.errors import DataError
from glassbench.metrics import metric_set
from glassbench.models import ModelSpec, model_from_dict, model_to_dict, purify
from glassbench.models.boosting import (_tree_margin, train_xgb1, train_xgb2)
from glassbench.models.effects import EffectRepresentation
from oracles import weighted_marginal_maxima


def _pair_tables(rep):
    tables = [p["table"] for p in rep.pairs.values()] if isinstance(rep.pairs, dict) else []
    return tables


def test_effect_representation_margin_arithmetic():
    edges = {"a": np.array([0.0, 1.0, 2.0]), "b": np.array([0.0, 1.0, 2.0])}
    rep = EffectRepresentation(["a", "b"], edges, intercept=1.5)
    rep.main["a"][:] = [0.1, -0.1]
    rep.main["b"][:] = [0.2, -0.2]
    key = rep.ensure_pair("a", "b")
    rep.pairs[key][:] = [[0.01, 0.02], [0.03, 0.04]]
    codes = np.array([[0, 1], [1, 0]], dtype=np.int32)
    got = rep.margin_from_codes(codes)
    want = np.array([1.5 + 0.1 - 0.2 + 0.02, 1.5 - 0.1 + 0.2 + 0.03])
    np.testing.assert_allclose(got, want, atol=1e-15)


def test_additivity_rep_equals_summed_trees():
    ds = regression_dataset(n=600, seed=0)
    model = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 80}))
    codes = model._codes_train
    total = np.full(codes.shape[0], model._margin_base)
    for tree in model._trees:
        total += model._lr * _tree_margin(codes, tree)
    rep_margin = model.rep.margin_from_codes(codes)
    np.testing.assert_allclose(rep_margin, total, atol=1e-10)


def test_xgb1_fits_additive_signal():
    rng = np.random.default_rng(1)
    n = 800
    x1 = rng.normal(size=n)
    x2 = rng.uniform(-2, 2, size=n)
    y = 2.0 * x1 + np.sin(3 * x2) + 0.05 * rng.normal(size=n)
    ds = build_dataset({"x1": (NUMERIC, x1), "x2": (NUMERIC, x2),
                        "y": (NUMERIC, y)}, "y", REGRESSION)
    ds = prepare(ds, 0.25, seed=1)
    model = train_xgb1(ds, ModelSpec("xgb1", params={"rounds": 300}))
    pred = model.predict_dataset(ds, ds.test_indices)
    m = metric_set("regression", ds.y[ds.test_indices], pred)
    assert m["R2"] > 0.9
    assert not model.rep.pairs      # depth-1 trees touch one feature each


def test_xgb2_captures_interaction():
    ds = regression_dataset(n=1200, seed=2, noise=0.05)
    m2 = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 200}))
    m1 = train_xgb1(ds, ModelSpec("xgb1", params={"rounds": 200}))
    y_te = ds.y[ds.test_indices]
    mse2 = metric_set("regression", y_te, m2.predict_dataset(ds, ds.test_indices))["MSE"]
    mse1 = metric_set("regression", y_te, m1.predict_dataset(ds, ds.test_indices))["MSE"]
    assert mse2 < mse1 * 0.6       # x1*x2 needs the pair terms
    assert len(m2.rep.pairs) >= 1


def test_early_stopping_keeps_best_round():
    ds = regression_dataset(n=500, seed=3, noise=0.5)
    model = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 400}))
    assert 1 <= model.best_rounds <= 400
    assert len(model.val_history) >= model.best_rounds
    best = min(model.val_history)
    assert model.val_history[model.best_rounds - 1] == pytest.approx(best, abs=1e-12)


def test_determinism():
    ds = regression_dataset(n=400, seed=4)
    a = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 50}))
    b = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 50}))
    block = ds.row_block(ds.test_indices)
    np.testing.assert_array_equal(a.predict(block), b.predict(block))


def test_purify_preserves_predictions_and_centers_marginals():
    ds = regression_dataset(n=900, seed=5)
    model = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 120}))
    pure = purify(model)
    tr = ds.train_indices
    block = ds.row_block(tr)
    before = model.predict(block)
    after = pure.predict(block)
    assert np.abs(after - before).max() <= 1e-10

    rep = pure.rep
    tables = [rep.pairs[k] for k in rep.pairs]
    weights = [rep.pair_weights[k] for k in rep.pairs]
    assert weighted_marginal_maxima(tables, weights) <= 1e-8
    # mains centered to zero weighted mean as well
    for f in rep.feature_names:
        w = rep.main_weights[f]
        if w.sum() > 0:
            assert abs(float((rep.main[f] * w).sum() / w.sum())) <= 1e-8
    assert pure.purify_sweeps >= 1
    assert model.rep.purified is False       # original untouched


def test_purify_non_boosted_rejected():
    ds = regression_dataset(n=200, seed=6)
    from glassbench.models.glm import train_glm
    glm = train_glm(ds, ModelSpec("glm"))
    with pytest.raises(DataError):
        purify(glm)


def test_binary_boosting_probabilities():
    ds = binary_dataset(n=900, seed=7)
    model = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 100}))
    p = model.predict_dataset(ds, ds.test_indices)
    assert ((p > 0) & (p < 1)).all()
    m = metric_set("binary", ds.y[ds.test_indices], p)
    assert m["AUC"] > 0.72        # Bayes limit for this fixture is ~0.766


def test_tiny_dataset_trains_without_validation():
    ds = regression_dataset(n=14, seed=8)     # 10 train rows: val split collapses
    model = train_xgb1(ds, ModelSpec("xgb1", params={"rounds": 10}))
    assert model.val_history == []
    assert model.best_rounds >= 1


def test_roundtrip_preserves_predictions():
    ds = regression_dataset(n=400, seed=9, categorical=True)
    model = purify(train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 60})))
    back = model_from_dict(model_to_dict(model))
    block = ds.row_block(ds.test_indices)
    np.testing.assert_allclose(back.predict(block), model.predict(block),
                               atol=1e-15)
    assert back.purify_sweeps == model.purify_sweeps


def test_effects_serialization_roundtrip():
    ds = regression_dataset(n=300, seed=10)
    model = train_xgb2(ds, ModelSpec("xgb2", params={"rounds": 40}))
    rep = model.rep
    back = EffectRepresentation.from_dict(rep.to_dict())
    codes = model._codes_train
    np.testing.assert_allclose(back.margin_from_codes(codes),
                               rep.margin_from_codes(codes), atol=1e-15)


def test_pair_weight_guard():
    edges = {"a": np.array([0.0, 1.0, 2.0]), "b": np.array([0.0, 1.0, 2.0])}
    rep = EffectRepresentation(["a", "b"], edges)
    key = rep.ensure_pair("a", "b")
    rep.pairs[key][:] = [[1.0, -1.0], [0.5, 0.0]]
    with pytest.raises(DataError):
        rep.purify()    # no weights assigned: zero mass
