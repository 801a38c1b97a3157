import numpy as np
import pytest

from conftest import binary_dataset, build_dataset, linear_dataset
from glassbench.data import NUMERIC, REGRESSION, prepare
from glassbench.errors import ConfigError
from glassbench.models import ModelSpec, train
from glassbench.models.glm import train_glm
from oracles import kkt_residual


def _encoded_train(model, ds):
    tr = ds.train_indices
    X = model.encoder.encode(ds.row_block(tr))
    return X, ds.y[tr]


def test_recovers_linear_coefficients():
    ds = linear_dataset(n=800, seed=1, beta=(2.0, -1.0, 0.0), noise=0.05)
    model = train_glm(ds, ModelSpec("glm", params={"alpha": 1e-6}))
    np.testing.assert_allclose(model.coefficients, [2.0, -1.0, 0.0], atol=0.02)


def test_objective_path_is_monotone():
    ds = linear_dataset(n=400, seed=2)
    model = train_glm(ds, ModelSpec("glm", params={"alpha": 0.05, "l1_ratio": 1.0}))
    path = np.array(model.objective_path)
    assert len(path) >= 1
    assert (np.diff(path) <= 1e-12).all()


def test_kkt_residual_reported_and_independent():
    ds = linear_dataset(n=500, seed=3)
    alpha, l1_ratio = 0.02, 0.5
    model = train_glm(ds, ModelSpec("glm", params={"alpha": alpha,
                                                  "l1_ratio": l1_ratio}))
    assert model.kkt_residual <= 1e-6
    # rebuild the standardized problem and check the subgradient conditions
    X, y = _encoded_train(model, ds)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Xs = (X - mu) / np.where(sd > 0, sd, 1.0)
    yc = y - y.mean()
    w_std = model.coefficients * np.where(sd > 0, sd, 1.0)
    res = kkt_residual(Xs, yc, w_std, 0.0, alpha * l1_ratio,
                       alpha * (1 - l1_ratio))
    assert res <= 1e-6


def test_alpha_above_threshold_gives_exact_zeros():
    ds = linear_dataset(n=300, seed=4)
    X, y = None, None
    probe = train_glm(ds, ModelSpec("glm", params={"alpha": 1e-6}))
    X, y = _encoded_train(probe, ds)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Xs = (X - mu) / np.where(sd > 0, sd, 1.0)
    yc = y - y.mean()
    alpha_max = float(np.abs(Xs.T @ yc).max() / len(y))
    model = train_glm(ds, ModelSpec("glm", params={"alpha": alpha_max * 1.001,
                                                  "l1_ratio": 1.0}))
    assert np.abs(model.coefficients).max() == 0.0
    assert model.intercept == pytest.approx(y.mean(), abs=1e-12)


def test_pure_ridge_matches_normal_equations():
    ds = linear_dataset(n=400, seed=5, noise=0.2)
    alpha = 0.1
    model = train_glm(ds, ModelSpec("glm", params={"alpha": alpha,
                                                  "l1_ratio": 0.0}))
    X, y = _encoded_train(model, ds)
    mu = X.mean(axis=0)
    sd = X.std(axis=0)
    Xs = (X - mu) / sd
    yc = y - y.mean()
    n = len(y)
    w = np.linalg.solve(Xs.T @ Xs / n + alpha * np.eye(X.shape[1]), Xs.T @ yc / n)
    np.testing.assert_allclose(model.coefficients, w / sd, atol=1e-7)


def test_constant_feature_gets_zero_coefficient():
    ds = build_dataset({
        "x1": (NUMERIC, np.arange(20.0)),
        "flat": (NUMERIC, np.full(20, 3.0)),
        "y": (NUMERIC, 2 * np.arange(20.0) + 1),
    }, "y", REGRESSION)
    ds = prepare(ds, 0.2, seed=0)
    model = train_glm(ds, ModelSpec("glm", params={"alpha": 1e-8}))
    j = model.feature_names.index("flat")
    assert model.coefficients[j] == 0.0


def test_binary_glm_probabilities_and_margin():
    ds = binary_dataset(n=800, seed=6)
    model = train_glm(ds, ModelSpec("glm", params={"alpha": 1e-4}))
    block = ds.row_block(ds.test_indices)
    p = model.predict(block)
    z = model.predict_margin(block)
    assert ((p > 0) & (p < 1)).all()
    np.testing.assert_allclose(p, 1 / (1 + np.exp(-z)), atol=1e-12)
    # the fixture's true direction: x1 up, x2 down
    j1 = model.feature_names.index("x1")
    j2 = model.feature_names.index("x2")
    assert model.coefficients[j1] > 0 > model.coefficients[j2]


def test_binary_kkt_small():
    ds = binary_dataset(n=500, seed=7)
    model = train_glm(ds, ModelSpec("glm", params={"alpha": 0.01}))
    assert model.kkt_residual <= 1e-6


def test_categorical_encoding_target_mean():
    ds = binary_dataset(n=600, seed=8, categorical=True)
    model = train_glm(ds, ModelSpec("glm", params={"alpha": 1e-4}))
    assert "cat" in model.feature_names
    enc = model.encoder
    tr = ds.train_indices
    y = ds.y[tr]
    vals = ds.column("cat").values[tr]
    for level, code in enc.level_maps["cat"].items():
        assert code == pytest.approx(float(y[vals == level].mean()), abs=1e-12)
    # unseen level falls back to the train target mean
    import numpy as np2
    block = {"x1": np.array([0.0]), "x2": np.array([0.0]),
             "cat": np.array(["zzz"], dtype=object)}
    X = enc.encode(block)
    j = model.feature_names.index("cat")
    assert X[0, j] == pytest.approx(float(y.mean()), abs=1e-12)


def test_bad_params_rejected():
    ds = linear_dataset(n=100)
    with pytest.raises(ConfigError) as e:
        train_glm(ds, ModelSpec("glm", params={"alpha": -1.0}))
    assert "alpha" in str(e.value)
    with pytest.raises(ConfigError):
        train_glm(ds, ModelSpec("glm", params={"l1_ratio": 2.0}))


def test_model_roundtrip_predicts_identically():
    from glassbench.models import model_from_dict, model_to_dict
    ds = linear_dataset(n=200, seed=9)
    model = train_glm(ds, ModelSpec("glm"))
    back = model_from_dict(model_to_dict(model))
    block = ds.row_block(ds.test_indices)
    np.testing.assert_array_equal(model.predict(block), back.predict(block))


def test_train_dispatch_unknown_family():
    ds = linear_dataset(n=100)
    with pytest.raises(ConfigError) as e:
        train(ds, ModelSpec("ebm"))
    assert "glm" in str(e.value)
