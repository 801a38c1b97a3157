import numpy as np
import pytest

from conftest import binary_dataset, build_dataset, regression_dataset, write_csv
from glassbench.data import (BINARY, CATEGORICAL, MISSING_LEVEL, NUMERIC,
                             REGRESSION, Dataset, data_quality, feature_select,
                             load_csv, prepare, quantile, save_csv, summarize)
from glassbench.errors import DataError


def test_load_csv_kinds_and_missing(tmp_path):
    p = tmp_path / "d.csv"
    write_csv(p, ["a", "b", "y"],
              [[1.5, "red", 0], ["", "blue", 1], [2.5, "", 0], [3.0, "red", 1]])
    ds = load_csv(p, "y", "binary")
    assert ds.column("a").kind == NUMERIC
    assert ds.column("b").kind == CATEGORICAL
    assert ds.column("a").missing.tolist() == [False, True, False, False]
    assert ds.column("b").missing.tolist() == [False, False, True, False]
    assert ds.task == BINARY
    assert ds.n_rows == 4


def test_load_csv_numeric_like_strings_stay_categorical(tmp_path):
    p = tmp_path / "d.csv"
    write_csv(p, ["a", "y"], [["1", 0.5], ["2", 1.0], ["x", 1.5], ["1", 2.0],
                              ["2", 2.5]])
    ds = load_csv(p, "y", "regression")
    assert ds.column("a").kind == CATEGORICAL


def test_load_csv_errors(tmp_path):
    p = tmp_path / "d.csv"
    write_csv(p, ["a", "y"], [[1, 2]])
    with pytest.raises(DataError):
        load_csv(p, "nope", "regression")
    write_csv(p, ["a", "y"], [[1, 7]])
    with pytest.raises(DataError):
        load_csv(p, "y", "binary")   # target outside {0,1}
    p2 = tmp_path / "empty.csv"
    p2.write_text("a,y\n")
    with pytest.raises(DataError):
        load_csv(p2, "y", "regression")


def test_target_with_missing_rejected():
    vals = np.array([1.0, np.nan, 2.0, 3.0, 4.0])
    with pytest.raises(DataError):
        build_dataset({"x": (NUMERIC, [1, 2, 3, 4, 5]),
                       "y": (NUMERIC, vals)}, "y", REGRESSION)


def test_prepare_split_sizes_and_determinism():
    ds = build_dataset({"x": (NUMERIC, np.arange(10.0)),
                        "y": (NUMERIC, np.arange(10.0))}, "y", REGRESSION)
    out1 = prepare(ds, 0.25, seed=4)
    out2 = prepare(ds, 0.25, seed=4)
    assert len(out1.test_indices) == 3   # round-half-up of 2.5
    assert np.array_equal(out1.split, out2.split)
    out3 = prepare(ds, 0.25, seed=5)
    assert not np.array_equal(out1.split, out3.split)


def test_prepare_stratifies_binary():
    rng = np.random.default_rng(0)
    y = np.array([1.0] * 30 + [0.0] * 70)
    ds = build_dataset({"x": (NUMERIC, rng.normal(size=100)),
                        "y": (NUMERIC, y)}, "y", BINARY)
    out = prepare(ds, 0.2, seed=1)
    te = out.test_indices
    pos = int(out.y[te].sum())
    assert len(te) == 20
    assert abs(pos - 6) <= 1   # exact quota 0.2 * 30, within one row


def test_prepare_imputes_from_train_median(tmp_path):
    vals = np.array([1.0, 2.0, 3.0, 4.0, np.nan, 100.0])
    miss = np.isnan(vals)
    from glassbench.data import Column
    cols = [Column("x", NUMERIC, vals.copy(), miss.copy()),
            Column("y", NUMERIC, np.arange(6.0), np.zeros(6, dtype=bool))]
    ds = Dataset(name="m", columns=cols, target="y", task=REGRESSION)
    out = prepare(ds, 0.2, seed=0)
    filled = out.column("x").values[4]
    tr = out.train_indices
    donors = [v for i, v in enumerate(vals) if i in tr and not np.isnan(v)]
    assert filled == np.median(donors)
    assert not out.column("x").missing.any()


def test_prepare_categorical_missing_level():
    from glassbench.data import Column
    vals = np.array(["a", "b", "a", "b", "a", "b"], dtype=object)
    miss = np.array([False, False, True, False, False, False])
    cols = [Column("c", CATEGORICAL, vals, miss),
            Column("y", NUMERIC, np.arange(6.0), np.zeros(6, dtype=bool))]
    ds = Dataset(name="m", columns=cols, target="y", task=REGRESSION)
    out = prepare(ds, 0.2, seed=0)
    assert out.column("c").values[2] == MISSING_LEVEL


def test_quantile_is_type7():
    rng = np.random.default_rng(2)
    v = rng.normal(size=101)
    for q in (0.0, 0.1, 0.25, 0.5, 0.9, 1.0):
        assert quantile(v, q) == np.quantile(v, q)


def test_summary_regression_and_binary():
    ds = regression_dataset(categorical=True)
    s = summarize(ds).to_dict()
    assert "x1" in s["numeric"]
    st = s["numeric"]["x1"]
    col = ds.column("x1").values
    assert abs(st["mean"] - col.mean()) < 1e-12
    assert "cat" in s["categorical"]
    assert s["class_balance"] is None
    b = summarize(binary_dataset()).to_dict()
    assert set(b["class_balance"]) == {"0", "1"}


def test_summary_correlation_matches_numpy():
    ds = regression_dataset()
    s = summarize(ds).to_dict()
    cols = s["correlation"]["columns"]
    i, j = cols.index("x1"), cols.index("x2")
    a = ds.column("x1").values
    b = ds.column("x2").values
    expected = np.corrcoef(a, b)[0, 1]
    assert abs(s["correlation"]["pearson"][i][j] - expected) < 1e-12


def test_quality_report():
    from glassbench.data import Column
    n = 8
    cols = [
        Column("a", NUMERIC, np.array([1.0, 1, 1, 1, 1, 1, 1, 50.0]),
               np.zeros(n, dtype=bool)),
        Column("c", CATEGORICAL, np.array(["k"] * n, dtype=object),
               np.zeros(n, dtype=bool)),
        Column("y", NUMERIC, np.arange(8.0), np.zeros(n, dtype=bool)),
    ]
    ds = Dataset(name="q", columns=cols, target="y", task=REGRESSION)
    rep = data_quality(ds).to_dict()
    assert rep["constant_columns"] == ["c"]
    assert rep["outlier_counts"]["a"] >= 1
    assert rep["duplicate_rows"] == 0


def test_quality_duplicates():
    ds = build_dataset({"x": (NUMERIC, [1, 1, 2, 2, 3]),
                        "y": (NUMERIC, [5, 5, 6, 6, 7])}, "y", REGRESSION)
    assert data_quality(ds).duplicate_rows == 2


def test_feature_select_ranking(lin_ds):
    r = feature_select(lin_ds, 3)
    names = [f for f, _ in r.ranking]
    assert names[0] == "x1"            # |beta| = 2 dominates the correlation
    assert names[-1] == "x3"           # zero coefficient ranks last
    assert not r.truncated
    r2 = feature_select(lin_ds, 10)
    assert r2.truncated


def test_feature_select_matches_pearson_oracle(lin_ds):
    r = feature_select(lin_ds, 3)
    y = lin_ds.y
    for name, score in r.ranking:
        col = lin_ds.column(name).values
        expected = abs(np.corrcoef(col, y)[0, 1])
        assert abs(score - expected) < 1e-12


def test_dataset_roundtrip(reg_ds):
    d = reg_ds.to_dict()
    back = Dataset.from_dict(d)
    assert back.n_rows == reg_ds.n_rows
    assert np.array_equal(back.split, reg_ds.split)
    np.testing.assert_array_equal(back.column("x1").values,
                                  reg_ds.column("x1").values)


def test_csv_roundtrip(tmp_path):
    ds = regression_dataset(n=50, categorical=True)
    p = tmp_path / "out.csv"
    save_csv(ds, p)
    back = load_csv(p, "y", "regression")
    np.testing.assert_allclose(back.column("x1").values,
                               ds.column("x1").values, atol=1e-12)
    assert back.column("cat").values.tolist() == ds.column("cat").values.tolist()
