import numpy as np

from glassbench.models.binning import (bin_codes, n_bins, optimal_edges,
                                       quantile_edges)


def test_quantile_edges_span_and_dedup():
    rng = np.random.default_rng(0)
    v = rng.normal(size=500)
    edges = quantile_edges(v, 32)
    assert edges[0] == v.min() and edges[-1] == v.max()
    assert (np.diff(edges) > 0).all()
    assert len(edges) <= 33

    skewed = np.concatenate([np.zeros(490), rng.normal(size=10)])
    e2 = quantile_edges(skewed, 32)
    assert (np.diff(e2) > 0).all()          # duplicates collapsed


def test_quantile_edges_constant():
    edges = quantile_edges(np.full(50, 7.0), 10)
    assert edges.tolist() == [7.0, 7.0]
    assert n_bins(edges) == 1


def test_bin_codes_membership_and_clamp():
    edges = np.array([0.0, 1.0, 2.0, 3.0])
    v = np.array([-5.0, 0.0, 0.99, 1.0, 1.5, 2.0, 3.0, 99.0])
    codes = bin_codes(v, edges)
    assert codes.tolist() == [0, 0, 0, 1, 1, 2, 2, 2]
    assert codes.dtype == np.int32


def test_optimal_edges_finds_step_boundary():
    rng = np.random.default_rng(1)
    x = rng.uniform(0, 1, size=400)
    y = np.where(x < 0.5, 0.0, 1.0)
    edges, method = optimal_edges(x, y, max_bins=4)
    assert method == "tree"
    interior = edges[1:-1]
    assert any(abs(t - 0.5) < 0.05 for t in interior)


def test_optimal_edges_respects_max_bins():
    rng = np.random.default_rng(2)
    x = rng.uniform(0, 1, size=600)
    y = np.sin(8 * x) + 0.05 * rng.normal(size=600)
    edges, method = optimal_edges(x, y, max_bins=6)
    assert method == "tree"
    assert n_bins(edges) <= 6


def test_optimal_edges_constant_column():
    edges, method = optimal_edges(np.full(30, 2.0), np.arange(30.0), max_bins=5)
    assert method == "constant"
    assert edges.tolist() == [2.0, 2.0]


def test_optimal_edges_no_signal_fallback():
    rng = np.random.default_rng(3)
    x = rng.uniform(0, 1, size=8)
    y = np.zeros(8)   # constant target: no split can reduce SSE
    edges, method = optimal_edges(x, y, max_bins=4)
    assert method == "quantile_fallback"
    assert edges[0] == x.min() and edges[-1] == x.max()


def test_optimal_edges_deterministic():
    rng = np.random.default_rng(4)
    x = rng.normal(size=300)
    y = x ** 2 + 0.1 * rng.normal(size=300)
    e1, _ = optimal_edges(x, y, max_bins=8)
    e2, _ = optimal_edges(x, y, max_bins=8)
    assert np.array_equal(e1, e2)
