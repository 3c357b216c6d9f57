import json
import os
from pathlib import Path

import numpy as np
import pytest

import cnmf

DATA = Path(__file__).resolve().parents[2] / "data"


def random_nonneg(rows, cols, seed):
    return np.random.default_rng(seed).random((rows, cols))


def test_nmf_objective_never_increases():
    w, h, trace = cnmf.nmf(random_nonneg(20, 15, 0), rank=3, max_iters=100, rel_tol=1e-12)
    assert w.shape == (20, 3) and h.shape == (3, 15)
    assert (w >= 0).all() and (h >= 0).all()
    assert all(b <= a + 1e-9 for a, b in zip(trace, trace[1:]))


def test_lambda_zero_matches_plain_nmf():
    x = random_nonneg(12, 25, 1)
    base = cnmf.nmf(x, rank=2, seed=3)[2]
    assert cnmf.gnmf(x, 0.0, rank=2, seed=3)[2] == base
    assert cnmf.frnmf(x, 0.0, rank=2, seed=3)[2] == base


def test_knn_graph_is_symmetric():
    a = cnmf.knn_graph(random_nonneg(4, 30, 2), k=5)
    assert np.array_equal(a, a.T)
    assert (np.diag(a) == 0).all()
    assert (a.sum(axis=1) >= 5).all()


def test_project_round_trip_and_singular_basis():
    w = random_nonneg(10, 3, 4)
    h = np.array([0.2, -0.5, 1.0])
    assert np.allclose(cnmf.project(w, w @ h), h, rtol=1e-8)
    with pytest.raises(cnmf.SingularError):
        cnmf.project(np.ones((3, 2)), [1.0, 1.0, 1.0], ridge=0.0)


def test_knn_and_votes():
    codes = np.array([[0.0, 1.0, 5.0]])
    assert cnmf.knn_label(np.array([0.9]), codes, [7, 8, 9]) == 8
    assert cnmf.majority_vote([2, 1, 2, 1]) == 1
    assert len(cnmf.enumerate_pairs(list(range(10)))) == 45


def test_contract_errors_map_to_value_error():
    with pytest.raises(ValueError):
        cnmf.nmf(-np.ones((3, 3)))
    with pytest.raises(cnmf.DataError):
        cnmf.load_csv(str(DATA / "does_not_exist.csv"))


def test_blobs_scaling_and_two_class_equivalence():
    x, y = cnmf.make_blobs(n_samples=60, n_centers=2, n_features=5, cluster_std=1.5, seed=1)
    assert x.shape == (5, 60) and sorted(set(y)) == [0, 1]
    xs = cnmf.minmax_scale(x, y)
    assert xs.min() == 0.0 and xs.max() == 1.0
    c = cnmf.evaluate_chromosome(xs, y, [0.4], rank=2, max_iters=50)
    u = cnmf.evaluate_unmf(xs, y, 0.4, rank=2, max_iters=50)
    assert c == u and 0.0 <= c <= 1.0


def test_ga_tracks_best_so_far():
    out = cnmf.ga_optimize(lambda g: g[0], 1, patience=0, seed=0)
    trace = out["trace"]
    assert trace == sorted(trace) and len(trace) == 20
    assert out["best_fitness"] == trace[-1] == out["best_genes"][0]


def test_wine_csv_loads():
    x, y, names = cnmf.load_csv(str(DATA / "wine.csv"))
    assert x.shape == (13, 178) and len(set(y)) == 3 and len(names) == 13


def test_run_experiment_is_reproducible():
    settings = dict(ranks=[2], seeds=[0], folds=3, max_iters=30, ga={"pop_size": 4, "generations": 2})
    a = cnmf.run_experiment("blob:cl=3,f=4,n=60", **settings)
    b = cnmf.run_experiment("blob:cl=3,f=4,n=60", **settings)
    assert json.dumps(a, sort_keys=True) == json.dumps(b, sort_keys=True)
    assert set(a["mean_acc"]) == {"cnmf", "unmf"}
    with pytest.raises(KeyError):
        cnmf.run_experiment("blob:cl=3,f=4", colour="blue")
