"""Exit criteria, one test per criterion (criterion 3 split into its three clauses)."""

import json
import math
import time

import numpy as np
import pytest

from grande import harness
from grande import tensor as T
from grande.cli import main
from grande.degree import (
    DegreeVector,
    compute_edge_distances,
    degree_centrality,
    grande_degree,
    grande_degrees_for,
    neighborhood_penalty,
    normalize_adjacency,
)
from grande.graph import build_reciprocal_graph, compute_ranked_lists, to_propagator_with_self_loops
from grande.harness import DEFAULT_SIGMA_GRID, generate_blobs, run_experiment
from grande.models import AppnpModel, SgcModel, TrainConfig, train
from grande import io
from conftest import numerical_grad, rel_error
from test_degree import power_iteration, two_node_table
from test_graph import brute_edges

# benchmark from the acceptance criteria
BLOBS = dict(classes=3, per_class=100, dim=16, separation=4.0, noise=1.0, seed=0)
BENCH_K = 10
# SGC is a 48-weight linear map; 1e-3 moves each weight by at most ~0.2 in 200 epochs
BENCH_LR = {"sgc": 1e-2, "appnp": 1e-3}


def normalized_knn(rng, n, d, k):
    x = rng.standard_normal((n, d))
    p = to_propagator_with_self_loops(build_reciprocal_graph(compute_ranked_lists(x, k), k))
    return p, normalize_adjacency(p, degree_centrality(p))


@pytest.fixture(scope="module")
def bench():
    x, y = generate_blobs(**BLOBS)
    return x, y, build_reciprocal_graph(compute_ranked_lists(x, BENCH_K), BENCH_K)


def test_criterion_1_gradient_correctness():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n, d, c, k = rng.integers(4, 13), rng.integers(1, 6), rng.integers(2, 4), rng.integers(0, 4)
        _, a_hat = normalized_knn(rng, n, d, 2)
        x = rng.standard_normal((n, d))
        labels = rng.integers(0, c, n)
        mask = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
        m = SgcModel(d, c, k, rng)
        z, cache = m.forward(x, a_hat)
        g = m.backward(cache, T.cross_entropy_masked(z, labels, mask)[1])[0]
        num = numerical_grad(lambda: T.cross_entropy_masked(m.forward(x, a_hat)[0], labels, mask)[0],
                             m.w.value)
        worst = max(worst, rel_error(g, num))
    for seed in range(20):
        rng = np.random.default_rng(100 + seed)
        n, d, c, k = rng.integers(4, 13), rng.integers(1, 6), rng.integers(2, 4), rng.integers(0, 4)
        hidden, alpha = int(rng.integers(1, 9)), [0.1, 0.5][seed % 2]
        _, a_hat = normalized_knn(rng, n, d, 2)
        x = rng.standard_normal((n, d))
        labels = rng.integers(0, c, n)
        mask = rng.choice(n, size=rng.integers(1, n + 1), replace=False)
        m = AppnpModel(d, c, hidden, k, alpha, 0.0, rng)
        z, cache = m.forward(x, a_hat)
        grads = m.backward(cache, T.cross_entropy_masked(z, labels, mask)[1])
        for layer, g in zip(m.layers, grads):
            num = numerical_grad(
                lambda: T.cross_entropy_masked(m.forward(x, a_hat)[0], labels, mask)[0], layer.value)
            worst = max(worst, rel_error(g, num))
    elapsed = time.perf_counter() - t0
    print(f"criterion 1: worst relative error {worst:.2e}, {elapsed:.2f}s")
    assert worst <= 1e-6
    assert elapsed < 30


def test_criterion_2_diffusion_oracle():
    t0 = time.perf_counter()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n, k_steps = int(rng.integers(5, 51)), int(rng.integers(0, 6))
        _, a_hat = normalized_knn(rng, n, 3, int(rng.integers(1, 5)))
        h = rng.standard_normal((n, 4))
        out = h
        for _ in range(k_steps):
            out = T.spmm(a_hat, out)
        expected = np.linalg.matrix_power(a_hat.to_dense(), k_steps) @ h
        worst = max(worst, np.max(np.abs(out - expected)))
    print(f"criterion 2: max abs diff {worst:.2e}")
    assert worst <= 1e-12
    assert time.perf_counter() - t0 < 10


def test_criterion_3a_penalty_bounds():
    for seed in range(10):
        rng = np.random.default_rng(seed)
        p, _ = normalized_knn(rng, 60, 4, 6)
        table = compute_edge_distances(p, rng.standard_normal((60, 3)))
        dc = degree_centrality(p)
        for sigma in DEFAULT_SIGMA_GRID:
            s = neighborhood_penalty(table, dc, sigma)
            assert np.all(s >= 1.0) and np.all(s <= math.exp(1 / sigma))


def test_criterion_3b_infinite_sigma_degree_limit():
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        p, _ = normalized_knn(rng, 60, 4, 6)
        d = grande_degrees_for(p, rng.standard_normal((60, 3)), 1e12)
        worst = max(worst, np.max(np.abs(d.values - (degree_centrality(p).values + 1))))
    print(f"criterion 3b: max |d_grande - (d_ctr + 1)| = {worst:.2e}")
    assert worst <= 1e-6


@pytest.mark.parametrize("model", ["sgc", "appnp"])
def test_criterion_3c_infinite_sigma_training_bit_identical(bench, model):
    x, y, g = bench
    fixed = degree_centrality(to_propagator_with_self_loops(g)).values + 1
    cfg = TrainConfig(model=model, epochs=50, lr=BENCH_LR[model], degree_kind="grande",
                      sigma=1e12, hidden=32, seed=3)
    mask = harness.make_folds(len(y), 10, 0).fold(0)
    traces = []
    for fd in (None, fixed):
        m = (SgcModel(16, 3, cfg.k_steps, np.random.default_rng(0)) if model == "sgc"
             else AppnpModel(16, 3, 32, cfg.k_steps, cfg.alpha, cfg.dropout, np.random.default_rng(0)))
        traces.append(train(m, x, g, y, mask, cfg, fixed_degrees=fd).losses)
    diff = np.max(np.abs(np.subtract(*traces)))
    print(f"criterion 3c ({model}): max loss-trace difference {diff:.3e}")
    assert traces[0] == traces[1]


def test_criterion_4_hand_computed_grande():
    dc = DegreeVector(np.array([2.0, 2.0]))
    d = grande_degree(dc, neighborhood_penalty(two_node_table(0.5), dc, 0.2), 0.2)
    print(f"criterion 4: delta_grande = {d.values[0]:.9f}")
    assert abs(d.values[0] - 4.245171) <= 1e-6


@pytest.mark.parametrize("k", [2, 5, 10])
def test_criterion_5_reciprocal_knn_exactness(k):
    for seed, n in [(0, 500), (1, 200), (2, 37)]:
        x = np.random.default_rng(seed * 10 + k).standard_normal((n, 5))
        g = build_reciprocal_graph(compute_ranked_lists(x, k), k)
        assert {tuple(e) for e in g.edges.tolist()} == brute_edges(x, k)
    line = np.array([[0.0], [1.0], [2.0], [10.0]])
    g = build_reciprocal_graph(compute_ranked_lists(line, 2), 2)
    assert g.edges.tolist() == [[0, 1], [0, 2], [1, 2]]
    assert g.degree_counts()[3] == 0


def test_criterion_6_synthetic_benchmark(bench):
    x, y, g = bench
    t0 = time.perf_counter()
    means = {}
    for model in ("sgc", "appnp"):
        for kind in ("centrality", "grande"):
            cfg = TrainConfig(model=model, degree_kind=kind, sigma=0.2, lr=BENCH_LR[model], seed=0)
            means[model, kind] = run_experiment(x, y, g, cfg, executions=1, fold_count=10).mean
            print(f"criterion 6: {model:5s} {kind:10s} mean accuracy {means[model, kind]:.4f}")
    elapsed = time.perf_counter() - t0
    print(f"criterion 6: {elapsed:.1f}s")
    for model in ("sgc", "appnp"):
        assert means[model, "centrality"] >= 0.90
        assert means[model, "grande"] >= means[model, "centrality"] - 0.005
    assert elapsed < 120


def test_criterion_7_sigma_sweep(tmp_path, monkeypatch):
    x, y = generate_blobs(**BLOBS)
    feats, labels = tmp_path / "x.bin", tmp_path / "y.csv"
    io.write_features_binary(feats, x)
    io.write_labels(labels, y)

    seen = []
    real = harness.make_folds

    def spy(*args):
        plan = real(*args)
        seen.append(plan.assignment.tobytes())
        return plan

    monkeypatch.setattr(harness, "make_folds", spy)
    docs = []
    for run in range(2):
        out = tmp_path / f"sweep{run}.json"
        argv = ["sweep-sigma", "--features", str(feats), "--labels", str(labels), "--out", str(out),
                "--k", str(BENCH_K), "--model", "sgc", "--lr", str(BENCH_LR["sgc"]),
                "--folds", "10", "--executions", "1", "--seed", "0", "--sigma-grid", "0.1:1.0:0.1"]
        assert main(argv) == 0
        doc = io.read_result(str(out))
        assert "timings" in doc
        doc.pop("timings")
        docs.append(json.dumps(doc, sort_keys=True))
    assert len(seen) == 20 and len(set(seen)) == 1
    assert docs[0] == docs[1]
    doc = json.loads(docs[0])
    sigmas = [r["sigma"] for r in doc["results"]]
    assert sigmas == list(DEFAULT_SIGMA_GRID)
    best = max(doc["results"], key=lambda r: (r["mean"], -r["sigma"]))["sigma"]
    print(f"criterion 7: best sigma {doc['best_sigma']}")
    assert doc["best_sigma"] == best


def test_criterion_8_spectral_sanity():
    worst = 0.0
    for seed in range(10):
        rng = np.random.default_rng(seed)
        _, a_hat = normalized_knn(rng, int(rng.integers(20, 201)), 4, int(rng.integers(2, 10)))
        worst = max(worst, abs(power_iteration(a_hat.to_dense())))
    print(f"criterion 8: largest dominant eigenvalue {worst:.12f}")
    assert worst <= 1 + 1e-8
