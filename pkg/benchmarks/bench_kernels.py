"""Time the compiled kernels against the numpy fallback.

    python benchmarks/bench_kernels.py [--n 2000] [--repeat 5]
"""

import argparse
import time

import numpy as np

from grande import kernels
from grande.degree import degree_centrality, normalize_adjacency
from grande.graph import build_reciprocal_graph, compute_ranked_lists, to_propagator_with_self_loops
from grande.harness import generate_blobs
from grande.models import AppnpModel, SgcModel, TrainConfig, train


def best_of(fn, repeat):
    times = []
    for _ in range(repeat):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return min(times)


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--n", type=int, default=2000)
    ap.add_argument("--dim", type=int, default=64)
    ap.add_argument("--k", type=int, default=40)
    ap.add_argument("--repeat", type=int, default=5)
    args = ap.parse_args()

    x, y = generate_blobs(10, args.n // 10, args.dim, 4.0, 1.0, seed=0)
    x = np.ascontiguousarray(x)
    rl = compute_ranked_lists(x, args.k)
    p = to_propagator_with_self_loops(build_reciprocal_graph(rl, args.k))
    a_hat = normalize_adjacency(p, degree_centrality(p))
    rng = np.random.default_rng(0)
    h = rng.standard_normal((len(x), 10))
    w = rng.standard_normal((args.dim, 256))
    rho = rng.random(p.nnz)
    mask = np.arange(0, len(x), 10)
    cfg = TrainConfig(model="appnp", epochs=5, degree_kind="grande", hidden=64)

    cases = {
        "spmm": lambda: kernels.spmm(a_hat.indptr, a_hat.indices, a_hat.data, h),
        "edge_distances": lambda: kernels.edge_distances(p.indptr, p.indices, h),
        "inverse_kernel_means": lambda: kernels.inverse_kernel_means(p.indptr, rho, 0.2),
        "matmul": lambda: kernels.matmul(x, w),
        "pairwise_block(256 rows)": lambda: kernels.pairwise_block(x[:256], x),
        "ranked_lists(k)": lambda: compute_ranked_lists(x, args.k),
        "appnp 5 grande epochs": lambda: train(
            AppnpModel(args.dim, 10, 64, 10, 0.1, 0.5, np.random.default_rng(0)),
            x, p, y, mask, cfg),
        "sgc 5 grande epochs": lambda: train(
            SgcModel(args.dim, 10, 2, np.random.default_rng(0)), x, p, y, mask,
            TrainConfig(epochs=5, degree_kind="grande")),
    }
    print(f"n={len(x)} d={args.dim} k={args.k} nnz={p.nnz}; best of {args.repeat}")
    print(f"{'case':28s} {'python':>10s} {'compiled':>10s} {'speedup':>8s}")
    for name, fn in cases.items():
        row = {}
        for backend in ("python", "compiled"):
            if backend not in kernels.BACKENDS:
                continue
            prev = kernels.use_backend(backend)
            row[backend] = best_of(fn, args.repeat)
            kernels.use_backend(prev)
        comp = row.get("compiled", float("nan"))
        print(f"{name:28s} {row['python']*1e3:9.2f}ms {comp*1e3:9.2f}ms {row['python']/comp:7.1f}x")


if __name__ == "__main__":
    main()
