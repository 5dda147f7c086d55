"""Ranked neighbor lists and the reciprocal kNN graph."""

from dataclasses import dataclass

import numpy as np

from grande import kernels
from grande.tensor import SparsePropagator

_BLOCK_BYTES = 1 << 26


@dataclass
class RankedLists:
    """``neighbors[i]`` holds the ``k_max`` nearest nodes to ``i`` (self excluded),
    nearest first, with the matching Euclidean ``distances``."""

    neighbors: np.ndarray
    distances: np.ndarray

    @property
    def n(self):
        return self.neighbors.shape[0]

    @property
    def k_max(self):
        return self.neighbors.shape[1]


@dataclass
class NeighborGraph:
    n: int
    edges: np.ndarray  # (m, 2) int64, i < j, sorted lexicographically
    k: int

    def degree_counts(self):
        return np.bincount(self.edges.ravel(), minlength=self.n)


def _select_row(dist, k):
    # exact k smallest; equal distances ordered by node index
    kth = np.partition(dist, k - 1)[k - 1]
    cand = np.flatnonzero(dist <= kth)
    order = np.argsort(dist[cand], kind="stable")
    return cand[order[:k]]


def compute_ranked_lists(x, k_max):
    """Exact all-pairs k nearest neighbors under the Euclidean norm."""
    x = np.ascontiguousarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] < 1:
        raise ValueError("features must be an n x d matrix with d >= 1")
    n = x.shape[0]
    if not 1 <= k_max < n:
        raise ValueError(f"k_max must satisfy 1 <= k_max < n={n}, got {k_max}")
    if not np.all(np.isfinite(x)):
        raise ValueError("features contain non-finite values")
    neighbors = np.empty((n, k_max), dtype=np.int64)
    distances = np.empty((n, k_max))
    block = max(1, _BLOCK_BYTES // (8 * n * max(1, x.shape[1])))
    for start in range(0, n, block):
        stop = min(n, start + block)
        dist = kernels.pairwise_block(x[start:stop], x)
        for r, i in enumerate(range(start, stop)):
            row = dist[r]
            row[i] = np.inf
            sel = _select_row(row, k_max)
            neighbors[i] = sel
            distances[i] = row[sel]
    return RankedLists(neighbors, distances)


def build_reciprocal_graph(lists, k):
    """Keep ``{i, j}`` only when each is among the other's first ``k`` neighbors."""
    if not 1 <= k <= lists.k_max:
        raise ValueError(f"k must lie in [1, k_max={lists.k_max}], got {k}")
    n = lists.n
    src = np.repeat(np.arange(n, dtype=np.int64), k)
    dst = lists.neighbors[:, :k].ravel()
    arcs = src * n + dst
    reverse = dst * n + src
    mutual = np.isin(arcs, reverse, assume_unique=True) & (src < dst)
    edges = np.stack([src[mutual], dst[mutual]], axis=1)
    order = np.lexsort((edges[:, 1], edges[:, 0]))
    return NeighborGraph(n, edges[order], k)


def to_propagator_with_self_loops(g):
    """Augmented adjacency A + I as CSR, all stored values 1.0."""
    n = g.n
    diag = np.arange(n, dtype=np.int64)
    rows = np.concatenate([g.edges[:, 0], g.edges[:, 1], diag])
    cols = np.concatenate([g.edges[:, 1], g.edges[:, 0], diag])
    order = np.lexsort((cols, rows))
    rows, cols = rows[order], cols[order]
    indptr = np.zeros(n + 1, dtype=np.int64)
    np.cumsum(np.bincount(rows, minlength=n), out=indptr[1:])
    return SparsePropagator(n, indptr, cols, np.ones(len(cols)))
