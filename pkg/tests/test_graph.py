import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from grande.graph import (
    build_reciprocal_graph,
    compute_ranked_lists,
    to_propagator_with_self_loops,
)

LINE = np.array([[0.0], [1.0], [2.0], [10.0]])


def brute_lists(x, k):
    n = len(x)
    out = []
    for i in range(n):
        pairs = sorted(
            (math.sqrt(sum((a - b) ** 2 for a, b in zip(x[i], x[j]))), j)
            for j in range(n) if j != i
        )
        out.append([j for _, j in pairs[:k]])
    return out


def brute_edges(x, k):
    lists = [set(l) for l in brute_lists(x, k)]
    return {(i, j) for i in range(len(x)) for j in range(i + 1, len(x))
            if j in lists[i] and i in lists[j]}


def edge_set(g):
    return {tuple(e) for e in g.edges.tolist()}


class TestRankedLists:
    def test_line_example(self, backend):
        rl = compute_ranked_lists(LINE, 2)
        assert rl.neighbors.tolist() == [[1, 2], [0, 2], [1, 0], [2, 1]]
        assert rl.distances.tolist() == [[1, 2], [1, 1], [1, 2], [8, 9]]

    def test_coincident(self, backend):
        rl = compute_ranked_lists(np.array([[1.0, 1.0], [1.0, 1.0], [5.0, 5.0]]), 1)
        assert rl.neighbors[:2, 0].tolist() == [1, 0]
        assert rl.distances[0, 0] == 0.0

    @pytest.mark.parametrize("seed", range(3))
    def test_matches_brute_force(self, backend, seed):
        x = np.random.default_rng(seed).standard_normal((200, 8))
        rl = compute_ranked_lists(x, 10)
        assert rl.neighbors.tolist() == brute_lists(x, 10)

    def test_ties_by_index_on_grid(self, backend):
        x = np.array([[i, j] for i in range(5) for j in range(5)], dtype=float)
        assert compute_ranked_lists(x, 6).neighbors.tolist() == brute_lists(x, 6)

    def test_invariants(self):
        x = np.random.default_rng(5).standard_normal((60, 3))
        rl = compute_ranked_lists(x, 8)
        assert not np.any(rl.neighbors == np.arange(60)[:, None])
        assert np.all(np.diff(rl.distances, axis=1) >= 0)

    def test_k_too_large(self):
        with pytest.raises(ValueError):
            compute_ranked_lists(LINE, 4)


class TestReciprocalGraph:
    def test_line_example(self):
        g = build_reciprocal_graph(compute_ranked_lists(LINE, 2), 2)
        assert edge_set(g) == {(0, 1), (0, 2), (1, 2)}
        assert g.degree_counts()[3] == 0

    def test_complete_when_saturated(self):
        x = np.random.default_rng(0).standard_normal((7, 2))
        g = build_reciprocal_graph(compute_ranked_lists(x, 6), 6)
        assert len(g.edges) == 21

    @pytest.mark.parametrize("k", [2, 5, 10])
    def test_matches_mutual_oracle(self, k):
        x = np.random.default_rng(k).standard_normal((150, 4))
        g = build_reciprocal_graph(compute_ranked_lists(x, 10), k)
        assert edge_set(g) == brute_edges(x, k)

    def test_k_exceeds_lists(self):
        with pytest.raises(ValueError):
            build_reciprocal_graph(compute_ranked_lists(LINE, 2), 3)

    @settings(max_examples=30, deadline=None)
    @given(st.integers(5, 40), st.integers(1, 4), st.integers(0, 2**32 - 1))
    def test_mutuality_and_bound(self, n, k, seed):
        x = np.random.default_rng(seed).standard_normal((n, 2))
        rl = compute_ranked_lists(x, k)
        g = build_reciprocal_graph(rl, k)
        rank = {(i, int(j)) for i in range(n) for j in rl.neighbors[i, :k]}
        for i, j in g.edges.tolist():
            assert i < j and (i, j) in rank and (j, i) in rank
        assert len(g.edges) <= n * k / 2 + n
        assert list(map(tuple, g.edges.tolist())) == sorted(set(map(tuple, g.edges.tolist())))


class TestPropagator:
    def test_isolated_nodes(self):
        from grande.graph import NeighborGraph
        p = to_propagator_with_self_loops(NeighborGraph(3, np.empty((0, 2), dtype=np.int64), 1))
        assert np.array_equal(p.to_dense(), np.eye(3))

    def test_single_edge(self):
        from grande.graph import NeighborGraph
        p = to_propagator_with_self_loops(NeighborGraph(2, np.array([[0, 1]]), 1))
        assert np.array_equal(p.to_dense(), np.ones((2, 2)))

    def test_triangle(self):
        from grande.graph import NeighborGraph
        p = to_propagator_with_self_loops(NeighborGraph(3, np.array([[0, 1], [0, 2], [1, 2]]), 2))
        assert np.array_equal(p.to_dense(), np.ones((3, 3)))

    def test_structure_valid(self):
        x = np.random.default_rng(2).standard_normal((80, 3))
        p = to_propagator_with_self_loops(build_reciprocal_graph(compute_ranked_lists(x, 6), 6))
        p.validate()
        dense = p.to_dense()
        assert np.array_equal(dense, dense.T)
