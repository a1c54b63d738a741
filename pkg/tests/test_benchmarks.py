import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from domrt.benchmarks import (Bench, WeightedGraph, as_bench, binval, inversions, jump,
                              leadingones, onemax, sssp_fitness, vector_at_least_as_good)
from domrt.dist_core import DomainError

INF = math.inf


def test_onemax_leadingones_examples():
    assert [onemax(s) for s in ("0000", "1111", "1010")] == [0, 4, 2]
    assert [leadingones(s) for s in ("1101", "0111", "1111")] == [2, 0, 4]


def test_jump_examples():
    assert jump("1111", 2) == 6
    assert jump("1100", 2) == 4
    assert jump("1110", 2) == 1
    with pytest.raises(DomainError):
        jump("1111", 5)
    with pytest.raises(DomainError):
        jump("1111", 0)


def test_inversions_examples():
    assert inversions([1, 2, 3, 4, 5]) == 0
    assert inversions([3, 2, 1]) == 3
    assert inversions((2, 1, 3)) == 1
    with pytest.raises(DomainError):
        inversions([1, 1, 2])


def test_bench_objects():
    assert as_bench("jump2") == Bench("jump", 2)
    assert as_bench("jump:3").ident == "jump3"
    assert Bench("onemax").optimum(7) == 7
    assert Bench("jump", 2).optimum(8) == 10
    assert Bench("binval").optimum(4) == 15
    assert binval("1011") == 11 and binval("1000") == 8
    with pytest.raises(DomainError):
        Bench("needle")


@pytest.mark.parametrize("n", range(2, 13))
def test_jump_unique_optimum_exhaustive(n):
    for k in range(2, n + 1):
        f = Bench("jump", k)
        vals = [f(np.array(bits, dtype=np.uint8)) for bits in itertools.product((0, 1), repeat=n)]
        best = max(vals)
        assert vals.count(best) == 1 and vals[-1] == best == n + k


@settings(max_examples=50, deadline=None)
@given(st.lists(st.integers(0, 1), min_size=1, max_size=30), st.data())
def test_prop_onemax_monotone_and_lo_max(bits, data):
    x = np.array(bits, dtype=np.uint8)
    zeros = np.flatnonzero(x == 0)
    if zeros.size:
        i = data.draw(st.sampled_from(zeros.tolist()))
        y = x.copy()
        y[i] = 1
        assert onemax(y) == onemax(x) + 1
    assert (leadingones(x) == x.size) == bool(x.all())


def test_sssp_examples():
    g = WeightedGraph(2, ((0, 1, 3),))
    assert sssp_fitness(g, [0, 0]).tolist() == [3]
    g3 = WeightedGraph(3, ((0, 1, 1), (1, 2, 1), (0, 2, 1)))
    assert sssp_fitness(g3, [0, 2, 1]).tolist() == [INF, INF]
    assert sssp_fitness(g3, [0, 0, 1]).tolist() == [1, 2]
    with pytest.raises(DomainError):
        sssp_fitness(g3, [0, 1, 1])


def test_non_edge_pointer_is_infinite():
    g = WeightedGraph.path(3)
    assert sssp_fitness(g, [0, 0, 0]).tolist() == [1, INF]


def test_vector_at_least_as_good_examples():
    assert vector_at_least_as_good([1, 2], [1, 2])
    assert not vector_at_least_as_good([1, 3], [1, 2])
    assert vector_at_least_as_good([1, INF], [2, INF])
    with pytest.raises(DomainError):
        vector_at_least_as_good([1], [1, 2])


def _small_graphs():
    gen = np.random.default_rng(4)
    for n in range(3, 7):
        for _ in range(3):
            edges = [(i, int(gen.integers(0, i)), int(gen.integers(1, 4))) for i in range(1, n)]
            for u in range(n):
                for v in range(u + 1, n):
                    if gen.uniform() < 0.3 and not any({a, b} == {u, v} for a, b, _ in edges):
                        edges.append((u, v, int(gen.integers(1, 4))))
            yield WeightedGraph(n, tuple(edges), int(gen.integers(0, n)))


@pytest.mark.parametrize("g", list(_small_graphs()), ids=lambda g: f"n{g.n_vertices}")
def test_sssp_fitness_equals_dijkstra_iff_shortest_path_tree(g):
    n, s = g.n_vertices, g.source
    w = g.weight_matrix()
    dist = g.distances()
    others = [v for v in range(n) if v != s]
    choices = [[t for t in range(n) if t != v] for v in others]
    for combo in itertools.product(*choices):
        ptr = np.zeros(n, dtype=np.int64)
        ptr[others] = combo
        fit = sssp_fitness(g, ptr)
        on_tree = all(w[v, ptr[v]] > 0 and dist[ptr[v]] + w[v, ptr[v]] == dist[v] for v in others)
        assert np.array_equal(fit, dist[others]) == on_tree


def test_graph_validation_and_io(tmp_path):
    with pytest.raises(DomainError):
        WeightedGraph(3, ((0, 1, 1),))
    with pytest.raises(DomainError):
        WeightedGraph(2, ((0, 0, 1),))
    with pytest.raises(DomainError):
        WeightedGraph(2, ((0, 1, 0),))
    g = WeightedGraph(3, ((0, 1, 1), (1, 2, 2), (0, 2, 5)), 0)
    assert g.hop_radius() == 2
    p = tmp_path / "g.txt"
    p.write_text(g.to_text())
    h = WeightedGraph.read(p)
    assert h.edges == g.edges and h.source == g.source
    assert g.to_text().splitlines()[0] == "3 3 1"
