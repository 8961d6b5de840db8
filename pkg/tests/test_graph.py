import itertools
import random

import networkx as nx
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from helpers import clique, cycle, graphs, path, random_graph, star, triangle
from partialcolor.errors import MalformedColoring, MalformedEdge
from partialcolor.graph import (
    Coloring, Graph, degeneracy, degeneracy_coloring, degeneracy_order, greedy_partial_coloring,
    verify_k_partial, verify_proper,
)


def nx_degeneracy(g: Graph) -> int:
    h = nx.Graph()
    h.add_nodes_from(range(g.n))
    h.add_edges_from(g.edges)
    return max(nx.core_number(h).values(), default=0)


# -- construction ---------------------------------------------------------

def test_graph_rejects_self_loop():
    with pytest.raises(MalformedEdge):
        Graph(3, [(1, 1)])


def test_graph_rejects_duplicate_in_either_orientation():
    with pytest.raises(MalformedEdge):
        Graph(3, [(0, 1), (1, 0)])


def test_graph_rejects_out_of_range():
    with pytest.raises(MalformedEdge):
        Graph(2, [(0, 2)])


@given(graphs())
def test_adjacency_symmetric_and_matches_edges(g):
    for u, v in g.edges:
        assert u < v
        assert v in g.neighbors(u) and u in g.neighbors(v)
    assert sum(g.degree(v) for v in range(g.n)) == 2 * g.m
    indptr, indices = g.csr
    for v in range(g.n):
        assert sorted(indices[indptr[v]:indptr[v + 1]]) == sorted(g.neighbors(v))


# -- verification ---------------------------------------------------------

def test_triangle_k1_valid():
    assert verify_k_partial(triangle(), 1, Coloring([1, 1, 2], 2))


def test_triangle_k2_two_violators():
    v = verify_k_partial(triangle(), 2, Coloring([1, 1, 2], 2))
    assert not v
    assert v.violations == (0, 1)


def test_path_k2_valid():
    assert verify_k_partial(path(3), 2, Coloring([1, 2, 1], 2))


def test_proper_single_edge():
    g = Graph(2, [(0, 1)])
    assert verify_proper(g, Coloring([1, 2], 2))
    bad = verify_proper(g, Coloring([1, 1], 2))
    assert bad.violations == ((0, 1),)


def test_proper_edgeless():
    assert verify_proper(Graph(4), Coloring([1, 1, 1, 1], 1))


def test_color_out_of_range_is_malformed():
    with pytest.raises(MalformedColoring):
        verify_k_partial(triangle(), 1, Coloring([1, 2, 3], 2))
    with pytest.raises(MalformedColoring):
        verify_proper(triangle(), Coloring([0, 1, 2], 2))


def test_coloring_length_mismatch_is_malformed():
    with pytest.raises(MalformedColoring):
        verify_k_partial(triangle(), 1, Coloring([1, 2], 2))


def brute_violators(g, k, colors):
    return [
        v for v in range(g.n)
        if sum(colors[u] != colors[v] for u in g.neighbors(v)) < min(k, g.degree(v))
    ]


@given(graphs(), st.integers(0, 6), st.randoms(use_true_random=False))
def test_verify_matches_direct_count(g, k, r):
    colors = [r.randint(1, 3) for _ in range(g.n)]
    got = verify_k_partial(g, k, Coloring(colors, 3))
    assert list(got.violations) == brute_violators(g, k, colors)


@given(graphs(), st.randoms(use_true_random=False))
def test_k_at_least_max_degree_equals_proper(g, r):
    colors = Coloring([r.randint(1, 3) for _ in range(g.n)], 3)
    k = max(g.max_degree, 1)
    assert bool(verify_k_partial(g, k, colors)) == bool(verify_proper(g, colors))


# -- degeneracy -----------------------------------------------------------

@pytest.mark.parametrize("g, d", [(clique(4), 3), (cycle(5), 2), (star(5), 1), (Graph(3), 0)])
def test_degeneracy_examples(g, d):
    assert degeneracy(g) == d


def test_peeling_ties_go_to_smallest_id():
    # every vertex of a 5-cycle has degree 2; after 0 leaves, 1 and 4 drop to 1
    assert degeneracy_order(cycle(5)).order == (0, 1, 2, 3, 4)


@given(graphs(max_n=14))
def test_degeneracy_matches_core_numbers(g):
    assert degeneracy(g) == nx_degeneracy(g)


@given(graphs(max_n=14))
def test_order_bounds_out_degree(g):
    d = degeneracy_order(g)
    assert sorted(d.order) == list(range(g.n))
    for v in range(g.n):
        assert d.out_degree(g, v) <= d.degeneracy


@given(graphs(max_n=10), st.randoms(use_true_random=False))
def test_every_sampled_subset_has_low_degree_vertex(g, r):
    d = degeneracy(g)
    for _ in range(10):
        S = [v for v in range(g.n) if r.random() < 0.6]
        if not S:
            continue
        sub, _ = g.induced(S)
        assert min(sub.degree(v) for v in range(sub.n)) <= d


def test_degeneracy_coloring_examples():
    chi = degeneracy_coloring(clique(4))
    assert chi.colors_used == 4 and verify_proper(clique(4), chi)
    chi = degeneracy_coloring(star(5))
    assert chi.colors_used == 2 and verify_proper(star(5), chi)


def test_degeneracy_coloring_random_graph():
    g = random_graph(50, 0.2, random.Random(7))
    chi = degeneracy_coloring(g)
    assert verify_proper(g, chi)
    assert chi.colors_used <= nx_degeneracy(g) + 1


@given(graphs(max_n=16))
def test_degeneracy_coloring_property(g):
    chi = degeneracy_coloring(g)
    assert verify_proper(g, chi)
    assert chi.colors.max(initial=0) <= degeneracy(g) + 1


# -- greedy baseline ------------------------------------------------------

def test_greedy_single_edge():
    assert greedy_partial_coloring(Graph(2, [(0, 1)]), 1).as_tuple() == (2, 1)


def test_greedy_edgeless():
    assert greedy_partial_coloring(Graph(5), 3).as_tuple() == (1,) * 5


def test_greedy_triangle():
    chi = greedy_partial_coloring(triangle(), 2)
    assert chi.as_tuple() == (2, 3, 1)
    assert verify_k_partial(triangle(), 2, chi)


def test_greedy_random_graphs():
    r = random.Random(3)
    for _ in range(40):
        n = r.randint(1, 200)
        g = random_graph(n, r.uniform(0.0, 0.3), r)
        k = r.randint(1, 10)
        chi = greedy_partial_coloring(g, k)
        assert chi.palette_size == k + 1
        assert verify_k_partial(g, k, chi)


@given(graphs(), st.integers(1, 6))
def test_greedy_property(g, k):
    chi = greedy_partial_coloring(g, k)
    assert np.all((chi.colors >= 1) & (chi.colors <= k + 1))
    assert verify_k_partial(g, k, chi)


def test_coloring_equality_and_hash():
    a, b = Coloring([1, 2], 2), Coloring(np.array([1, 2]), 2)
    assert a == b and hash(a) == hash(b)
    assert a != Coloring([1, 2], 3)


def test_all_k_partial_by_brute_force_on_k3():
    # cross-check the verifier on all 27 colorings of a triangle
    g = triangle()
    for colors in itertools.product(range(1, 4), repeat=3):
        for k in range(0, 3):
            got = verify_k_partial(g, k, Coloring(colors, 3))
            assert list(got.violations) == brute_violators(g, k, colors)
