import itertools
from math import comb

import numpy as np
import pytest

from partialcolor.errors import InvalidColoring, InvalidParameters, UndefinedGadget
from partialcolor.graph import Coloring, verify_k_partial
from partialcolor.lowerbound import (
    COLOR_REPEATER, EDGE_GADGET, DropMatrixEdges, IndexInstance, LowerBoundLayout, StoreEverything,
    VertexAllocator, add_color_repeater, add_edge_gadget, build_alice_stream, build_bob_stream,
    build_reduction_graph, check_structure, color_repeater_size, decode_bit, edge_gadget_size,
    gadget_graph, reduction_colorings, reduction_vertex_count, simulate_protocol,
    verify_gadget_lemmas,
)
from partialcolor.solver import enumerate_k_partial


def brute_colorings(g, k, c):
    """All k-partial c-colorings, by trying every assignment through the verifier."""
    for chi in itertools.product(range(1, c + 1), repeat=g.n):
        col = Coloring(chi, c)
        if verify_k_partial(g, k, col):
            yield chi


# -- gadgets ---------------------------------------------------------------

@pytest.mark.parametrize("k, eg, cr", [(3, (3, 6), (2, 5)), (2, (2, 3), (1, 2))])
def test_gadget_sizes_examples(k, eg, cr):
    assert edge_gadget_size(k) == eg
    assert color_repeater_size(k) == cr
    for kind, want in ((EDGE_GADGET, eg), (COLOR_REPEATER, cr)):
        g = gadget_graph(kind, k)
        assert (g.n - 2, g.m) == want


@pytest.mark.parametrize("k", range(2, 17))
def test_gadget_sizes_by_construction(k):
    a = VertexAllocator(k, next_free=2)
    e = add_edge_gadget(a, 0, 1)
    assert (a.next_free - 2, len(e)) == (k, comb(k, 2) + k)
    b = VertexAllocator(k, next_free=2)
    e = add_color_repeater(b, 0, 1)
    assert (b.next_free - 2, len(e)) == (k - 1, comb(k - 1, 2) + 2 * (k - 1))
    assert len(set(map(frozenset, e))) == len(e)


def test_edge_gadget_endpoint_degrees():
    k = 4
    g = gadget_graph(EDGE_GADGET, k)
    assert g.degree(0) == k - 1 and g.degree(1) == 1
    # every clique vertex touches k-1 clique mates plus one endpoint
    assert all(g.degree(p) == k for p in range(2, 2 + k))


@pytest.mark.parametrize("k", [2, 3])
def test_gadget_lemmas_against_brute_force(k):
    for kind, want_equal in ((EDGE_GADGET, False), (COLOR_REPEATER, True)):
        g = gadget_graph(kind, k)
        sols = list(brute_colorings(g, k, k))
        assert sols
        assert all((chi[0] == chi[1]) == want_equal for chi in sols)
    reports = verify_gadget_lemmas(k)
    assert all(r.ok and r.method == "enumeration" for r in reports)


def test_gadget_lemma_counts_k3():
    reports = {r.kind: r for r in verify_gadget_lemmas(3)}
    assert reports[EDGE_GADGET].colorings == len(list(brute_colorings(gadget_graph(EDGE_GADGET, 3), 3, 3)))
    assert reports[COLOR_REPEATER].colorings == len(
        list(brute_colorings(gadget_graph(COLOR_REPEATER, 3), 3, 3)))


def test_gadget_lemmas_k4_by_sampling():
    # the repeater has only 24 colorings at k = 4, so sampling must find all of them
    reports = verify_gadget_lemmas(4, method="solver-sampling", samples=60, seed=1)
    for r in reports:
        space = len(enumerate_k_partial(gadget_graph(r.kind, 4), 4, 4))
        assert r.ok and r.colorings == min(60, space)


def test_undefined_gadgets():
    with pytest.raises(UndefinedGadget):
        verify_gadget_lemmas(1)
    with pytest.raises(UndefinedGadget):
        add_color_repeater(VertexAllocator(1, next_free=2), 0, 1)
    with pytest.raises(InvalidParameters):
        add_edge_gadget(VertexAllocator(3, next_free=2), 0, 0)


# -- reduction graph -------------------------------------------------------

def test_alice_stream_k3_ell2():
    inst = IndexInstance(np.array([[0, 1], [1, 0]]), 1, 1)
    edges, layout = build_alice_stream(inst)
    assert [gi.kind for gi in layout.aux] == [EDGE_GADGET, EDGE_GADGET]
    matrix = [e for e in edges if e[1] in layout.W]
    assert len(matrix) == 4
    assert len(edges) == 2 * edge_gadget_size(3)[1] + 4
    assert set(matrix) == {(layout.v(1), layout.w(1)), (layout.u(1), layout.w(2)),
                           (layout.u(2), layout.w(1)), (layout.v(2), layout.w(2))}


@pytest.mark.parametrize("bit, side", [(0, "V"), (1, "U")])
def test_constant_matrix_side(bit, side):
    inst = IndexInstance(np.full((3, 4), bit), 2, 3)
    edges, layout = build_alice_stream(inst)
    rows = getattr(layout, side)
    for h in range(1, 5):
        nbrs = {a for a, b in edges if b == layout.w(h)}
        assert nbrs == set(rows)


def test_bob_streams():
    layout = LowerBoundLayout.new(3, 2)
    build_bob_stream(layout, 1)
    assert [gi.kind for gi in layout.aux] == [COLOR_REPEATER, EDGE_GADGET]
    layout = LowerBoundLayout.new(4, 2)
    build_bob_stream(layout, 2)
    kinds = [(gi.kind, gi.x, gi.y) for gi in layout.aux]
    assert kinds == [(COLOR_REPEATER, layout.u(1), layout.v(1)),
                     (COLOR_REPEATER, layout.u(3), layout.v(3)),
                     (EDGE_GADGET, layout.u(2), layout.v(2))]
    with pytest.raises(InvalidParameters):
        build_bob_stream(LowerBoundLayout.new(3, 2), 3)


def test_bob_stream_depends_only_on_row():
    a = IndexInstance.random(5, 6, seed=1, g=3, h=1)
    b = IndexInstance.random(5, 6, seed=2, g=3, h=6)
    la, lb = build_alice_stream(a)[1], build_alice_stream(b)[1]
    assert build_bob_stream(la, 3) == build_bob_stream(lb, 3)


@pytest.mark.parametrize("k, ell", [(3, 2), (4, 3), (5, 7), (8, 2)])
def test_reduction_graph_shape(k, ell):
    inst = IndexInstance.random(k, ell, seed=k * ell, g=k - 1, h=ell)
    G, layout = build_reduction_graph(inst)
    assert G.n == reduction_vertex_count(k, ell) == layout.total
    for h in range(1, ell + 1):
        assert G.degree(layout.w(h)) == k - 1
    roles = layout.roles()
    covered = sorted(x for _, a, b in roles for x in range(a, b))
    assert covered == list(range(G.n))


def test_reduction_vertex_count_example():
    assert reduction_vertex_count(3, 2) == 17


def test_index_instance_validation():
    with pytest.raises(InvalidParameters):
        IndexInstance(np.array([[0, 2]]), 1, 1)
    with pytest.raises(InvalidParameters):
        IndexInstance(np.array([[0, 1]]), 1, 3)
    with pytest.raises(InvalidParameters):
        LowerBoundLayout.new(1, 2)
    inst = IndexInstance(np.array([[0, 1], [1, 1]]), 1, 2)
    assert inst.bit == 1 and inst.at(1, 1).bit == 0 and (inst.k, inst.ell) == (3, 2)


# -- decoding --------------------------------------------------------------

def small_layout():
    return LowerBoundLayout.new(3, 2)


def test_decode_bit_examples():
    L = small_layout()
    colors = [1] * L.total
    colors[L.u(1)], colors[L.v(1)] = 1, 3
    colors[L.w(1)], colors[L.w(2)] = 3, 1
    chi = Coloring(colors, 3)
    assert decode_bit(chi, L, 1, 1) == 1
    assert decode_bit(chi, L, 1, 2) == 0
    colors[L.w(2)] = 2
    with pytest.raises(InvalidColoring):
        decode_bit(Coloring(colors, 3), L, 1, 2)


def test_check_structure_accepts_and_rejects():
    L = small_layout()
    colors = [1] * L.total
    # g = 1: u_1, u_2 distinct; v_2 = u_2; v_1 takes the color missing from U
    colors[L.u(1)], colors[L.u(2)] = 1, 2
    colors[L.v(1)], colors[L.v(2)] = 3, 2
    assert check_structure(Coloring(colors, 3), L, 1)
    colors[L.v(1)] = 2
    kinds = {kind for kind, _ in check_structure(Coloring(colors, 3), L, 1).violations}
    assert kinds == {"V-distinct", "alpha"}
    colors[L.v(1)] = 1
    kinds = {kind for kind, _ in check_structure(Coloring(colors, 3), L, 1).violations}
    assert kinds == {"pairing", "alpha"}


@pytest.mark.parametrize("k", [3, 4])
def test_all_solver_colorings_decode(k):
    ell = 3
    base = IndexInstance.random(k, ell, seed=k)
    for g in range(1, k):
        G, layout, cols = reduction_colorings(base.at(g, 1), count=5, seed=g)
        assert len(cols) == 5
        for chi in cols:
            assert verify_k_partial(G, k, chi) and chi.colors.max() <= k
            assert check_structure(chi, layout, g)
            for h in range(1, ell + 1):
                assert decode_bit(chi, layout, g, h) == base.at(g, h).bit


def test_k3_reduction_exhaustive_small():
    # every 3-partial 3-coloring of a tiny instance satisfies the structure
    inst = IndexInstance(np.array([[1], [0]]), 2, 1)
    G, layout = build_reduction_graph(inst)
    cols = reduction_colorings(inst, count=50, seed=0)[2]
    assert cols
    for chi in cols:
        assert check_structure(chi, layout, 2)
        assert decode_bit(chi, layout, 2, 1) == 0


# -- protocol --------------------------------------------------------------

def test_protocol_recovers_every_bit():
    base = IndexInstance.random(3, 4, seed=5)
    for g in range(1, 3):
        for h in range(1, 5):
            tr = simulate_protocol(base.at(g, h))
            assert tr.verified and tr.correct, (g, h)
            assert tr.state_bytes >= 8 * tr.alice_edge_count


def test_state_round_trip():
    algo = StoreEverything()
    s = algo.start(10, 3, 2)
    s.process_edge(0, 1)
    s.process_edge(2, 5)
    r = algo.resume(s.serialize())
    assert (r.n, r.k, r.ell, r.edges) == (10, 3, 2, [(0, 1), (2, 5)])


def test_broken_algorithm_is_caught():
    base = IndexInstance(np.array([[1, 0, 1, 0], [0, 1, 1, 0]]), 1, 1)
    results = [simulate_protocol(base.at(g, h), DropMatrixEdges())
               for g in range(1, 3) for h in range(1, 5)]
    assert not all(tr.correct for tr in results)
    assert all(tr.alice_edge_count > 0 for tr in results)
