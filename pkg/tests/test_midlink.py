import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from taiko_search.core import ConflictPresent
from taiko_search.horizontal import orient
from taiko_search.midlink import (
    INFINITE,
    build_middle_link,
    girth,
    girth_at_least,
    girth_of_l_ab,
    half_girth,
    l1_adjacency_sparse,
    l_ab_adjacency,
    midlink_dot,
    shortest_cycle,
    shortest_cycle_via,
    triple_girth_status,
)
from taiko_search.oracle import girth_naive
from tests.conftest import subpartition


def graph(edges):
    adj = {}
    for u, v in edges:
        adj.setdefault(u, []).append(v)
        adj.setdefault(v, []).append(u)
    return adj


K4 = graph([(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
PATH = graph([(1, 2), (2, 3), (3, 4)])
C6 = graph([(1, 2), (2, 3), (3, 4), (4, 5), (5, 6), (6, 1)])


class TestGirth:
    def test_known_graphs(self):
        assert girth(K4) == 3
        assert girth(PATH) == INFINITE
        assert girth(C6) == 6

    def test_caps(self):
        assert girth(K4, cap=3) == INFINITE   # "at least 3"
        assert girth(K4, cap=4) == 3
        assert girth(C6, cap=6) == INFINITE
        assert girth(C6, cap=7) == 6

    def test_girth_at_least(self):
        assert not girth_at_least(K4, 4)
        assert girth_at_least(PATH, 100)
        assert girth_at_least(C6, 6)
        assert not girth_at_least(C6, 7)
        with pytest.raises(ValueError):
            girth_at_least(K4, 2)

    @given(st.integers(min_value=0, max_value=2 ** 21 - 1),
           st.integers(min_value=4, max_value=7))
    @settings(max_examples=120, deadline=None)
    def test_matches_naive_oracle(self, bits, size):
        pairs = list(itertools.combinations(range(size), 2))
        edges = [e for i, e in enumerate(pairs) if bits >> i & 1]
        adj = graph(edges) or {0: []}
        expected = girth_naive(adj)
        assert girth(adj) == expected
        for g in (3, 4, 5, 6, 7):
            assert girth_at_least(adj, g) == (expected >= g)

    def test_shortest_cycle_realizes_girth(self):
        for adj in (K4, C6):
            cyc = shortest_cycle(adj)
            assert cyc[0] == cyc[-1]
            assert len(cyc) - 1 == girth(adj)
            for u, v in zip(cyc, cyc[1:]):
                assert v in adj[u]
        assert shortest_cycle(PATH) is None

    @given(st.integers(min_value=0, max_value=2 ** 21 - 1),
           st.integers(min_value=4, max_value=7))
    @settings(max_examples=60, deadline=None)
    def test_cycle_via_all_edges_is_girth(self, bits, size):
        pairs = list(itertools.combinations(range(size), 2))
        edges = [e for i, e in enumerate(pairs) if bits >> i & 1]
        adj = graph(edges) or {0: []}
        probes = [(u, v) for u in adj for v in adj[u]]
        assert shortest_cycle_via(adj, probes, cap=100) == girth_naive(adj)


class TestMiddleLink:
    def test_example26_shape(self, example26):
        ml = build_middle_link(orient(example26))
        assert ml.n_vertices == 16
        assert ml.n_edges == 24
        assert girth(ml.adjacency) == 6
        assert half_girth(ml.adjacency) == 3

    def test_single_cell_acyclic(self):
        ml = build_middle_link(orient(subpartition(3, 3, [[(1, 1), (2, 2)]])))
        assert girth(ml.adjacency) == INFINITE

    def test_two_cell_y_shape(self):
        # one color class, two middle vertices, six attachments
        p = subpartition(3, 3, [[(1, 1), (2, 2)], [(1, 2), (2, 3)]])
        ml = build_middle_link(orient(p))
        middles = [v for v in ml.adjacency if v[0] == "M"]
        assert len(middles) == 2
        assert ml.n_edges == 6

    def test_conflict_rejected(self):
        sk = orient(subpartition(2, 2, [[(1, 1), (2, 2)], [(1, 2), (2, 1)]]))
        with pytest.raises(ConflictPresent):
            build_middle_link(sk)

    def test_sparse_matches_full(self, example26):
        sk = orient(example26)
        full = build_middle_link(sk).adjacency
        sparse = l1_adjacency_sparse(sk)
        assert {v: set(ns) for v, ns in full.items() if ns} \
            == {v: set(ns) for v, ns in sparse.items()}

    def test_bipartite_even_cycles(self):
        rng = random.Random(3)
        from taiko_search.core import extend, iter_all_two_cells, empty_subpartition
        for _ in range(40):
            p = empty_subpartition(4, 4)
            for _ in range(rng.randrange(1, 5)):
                free = [c for c in iter_all_two_cells(4, 4)
                        if not (p.covers(c[0]) or p.covers(c[1]))]
                if not free:
                    break
                p = extend(p, rng.choice(free))
            sk = orient(p)
            if sk.conflict is not None:
                continue
            g = girth(build_middle_link(sk).adjacency)
            assert g == INFINITE or g % 2 == 0


class TestTripleGirth:
    def test_half_girth_4_infinite_ab(self):
        p = subpartition(4, 4, [[(1, 1), (2, 2)], [(1, 2), (3, 3)],
                                [(2, 1), (4, 4)]])
        status = triple_girth_status(p)
        assert status["girth_ab"] == INFINITE
        assert status["half_girth_l1"] == 4
        assert status["pair44"] and status["satisfied"]

    def test_half_girth_4_triangle_ab_fails(self):
        p = subpartition(4, 4, [[(1, 1), (2, 2)], [(1, 2), (3, 3)],
                                [(2, 1), (4, 3)]])
        status = triple_girth_status(p)
        assert status["girth_ab"] == 3
        assert status["half_girth_l1"] == 4
        assert not status["satisfied"]

    def test_single_cell_all_pairs(self):
        status = triple_girth_status(subpartition(2, 2, [[(1, 1), (2, 2)]]))
        assert status["girth_ab"] == INFINITE
        assert status["half_girth_l1"] == INFINITE
        assert status["pair63"] and status["pair44"] and status["pair36"]

    def test_theorem1_cap_kills_pair36_only_at_three_cells(self):
        two_cell = subpartition(3, 4, [[(1, 1), (2, 2)], [(1, 2), (2, 3)]])
        assert triple_girth_status(two_cell, theorem1_cap=True)["pair36"]
        three_cell = subpartition(4, 6, [[(1, 1), (2, 2)], [(3, 3), (4, 4)],
                                         [(1, 5), (2, 6)]])
        capped = triple_girth_status(three_cell, theorem1_cap=True)
        uncapped = triple_girth_status(three_cell, theorem1_cap=False)
        assert not capped["pair36"]
        assert uncapped["pair36"]  # all girths infinite here

    def test_girth_ab_is_min_of_sides(self, example26):
        sk = orient(example26)
        assert girth_of_l_ab(sk) == 3
        on_a = {v: ns for v, ns in l_ab_adjacency(sk).items() if v[0] == "A"}
        on_b = {v: ns for v, ns in l_ab_adjacency(sk).items() if v[0] == "B"}
        assert girth_of_l_ab(sk) == min(girth(on_a), girth(on_b))


def test_midlink_dot(example26):
    dot = midlink_dot(build_middle_link(orient(example26)))
    assert dot.count(" -- ") == 24
    for i in range(4):
        assert f"c{i}_in" in dot and f"c{i}_out" in dot


def test_triple_girth_rejects_conflicts():
    p = subpartition(2, 2, [[(1, 1), (2, 2)], [(1, 2), (2, 1)]])
    with pytest.raises(ConflictPresent):
        triple_girth_status(p)


def test_girth_monotone_under_extension(example26):
    # girth of the horizontal graphs and the middle link can only drop as
    # cells are added
    from taiko_search.core import from_cells, Parity
    prev_ab, prev_l1 = INFINITE, INFINITE
    for k in range(1, len(example26.cells) + 1):
        p = from_cells(4, 4, Parity.EVEN, example26.cells[:k])
        sk = orient(p)
        g_ab = girth_of_l_ab(sk)
        g_l1 = girth(build_middle_link(sk).adjacency)
        assert g_ab <= prev_ab
        assert g_l1 <= prev_l1
        prev_ab, prev_l1 = g_ab, g_l1
