import itertools
import json
import random
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from pwtree.graphs import (
    DisconnectedSubset,
    DuplicateEdge,
    InfiniteDistance,
    LoopEdge,
    NegativeLength,
    UnknownEndpoint,
    build_metric_graph,
    complete_on_clique,
    graph_from_json,
    graph_to_json,
    integer_scale,
    is_connected,
    is_tree,
    minimum_spanning_tree,
    reduce_lengths,
    shortest_path_metric,
)


def triangle(l_ab=1, l_bc=2, l_ac=5):
    return build_metric_graph([0, 1, 2], [(0, 1, l_ab), (1, 2, l_bc), (0, 2, l_ac)])


class TestBuild:
    def test_minimal(self):
        g = build_metric_graph([0, 1], [(0, 1, 1)])
        assert g.n == 2 and g.m == 1
        assert g.length(1, 0) == 1

    def test_loop_rejected(self):
        with pytest.raises(LoopEdge):
            build_metric_graph([0], [(0, 0, 1)])

    def test_duplicate_rejected(self):
        with pytest.raises(DuplicateEdge):
            build_metric_graph([0, 1], [(0, 1, 1), (1, 0, 2)])

    def test_negative_rejected(self):
        with pytest.raises(NegativeLength):
            build_metric_graph([0, 1], [(0, 1, -1)])

    def test_unknown_endpoint(self):
        with pytest.raises(UnknownEndpoint):
            build_metric_graph([0, 1], [(0, 2, 1)])

    def test_nonreduced_triangle_accepted(self):
        # reduction is a separate step, not a construction invariant
        g = triangle()
        assert g.length(0, 2) == 5

    def test_zero_length_allowed(self):
        g = build_metric_graph([0, 1], [(0, 1, 0)])
        assert g.length(0, 1) == 0

    def test_string_rationals(self):
        g = build_metric_graph([0, 1], [(0, 1, "3/4")])
        assert g.length(0, 1) == Fraction(3, 4)


class TestShortestPaths:
    def test_path_sum(self):
        g = build_metric_graph([0, 1, 2], [(0, 1, 1), (1, 2, 1)])
        assert shortest_path_metric(g).dist(0, 2) == 2

    def test_disconnected_is_infinite(self):
        g = build_metric_graph([0, 1], [])
        dm = shortest_path_metric(g)
        assert dm.dist(0, 1) is None
        assert not dm.is_finite(0, 1)

    def test_triangle_shortcut(self):
        assert shortest_path_metric(triangle()).dist(0, 2) == 3

    def test_zero_diagonal(self):
        dm = shortest_path_metric(triangle())
        assert dm.dist(1, 1) == 0


@st.composite
def random_graphs(draw):
    n = draw(st.integers(2, 10))
    possible = list(itertools.combinations(range(n), 2))
    chosen = draw(st.lists(st.sampled_from(possible), unique=True, max_size=len(possible)))
    lengths = draw(
        st.lists(
            st.fractions(min_value=0, max_value=20),
            min_size=len(chosen),
            max_size=len(chosen),
        )
    )
    return build_metric_graph(range(n), [(u, v, l) for (u, v), l in zip(chosen, lengths)])


@given(random_graphs())
@settings(max_examples=60, deadline=None)
def test_metric_axioms(g):
    dm = shortest_path_metric(g)
    verts = g.vertices
    for u in verts:
        assert dm.dist(u, u) == 0
        for v in verts:
            assert dm.dist(u, v) == dm.dist(v, u)
    for u, v, w in itertools.permutations(verts, 3):
        duv, duw, dwv = dm.dist(u, v), dm.dist(u, w), dm.dist(w, v)
        if duw is not None and dwv is not None:
            assert duv is not None and duv <= duw + dwv


@given(random_graphs())
@settings(max_examples=60, deadline=None)
def test_reduce_lengths_properties(g):
    reduced = reduce_lengths(g)
    assert reduced.edge_keys() == g.edge_keys()
    dm_before = shortest_path_metric(g)
    dm_after = shortest_path_metric(reduced)
    for u, v, d in dm_before.pairs():
        assert dm_after.dist(u, v) == d  # distances preserved exactly
    for (u, v) in reduced.edge_keys():
        assert reduced.length(u, v) == dm_after.dist(u, v)
        assert reduced.length(u, v) <= g.length(u, v)
    assert reduce_lengths(reduced) == reduced  # idempotent


def test_reduce_triangle():
    r = reduce_lengths(triangle())
    assert r.length(0, 2) == 3
    assert r.length(0, 1) == 1 and r.length(1, 2) == 2


class TestTreePredicates:
    def test_path_is_tree(self):
        assert is_tree(build_metric_graph([0, 1, 2], [(0, 1, 1), (1, 2, 1)]))

    def test_triangle_is_not(self):
        assert not is_tree(triangle())

    def test_disconnected_is_not(self):
        g = build_metric_graph([0, 1, 2, 3], [(0, 1, 1), (2, 3, 1)])
        assert not is_tree(g)
        assert not is_connected(g)

    def test_single_vertex(self):
        assert is_tree(build_metric_graph([5], []))


class TestMST:
    def test_unit_triangle_tie(self):
        g = build_metric_graph([0, 1, 2], [(0, 1, 1), (1, 2, 1), (0, 2, 1)])
        assert minimum_spanning_tree(g) == ((0, 1), (0, 2))

    def test_weighted_triangle(self):
        assert minimum_spanning_tree(triangle(1, 2, 3)) == ((0, 1), (1, 2))

    def test_single_vertex_subset(self):
        assert minimum_spanning_tree(triangle(), [1]) == ()

    def test_disconnected_subset(self):
        g = build_metric_graph([0, 1, 2], [(0, 1, 1)])
        with pytest.raises(DisconnectedSubset):
            minimum_spanning_tree(g, [0, 2])

    @given(random_graphs())
    @settings(max_examples=40, deadline=None)
    def test_matches_bruteforce(self, g):
        if g.n > 7 or not is_connected(g):
            return
        chosen = minimum_spanning_tree(g)
        total = sum(g.length(*e) for e in chosen)
        spanning = g.with_edges({e: g.length(*e) for e in chosen})
        assert is_tree(spanning)
        best = None
        for combo in itertools.combinations(g.edge_keys(), g.n - 1):
            cand = g.with_edges({e: g.length(*e) for e in combo})
            if is_tree(cand):
                weight = sum(g.length(*e) for e in combo)
                best = weight if best is None else min(best, weight)
        assert total == best


class TestCompleteOnClique:
    def test_square_diagonal(self):
        g = build_metric_graph(
            [0, 1, 2, 3], [(0, 1, 1), (1, 2, 1), (2, 3, 1), (0, 3, 1)]
        )
        filled = complete_on_clique(g, [0, 2])
        assert filled.length(0, 2) == 2

    def test_existing_clique_unchanged(self):
        g = triangle()
        assert complete_on_clique(g, [0, 1, 2]) == g

    def test_cross_component(self):
        g = build_metric_graph([0, 1], [])
        with pytest.raises(InfiniteDistance):
            complete_on_clique(g, [0, 1])


class TestJson:
    def test_round_trip(self):
        g = build_metric_graph([0, 1, 2], [(0, 1, "1/3"), (1, 2, 4)])
        data = graph_to_json(g)
        assert data["edges"] == [[0, 1, "1/3"], [1, 2, 4]]
        assert graph_from_json(json.loads(json.dumps(data))) == g

    def test_integer_scale(self):
        g = build_metric_graph([0, 1, 2], [(0, 1, "1/6"), (1, 2, "3/4")])
        assert integer_scale([g]) == 12
