import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from rydspec.errors import AmbiguityError, ParameterError
from rydspec.geometry import (AtomArrangement, hexagon_to_antiprism, square_to_diamond,
                              star_to_tetrahedron, tetra_to_square, three_atom_bend)
from rydspec.graphs import BlockadeGraph, blockade_graph, canonical_certificate, classify_graph

RB = 10.0


def edges1(*pairs):
    """Edges given as 1-based two-digit strings, e.g. "12"."""
    return [(int(p[0]) - 1, int(p[1]) - 1) for p in pairs]


class TestBlockadeGraph:
    def test_square(self):
        g = blockade_graph(tetra_to_square(1.0, 8.0), RB)
        assert g.n_edges == 4
        assert classify_graph(g) == "cycle_4"
        assert g.edge_length == pytest.approx(8.0)

    def test_tetrahedron(self):
        g = blockade_graph(star_to_tetrahedron(1.0, 8.0), RB)
        assert g.n_edges == 6
        assert classify_graph(g) == "complete_4"

    def test_chain(self):
        g = blockade_graph(three_atom_bend(180.0, 8.0), RB)
        assert g.sorted_edges() == [(0, 1), (1, 2)]
        assert classify_graph(g) == "path_3"

    @pytest.mark.parametrize("fn, value, tag", [
        (star_to_tetrahedron, 0.0, "star_4"),
        (square_to_diamond, 1.0, "diamond"),
    ])
    def test_table_classes(self, fn, value, tag):
        assert classify_graph(blockade_graph(fn(value, 8.0), RB)) == tag

    def test_degree(self):
        g = blockade_graph(star_to_tetrahedron(0.0, 8.0), RB)
        assert g.degree == (3, 1, 1, 1)
        assert g.neighbors(0) == (1, 2, 3)

    def test_boundary_is_ambiguous(self):
        arr = AtomArrangement(np.array([[0.0, 0, 0], [10.0, 0, 0]]))
        with pytest.raises(AmbiguityError) as info:
            blockade_graph(arr, 10.0)
        assert info.value.pair is not None
        assert blockade_graph(arr, 10.0 * (1 + 1e-6)).n_edges == 1

    def test_mixed_edge_lengths(self):
        # planar hexagon at r_b = 11: neighbours 4.62, alternates 8, opposites 9.24
        g = blockade_graph(hexagon_to_antiprism(0.0, 8.0), 11.0)
        assert g.n_edges == 15
        assert g.edge_length is None

    def test_no_self_loops(self):
        with pytest.raises(ParameterError):
            BlockadeGraph.from_edges(3, [(1, 1)])

    @given(st.floats(min_value=0.0, max_value=1.0), st.floats(min_value=5.0, max_value=20.0),
           st.floats(min_value=0.01, max_value=5.0))
    def test_monotone_in_radius(self, eta, r1, extra):
        arr = tetra_to_square(eta, 8.0)
        try:
            small = blockade_graph(arr, r1)
            large = blockade_graph(arr, r1 + extra)
        except AmbiguityError:
            return
        assert small.edges <= large.edges

    @given(st.lists(st.tuples(st.integers(0, 5), st.integers(0, 5)), max_size=10))
    def test_degree_matches_edges(self, raw):
        edges = {(min(a, b), max(a, b)) for a, b in raw if a != b}
        g = BlockadeGraph.from_edges(6, edges)
        for j in range(6):
            assert g.degree[j] == sum(j in e for e in g.edges)


class TestClassify:
    def test_star(self):
        assert classify_graph(BlockadeGraph.from_edges(4, edges1("12", "13", "14"))) == "star_4"

    def test_diamond(self):
        assert classify_graph(BlockadeGraph.from_edges(4, edges1("12", "23", "34", "14", "13"))) == "diamond"

    def test_triangle(self):
        assert classify_graph(BlockadeGraph.from_edges(3, edges1("12", "23", "13"))) == "complete_3"

    def test_other(self):
        # triangle with a pendant vertex
        tag = classify_graph(BlockadeGraph.from_edges(4, edges1("12", "23", "13", "34")))
        assert tag.startswith("other:4:")

    def test_two_triangles(self):
        g = blockade_graph(hexagon_to_antiprism(12.0, 8.0), 11.0)
        assert classify_graph(g).startswith("other:6:")
        assert g.edge_length == pytest.approx(8.0)

    def test_too_large(self):
        with pytest.raises(ParameterError):
            classify_graph(BlockadeGraph.from_edges(9, []))

    @given(st.sets(st.tuples(st.integers(0, 4), st.integers(0, 4)).filter(lambda e: e[0] < e[1])),
           st.permutations(range(5)))
    def test_relabeling_invariance(self, edges, perm):
        g = BlockadeGraph.from_edges(5, edges)
        h = g.relabeled(list(perm))
        assert classify_graph(h) == classify_graph(g)
        assert canonical_certificate(h) == canonical_certificate(g)
