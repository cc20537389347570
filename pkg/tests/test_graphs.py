"""Graph family builders, surgeries and exports."""

from fractions import Fraction

import numpy as np
import pytest

from hexacarpet import SubdivisionComplex
from hexacarpet.graphs import (
    FamilyError,
    WeightedGraph,
    build_cut_graph,
    build_dual,
    build_hexacarpet,
    build_short_graph,
    build_skeleton,
    cut_edge_vertices,
    cut_path_lengths,
    cut_resistance_formula,
    cut_segments,
    quotient,
    to_dot,
    to_edgelist,
)
from hexacarpet.network import oracle_resistance


@pytest.fixture(scope="module")
def C():
    c = SubdivisionComplex()
    c.ensure_level(4)
    return c


# -- basic families -----------------------------------------------------


def test_skeleton_conductances(C):
    for n in (1, 2, 3):
        G = build_skeleton(C, n)
        assert G.n == C.counts(n)[0]
        assert G.m == C.counts(n)[1]
        for u, v, c in zip(G.us, G.vs, G.cond):
            e = C.edge_index[n][(int(u), int(v))]
            want = Fraction(1, 2) if C.edge_side[n][e] >= 0 else Fraction(1)
            assert c == want


def test_skeleton_terminals(C):
    for n in (1, 2, 3):
        G = build_skeleton(C, n)
        assert len(G.boundary["A"]) == 2 ** (n - 1) + 1
        assert len(G.boundary["B"]) == 2 ** (n - 1) + 1
        assert not (G.boundary["A"] & G.boundary["B"])


def test_dual_level_one_is_six_cycle(C):
    G = build_dual(C, 1)
    assert G.n == 6 and G.m == 6
    assert (G.degrees() == 2).all()
    assert all(c == 1 for c in G.cond)


def test_dual_counts(C):
    for n in (1, 2, 3):
        G = build_dual(C, n)
        boundary_edges = 6 * 2 ** (n - 1)
        assert G.n == 6 ** n
        assert G.m == C.counts(n)[1] - boundary_edges


def test_hexacarpet_counts(C):
    for n in (1, 2, 3):
        G = build_hexacarpet(C, n)
        E = C.counts(n)[1]
        boundary_edges = 6 * 2 ** (n - 1)
        assert G.n == 6 ** n + E
        assert G.m == 2 * E - boundary_edges
        assert all(c == 2 for c in G.cond)
        assert len(G.boundary["A"]) == 2 ** n
        assert len(G.boundary["B"]) == 2 ** n


def test_hexacarpet_reduces_to_dual(C):
    # shorting through every interior degree-2 edge vertex replaces two
    # resistance-1/2 hops with one unit resistor: exactly the dual graph
    for n in (1, 2, 3):
        H = build_hexacarpet(C, n)
        D = build_dual(C, n)
        F = H.meta["tri_count"]
        reduced = set()
        for e, ts in enumerate(C.edge_tris[n]):
            if len(ts) == 2:
                reduced.add((min(ts), max(ts)))
        dual_edges = {
            (int(u), int(v)) for u, v in zip(D.us, D.vs)
        }
        assert reduced == dual_edges
        assert all(c == 1 for c in D.cond)


def test_families_reject_level_zero(C):
    for builder in (build_skeleton, build_dual, build_hexacarpet):
        with pytest.raises(FamilyError):
            builder(C, 0)


# -- WeightedGraph plumbing --------------------------------------------


def test_canonical_edge_order():
    G = WeightedGraph(4, [3, 0, 2], [1, 2, 1], [Fraction(1)] * 3)
    assert list(G.us) == [0, 1, 1]
    assert list(G.vs) == [2, 2, 3]


def test_self_loops_rejected():
    with pytest.raises(FamilyError):
        WeightedGraph(2, [1], [1], [Fraction(1)])


def test_drop_edges():
    G = WeightedGraph(3, [0, 1, 0], [1, 2, 2], [Fraction(k) for k in (1, 2, 3)])
    pos = G.edge_index()[(0, 2)]
    H = G.drop_edges([pos])
    assert H.m == 2
    assert set(H.edge_index()) == {(0, 1), (1, 2)}
    assert H.cond == [Fraction(1), Fraction(2)]


# -- cut surgery --------------------------------------------------------


def test_cut_segment_counts(C):
    for n, want in [(1, 2), (2, 14), (3, 86), (4, 518)]:
        assert len(cut_segments(C, n)) == want


def test_cut_strand_lengths(C):
    assert cut_path_lengths(C, 1) == [2, 4]
    assert cut_path_lengths(C, 2) == [4, 8, 12, 12]
    for n in (1, 2, 3):
        lengths = cut_path_lengths(C, n)
        assert len(lengths) == 2 ** n
        assert sum(lengths) == 6 ** n


def test_cut_resistance_formula(C):
    assert cut_resistance_formula(C, 1) == Fraction(4, 3)
    assert cut_resistance_formula(C, 2) == Fraction(24, 13)
    # independent harmonic sum over the strand inventory
    for n in (1, 2, 3):
        lengths = cut_path_lengths(C, n)
        want = 1 / sum(Fraction(1, l) for l in lengths)
        assert cut_resistance_formula(C, n) == want


def test_cut_graph_matches_formula(C):
    for n in (1, 2):
        G = build_cut_graph(C, n)
        r = oracle_resistance(G)
        assert abs(r.resistance - float(cut_resistance_formula(C, n))) < 1e-10


def test_cut_graph_is_a_subgraph(C):
    n = 2
    H = build_hexacarpet(C, n)
    G = build_cut_graph(C, n)
    F = H.meta["tri_count"]
    hit = {F + e for e in cut_edge_vertices(C, n)}
    removed = sum(
        1 for u, v in zip(H.us, H.vs) if u in hit or v in hit
    )
    assert G.m == H.m - removed
    assert G.n == H.n
    assert set(zip(G.us, G.vs)) <= set(zip(H.us, H.vs))


# -- short surgery ------------------------------------------------------


def test_short_level_one_value(C):
    G = build_short_graph(C, 1)
    r = oracle_resistance(G)
    assert abs(r.resistance - 15 / 16) < 1e-12


def test_short_terminal_classes(C):
    for n in (1, 2, 3):
        G = build_short_graph(C, n)
        assert len(G.boundary["A"]) == 1
        assert len(G.boundary["B"]) == 2


def test_quotient_parallel_sum():
    #   0 -- 1 and 0 -- 2 with 2 and 3; fusing 1 and 2 stacks them
    G = WeightedGraph(
        3, [0, 0], [1, 2], [Fraction(2), Fraction(3)],
        {"A": {0}, "B": {1, 2}},
    )
    H = quotient(G, lambda v: 0 if v == 0 else 1)
    assert H.n == 2 and H.m == 1
    assert H.cond[0] == Fraction(5)


def test_quotient_drops_internal_edges():
    G = WeightedGraph(3, [0, 1], [1, 2], [Fraction(1), Fraction(1)],
                      {"A": {0}, "B": {2}})
    H = quotient(G, lambda v: min(v, 1))
    assert H.n == 2 and H.m == 1


def test_quotient_rejects_terminal_fusion():
    G = WeightedGraph(2, [0], [1], [Fraction(1)], {"A": {0}, "B": {1}})
    with pytest.raises(FamilyError):
        quotient(G, lambda v: 0)


# -- exports ------------------------------------------------------------


def test_edgelist_format(C):
    G = build_hexacarpet(C, 2)
    text = to_edgelist(G)
    lines = text.strip().split("\n")
    headers = [l for l in lines if l.startswith("#boundary")]
    body = [l for l in lines if not l.startswith("#")]
    assert len(headers) == 2
    assert len(body) == G.m == 108
    u, v, c = body[0].split()
    num, den = c.split("/")
    assert int(u) < int(v)
    assert Fraction(int(num), int(den)) == G.cond[0]


def test_dot_format(C):
    G = build_dual(C, 1)
    text = to_dot(G)
    assert text.startswith("graph G {")
    assert text.count(" -- ") == 6
    assert text.count('color="red"') == len(G.boundary["A"])
    assert text.count('color="blue"') == len(G.boundary["B"])
