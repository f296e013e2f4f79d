import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from qsubgraph.graph import (CardinalityError, GraphFormatError, WeightedGraph, all_distances,
                             argmin_bruteforce, build_incidence, build_laplacian, build_q_matrix,
                             builtin_graph, builtin_graphs, config_bits, config_from_index, config_index,
                             configurations, format_graph, frobenius_distance_dense, frobenius_distance_q,
                             frobenius_distance_sparse, generate, parse_graph, quadratic_form_classical,
                             random_graph)

# frozen by hand from the per-vertex formula
KITE_X2 = {"0011": 14.11, "0101": 8.79, "0110": 25.84, "1001": 4.25, "1010": 20.56, "1100": 14.64}


def test_p3_single_removals(p3w):
    # removing one edge of a path leaves 4 b^2
    assert frobenius_distance_dense(p3w, [1, 0]) == pytest.approx(4.0)
    assert frobenius_distance_dense(p3w, [0, 1]) == pytest.approx(36.0)


def test_kite_frozen_values(kite):
    got = {config_bits(d): D for d, D in all_distances(kite, 2)}
    assert got.keys() == KITE_X2.keys()
    for k, v in KITE_X2.items():
        assert got[k] == pytest.approx(v, abs=1e-12)


def test_kite_argmin(kite):
    d, D = argmin_bruteforce(kite, 2)
    assert config_bits(d) == "1001"
    assert D == pytest.approx(4.25)
    d, D = argmin_bruteforce(kite, 1)
    assert config_bits(d) == "0001"
    assert D == pytest.approx(0.25)


def test_incidence_signs():
    g = WeightedGraph.from_edges(3, [(2, 0), (1, 2)])
    E = build_incidence(g, dense=True)
    # oriented low -> high: +1 tail (lower index), -1 head
    np.testing.assert_array_equal(E, [[1, 0], [0, 1], [-1, -1]])
    assert build_incidence(g, dense=False).toarray().tolist() == E.tolist()


def test_laplacian_identity(kite):
    E = build_incidence(kite, dense=True)
    np.testing.assert_allclose(build_laplacian(kite), E @ np.diag(kite.b) @ E.T)
    B = build_laplacian(kite, [1, 0, 0, 1])
    assert np.allclose(B.sum(axis=1), 0)
    assert np.allclose(B, B.T)


def test_q_matrix_diagonal(kite):
    Q = build_q_matrix(kite)
    np.testing.assert_allclose(np.diag(Q), 4 * kite.b**2)
    assert np.allclose(Q, Q.T)


def test_x0_distance_zero(kite):
    (d, D), = all_distances(kite, 0)
    assert D == 0.0 and not d.any()


def test_cardinality_errors(kite):
    with pytest.raises(CardinalityError):
        frobenius_distance_q(kite, [1, 0, 0, 0], x=2)
    with pytest.raises(CardinalityError):
        frobenius_distance_sparse(kite, [1, 0, 2, 0])
    with pytest.raises(CardinalityError):
        frobenius_distance_dense(kite, [1, 0])
    with pytest.raises(ValueError):
        configurations(3, 4)


def test_enumeration_lexicographic():
    cs = [config_bits(d) for d in configurations(4, 2)]
    assert cs == sorted(cs)
    assert len(cs) == 6
    assert sorted(config_index(d) for d in configurations(4, 2)) == [3, 5, 6, 9, 10, 12]
    assert len(configurations(9, 2)) == 36


def test_config_index_roundtrip():
    for i in range(32):
        assert config_index(config_from_index(i, 5)) == i


def test_quadratic_form_classical(p3w):
    assert quadratic_form_classical(p3w, [0, 0], [1, 0, 0]) == pytest.approx(1.0)
    assert quadratic_form_classical(p3w, [0, 0], [1, 1, 1]) == 0.0
    B = build_laplacian(p3w, [0, 1])
    a = np.array([0.3, -1.0, 2.0])
    assert quadratic_form_classical(p3w, [0, 1], a) == pytest.approx(a @ B @ a)


def test_parse_roundtrip(kite):
    g = parse_graph(format_graph(kite))
    assert g == kite


def test_parse_comments_and_orientation():
    g = parse_graph("# a graph\n3 2  # header\n2 1 0.5\n\n0 1 2\n")
    assert g.edges == ((1, 2), (0, 1))
    assert g.weights == (0.5, 2.0)


@pytest.mark.parametrize("text, line", [
    ("3 2\n0 1 1\n1 x 2\n", 3),
    ("3 2\n0 1 1\n1 1 2\n", 3),
    ("3 2\n0 1 1\n1 2 -1\n", 3),
    ("3 2\n0 1 1\n0 1 2\n", 3),
    ("3\n", 1),
    ("3 1\n0 5 1\n", 2),
    ("3 1\n0 1\n", 2),
])
def test_parse_errors_report_line(text, line):
    with pytest.raises(GraphFormatError) as info:
        parse_graph(text)
    assert info.value.line == line
    assert f"line {line}" in str(info.value)


def test_parse_edge_count_mismatch():
    with pytest.raises(GraphFormatError):
        parse_graph("3 3\n0 1 1\n1 2 1\n")


def test_generators():
    assert generate("path:4").N == 3
    assert generate("cycle:5").N == 5
    assert generate("star:6").N == 5
    g = generate("rand:8,11,3")
    assert (g.M, g.N) == (8, 11)
    assert g == random_graph(8, 11, 3)
    with pytest.raises(GraphFormatError):
        generate("wheel:5")
    with pytest.raises(GraphFormatError):
        generate("rand:4,2,0")


def test_large_graph_uses_sparse():
    g = generate("path:80")
    assert hasattr(build_incidence(g), "tocsr")
    d = np.zeros(g.N, dtype=int)
    d[[3, 40]] = 1
    assert frobenius_distance_sparse(g, d) == pytest.approx(frobenius_distance_q(g, d))


def test_builtins_are_connected_enough():
    for g in builtin_graphs().values():
        assert g.N >= 1 and math.isfinite(sum(g.weights))
    with pytest.raises(KeyError):
        builtin_graph("nope")


@st.composite
def graph_and_config(draw):
    M = draw(st.integers(2, 7))
    pairs = [(i, j) for i in range(M) for j in range(i + 1, M)]
    chosen = draw(st.lists(st.sampled_from(pairs), min_size=1, max_size=len(pairs), unique=True))
    weights = draw(st.lists(st.floats(0.05, 5.0), min_size=len(chosen), max_size=len(chosen)))
    g = WeightedGraph.from_edges(M, chosen, weights)
    d = draw(st.lists(st.integers(0, 1), min_size=g.N, max_size=g.N))
    return g, np.array(d)


@settings(max_examples=150, deadline=None)
@given(graph_and_config())
def test_three_distance_oracles_agree(case):
    g, d = case
    dense = frobenius_distance_dense(g, d)
    assert frobenius_distance_q(g, d) == pytest.approx(dense, rel=1e-12, abs=1e-12)
    assert frobenius_distance_sparse(g, d) == pytest.approx(dense, rel=1e-12, abs=1e-12)
    assert dense >= 0


@settings(max_examples=60, deadline=None)
@given(graph_and_config())
def test_distance_monotone_in_removed_set(case):
    g, d = case
    # removing one more edge can only increase the distance (Q is entrywise nonnegative)
    if d.all():
        return
    i = int(np.flatnonzero(d == 0)[0])
    e = d.copy()
    e[i] = 1
    assert frobenius_distance_q(g, e) >= frobenius_distance_q(g, d) - 1e-12
