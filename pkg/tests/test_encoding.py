import math

import numpy as np
import pytest

from qsubgraph.circuit import Circuit
from qsubgraph.encoding import (Dimensions, amplitude_encode_weights, block_encode, block_encode_incidence,
                                dicke_prepare, hadamard_topology, prepare_psi_f, prepare_psi_f_binary,
                                problem_layout, remove_multiple_edges, remove_single_edge)
from qsubgraph.graph import (CardinalityError, build_incidence, builtin_graph, builtin_graphs, config_index,
                             configurations, frobenius_distance_q)
from qsubgraph.statevector import QubitCapError, RegisterLayout, Statevector


def run(circ, layout):
    s = Statevector.zero(layout)
    circ.apply(s)
    return s


def test_dimensions():
    d = Dimensions(N=9, M=9)
    assert (d.n, d.m, d.k, d.K) == (4, 4, 4, 16)
    assert d.n + d.a_E == d.m + d.a_V == 2 * d.k + 1
    assert Dimensions(N=1, M=2).k == 1


def test_dicke_n4_x2_support():
    L = RegisterLayout((("d", 4),))
    s = run(dicke_prepare(4, 2), L)
    support = sorted(int(i) for i in np.flatnonzero(np.abs(s.amplitudes) > 1e-12))
    assert support == [3, 5, 6, 9, 10, 12]
    np.testing.assert_allclose(s.amplitudes[support], 1 / math.sqrt(6), atol=1e-12)


@pytest.mark.parametrize("N,x", [(5, 0), (5, 5), (6, 1), (7, 3), (8, 6)])
def test_dicke_general(N, x):
    L = RegisterLayout((("d", N),))
    s = run(dicke_prepare(N, x), L)
    w = np.array([bin(i).count("1") for i in range(1 << N)])
    np.testing.assert_allclose(s.amplitudes[w == x], 1 / math.sqrt(math.comb(N, x)), atol=1e-10)
    np.testing.assert_allclose(s.amplitudes[w != x], 0, atol=1e-10)


def test_dicke_gate_count_linear_in_nx():
    # x X gates plus a CNOT / controlled-RY / CNOT triple per split-and-shift step
    c = dicke_prepare(10, 3)
    steps = (10 - 3) * 3 + sum(range(1, 3))
    assert len(c) == 3 + 3 * steps


def test_dicke_rejects_bad_weight():
    with pytest.raises(ValueError):
        dicke_prepare(3, 4)


def test_weight_encoding_state():
    g = builtin_graph("grid4")
    L = problem_layout(g.N, g.M)
    s = run(amplitude_encode_weights(g.b, L), L)
    W = float(np.sum(g.b**2))
    for i, b in enumerate(g.b):
        assert s.amplitudes[L.compose(sys1=i, sys2=i)].real == pytest.approx(b / math.sqrt(W), abs=1e-12)
    assert np.sum(np.abs(s.amplitudes) ** 2) == pytest.approx(1.0)


def test_weight_encoding_pads_non_power_of_two():
    g = builtin_graph("triangle")
    L = problem_layout(g.N, g.M)
    s = run(amplitude_encode_weights(g.b, L), L)
    assert abs(s.amplitudes[L.compose(sys1=3, sys2=3)]) < 1e-14
    with pytest.raises(ValueError):
        amplitude_encode_weights([1.0, -2.0], L)


@pytest.mark.parametrize("name", sorted(builtin_graphs()))
def test_block_encoding_of_incidence(name):
    g = builtin_graph(name)
    be = block_encode_incidence(build_incidence(g, dense=True))
    K = Dimensions(g.N, g.M).K
    assert be.alpha == K
    assert be.error < 1e-10
    E = np.zeros((K, K))
    E[: g.M, : g.N] = build_incidence(g, dense=True)
    np.testing.assert_allclose(be.extract_block().real, E / K, atol=1e-10)


def test_block_encoding_general_matrix(rng):
    A = rng.uniform(-1, 1, size=(3, 4))
    be = block_encode(A)
    np.testing.assert_allclose(be.extract_block()[:3, :4], A / 4, atol=1e-12)
    with pytest.raises(ValueError):
        block_encode([[2.0]])


def test_block_encoding_incidence_skips_zero_rotations():
    # entries in {0, 1, -1} leave many Gray-code rotations exactly zero
    be = block_encode_incidence(build_incidence(builtin_graph("cycle4"), dense=True))
    assert be.circuit.counts()["ry"] < 16


def test_block_encoding_compression_tolerance(rng):
    A = 0.5 + 1e-4 * rng.uniform(-1, 1, size=(4, 4))
    exact = block_encode(A)
    loose = block_encode(A, tol=1e-3)
    assert exact.circuit.counts()["ry"] == 16
    assert loose.circuit.counts()["ry"] == 1
    assert exact.error < 1e-12
    assert 0 < loose.error < 1e-3


def test_remove_multiple_edges_flags():
    g = builtin_graph("kite")
    L = problem_layout(g.N, g.M)
    circ = remove_multiple_edges(L, g.N)
    for d in configurations(g.N, 2):
        for i in range(g.N):
            s = Statevector.basis(L, dicke=config_index(d), sys1=i)
            circ.apply(s)
            out = int(np.argmax(np.abs(s.amplitudes)))
            assert L.extract(out, "flag") == d[i]


def test_remove_single_edge_flags():
    L = RegisterLayout((("t", 2), ("e", 2), ("f", 1)))
    circ = remove_single_edge(L.qubits("t"), L.qubits("e"), L.qubit("f"), L.total)
    for t in range(4):
        for e in range(4):
            s = Statevector.basis(L, t=t, e=e)
            circ.apply(s)
            out = int(np.argmax(np.abs(s.amplitudes)))
            assert L.extract(out, "f") == int(t == e)
            assert L.extract(out, "e") == e


def test_hadamard_topology():
    L = RegisterLayout((("t", 3),))
    s = run(hadamard_topology(3), L)
    np.testing.assert_allclose(s.amplitudes, 1 / math.sqrt(8))


@pytest.mark.parametrize("name", ["edge", "p3w", "triangle", "grid4", "kite"])
def test_probability_law(name):
    g = builtin_graph(name)
    for x in range(g.N + 1):
        P = prepare_psi_f(g, x)
        assert P.state.norm() == pytest.approx(1.0, abs=1e-12)
        probs = P.success_probabilities()
        for d in configurations(g.N, x):
            D = frobenius_distance_q(g, d)
            assert probs[config_index(d)] == pytest.approx(D / (P.alpha**4 * P.S * P.W), abs=1e-12)


def test_single_configuration_modes(kite):
    d = np.array([0, 1, 1, 0])
    quantum = prepare_psi_f(kite, 2, config=d)
    classical = prepare_psi_f(kite, 2, config=d, classical_config=True)
    assert classical.layout.total == quantum.layout.total - kite.N
    (p1,), (p2,) = quantum.success_probabilities().values(), classical.success_probabilities().values()
    assert p1 == pytest.approx(p2, abs=1e-14)
    assert p1 * quantum.normalization == pytest.approx(frobenius_distance_q(kite, d))
    with pytest.raises(CardinalityError):
        prepare_psi_f(kite, 1, config=d)
    with pytest.raises(ValueError):
        prepare_psi_f(kite, 2, classical_config=True)


def test_binary_topology_variant(kite):
    P = prepare_psi_f_binary(kite)
    assert P.S == 4
    probs = P.success_probabilities()
    for i in range(kite.N):
        d = np.eye(kite.N, dtype=int)[i]
        assert probs[1 << i] * P.normalization == pytest.approx(frobenius_distance_q(kite, d), abs=1e-10)


def test_cap_error():
    g = builtin_graph("grid9")
    with pytest.raises(QubitCapError) as info:
        prepare_psi_f(g, 2, cap=20)
    assert info.value.required == 28


def test_psi_f_gate_stats(kite):
    P = prepare_psi_f(kite, 2)
    counts = P.cuf.counts()
    # one multi-controlled X per edge in the removal step
    assert counts["c3-x"] == kite.N
    assert isinstance(P.cuf, Circuit)
