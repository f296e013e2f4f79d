"""State-preparation circuits: Dicke states, weight encoding, block encoding, edge removal.

Register layout of the prepared state, least significant qubit first::

    dicke[N]  sys1[k] anc1[k+1]  sys2[k] anc2[k+1]  flag[1]

with ``n = ceil(log2 N)``, ``m = ceil(log2 M)`` and ``k = max(n, m)``. Each
edge register ``sys | anc`` is the ``2k + 1`` qubit block the block encoding
acts on. ``sys`` carries the edge label on input and the vertex label on
output; ``anc`` holds the block encoding's row register (low ``k`` qubits) and
its rotation ancilla (top qubit).
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .circuit import Circuit, cnot, h, remap, ry, swap, uniformly_controlled_ry
from .circuit import x as xgate
from .graph import CardinalityError, WeightedGraph, build_incidence, config_index, enumerate_configurations
from .statevector import DEFAULT_QUBIT_CAP, QubitCapError, RegisterLayout, Statevector


def ceil_log2(v: int) -> int:
    return max(0, (int(v) - 1).bit_length())


@dataclass(frozen=True)
class Dimensions:
    """Register sizes derived from the edge count ``N`` and vertex count ``M``."""

    N: int
    M: int

    @property
    def n(self) -> int:
        return ceil_log2(self.N)

    @property
    def m(self) -> int:
        return ceil_log2(self.M)

    @property
    def k(self) -> int:
        return max(self.n, self.m, 1)

    @property
    def K(self) -> int:
        return 1 << self.k

    @property
    def register(self) -> int:
        """Qubits per edge register, ``a_E + n = a_V + m = 2k + 1``."""
        return 2 * self.k + 1

    @property
    def a_E(self) -> int:
        return self.register - self.n

    @property
    def a_V(self) -> int:
        return self.register - self.m


def problem_layout(N: int, M: int, dicke: int | None = None, extra=(), cap: int = DEFAULT_QUBIT_CAP):
    """Layout for the prepared state. ``dicke=0`` drops the configuration register."""
    dims = Dimensions(N, M)
    segs = []
    size = N if dicke is None else dicke
    if size:
        segs.append(("dicke", size))
    segs += [("sys1", dims.k), ("anc1", dims.k + 1), ("sys2", dims.k), ("anc2", dims.k + 1),
             ("flag", 1)]
    segs += list(extra)
    total = sum(s for _, s in segs)
    if total > cap:
        raise QubitCapError(total, cap, f"N={N}, M={M} instance")
    return RegisterLayout(tuple(segs), cap)


# ---------------------------------------------------------------------------
# topology registers


def dicke_prepare(N: int, x: int, qubits=None) -> Circuit:
    """Deterministic split-and-cyclic-shift preparation of ``|D^N_x>`` from ``|0^N>``.

    ``O(N x)`` gates: ``x`` initial X gates, then ``N - 1`` split-and-cyclic-shift
    blocks each made of CNOT / controlled-RY / CNOT triples.
    """
    if not 0 <= x <= N:
        raise ValueError(f"x = {x} outside [0, {N}]")
    circ = Circuit(N, name=f"dicke_{N}_{x}")
    for q in range(N - x, N):
        circ.append(xgate(q))
    if 0 < x < N:
        for high in range(N, x, -1):
            circ.extend(_scs(high, x))
        for high in range(x, 1, -1):
            circ.extend(_scs(high, high - 1))
    if qubits is not None:
        circ = remap(circ, list(qubits), max(qubits) + 1)
    return circ


def _scs(high: int, low: int) -> list:
    """Split-and-cyclic-shift block on qubits ``high - low - 1 .. high - 1`` (0-based)."""
    gates = []
    top = high - 1
    for index in range(high, high - low, -1):
        theta = 2 * math.acos(math.sqrt((high - index + 1) / high))
        a = index - 2
        gates.append(cnot(a, top))
        if index == high:
            gates.append(ry(theta, a, [(top, 1)]))
        else:
            gates.append(ry(theta, a, [(top, 1), (index - 1, 1)]))
        gates.append(cnot(a, top))
    return gates


def hadamard_topology(n: int, qubits=None) -> Circuit:
    """Uniform superposition over all ``2**n`` edge labels."""
    circ = Circuit(n, [h(q) for q in range(n)], name=f"hadamard_{n}")
    if qubits is not None:
        circ = remap(circ, list(qubits), max(qubits) + 1)
    return circ


# ---------------------------------------------------------------------------
# weights


def weight_state_circuit(values, qubits: list, num_qubits: int) -> list:
    """Binary-tree RY preparation of ``sum_i v_i |i> / ||v||`` for nonnegative ``v``.

    ``values`` is zero-padded to ``2**len(qubits)``. The most significant
    qubit is rotated first; each lower qubit is rotated conditioned on the
    bits above it, skipping branches of zero weight.
    """
    nq = len(qubits)
    v = np.zeros(1 << nq)
    values = np.asarray(values, dtype=float)
    if values.size == 0:
        raise ValueError("empty weight vector")
    if values.size > v.size:
        raise ValueError(f"{values.size} weights do not fit {nq} qubits")
    if np.any(values < 0):
        raise ValueError("weights must be nonnegative")
    v[: values.size] = values
    gates = []
    for level in range(nq - 1, -1, -1):
        block = 1 << level
        for prefix in range(1 << (nq - 1 - level)):
            base = prefix * 2 * block
            n0 = np.linalg.norm(v[base:base + block])
            n1 = np.linalg.norm(v[base + block:base + 2 * block])
            if n1 == 0:
                continue
            theta = 2 * math.atan2(n1, n0)
            controls = [(qubits[level + 1 + j], (prefix >> j) & 1) for j in range(nq - 1 - level)]
            gates.append(ry(theta, qubits[level], controls))
    return gates


def amplitude_encode_weights(weights, layout: RegisterLayout) -> Circuit:
    """``U_enc``: ``|0>|0> -> W^{-1/2} sum_i b_i |i>|i>`` on the two edge registers."""
    weights = np.asarray(weights, dtype=float)
    if weights.size == 0:
        raise ValueError("empty weight vector")
    if np.any(weights <= 0):
        raise ValueError("weights must be strictly positive")
    n = ceil_log2(weights.size)
    sys1, sys2 = layout.qubits("sys1"), layout.qubits("sys2")
    if n > len(sys1):
        raise ValueError("edge register too small for the weights")
    circ = Circuit(layout.total, name="U_enc")
    circ.extend(weight_state_circuit(weights, sys1[:n], layout.total))
    circ.extend(cnot(a, b) for a, b in zip(sys1[:n], sys2[:n]))
    return circ


# ---------------------------------------------------------------------------
# block encoding


@dataclass
class BlockEncoding:
    """FABLE-style block encoding of a zero-padded square matrix.

    ``circuit`` acts on ``2k + 1`` local qubits ordered ``sys[k] row[k] anc[1]``;
    ``(<0|_anc <0|_row (x) I) U (|0>_anc |0>_row (x) I) = matrix / alpha``.
    """

    circuit: Circuit
    alpha: float
    matrix: np.ndarray
    k: int
    tol: float = 0.0
    _error: float | None = field(default=None, repr=False)

    @property
    def ancillas(self) -> int:
        return self.k + 1

    def extract_block(self) -> np.ndarray:
        """Top-left block read off the full unitary, column by column."""
        U = self.circuit.unitary(max_qubits=2 * self.k + 1)
        K = 1 << self.k
        return U[:K, :K]

    @property
    def error(self) -> float:
        """Max-norm error of the encoded block against ``matrix / alpha``."""
        if self._error is None:
            self._error = float(np.max(np.abs(self.matrix / self.alpha - self.extract_block())))
        return self._error

    def on(self, qubits, num_qubits: int) -> Circuit:
        """Place the encoding on global ``qubits`` (``sys + row + anc``)."""
        return remap(self.circuit, list(qubits), num_qubits)


def pad_square(A, k: int | None = None) -> np.ndarray:
    A = np.asarray(A, dtype=float)
    if k is None:
        k = max(ceil_log2(max(A.shape)), 1)
    K = 1 << k
    if max(A.shape) > K:
        raise ValueError(f"{A.shape} matrix does not fit {K}x{K}")
    out = np.zeros((K, K))
    out[: A.shape[0], : A.shape[1]] = A
    return out


def block_encode(A, k: int | None = None, tol: float = 0.0, cap: int = DEFAULT_QUBIT_CAP) -> BlockEncoding:
    """Block-encode a real matrix with entries in ``[-1, 1]``; ``alpha = 2**k``.

    Hadamards on the row register, a Gray-code multiplexed RY on the ancilla
    with angle ``2 arccos(A[row, col])``, a register swap, Hadamards again.
    """
    As = pad_square(A, k)
    if np.max(np.abs(As)) > 1 + 1e-12:
        raise ValueError("matrix entries must lie in [-1, 1]")
    k = ceil_log2(As.shape[0])
    if 2 * k + 1 > cap:
        raise QubitCapError(2 * k + 1, cap, "block encoding")
    K = 1 << k
    sys, row, anc = list(range(k)), list(range(k, 2 * k)), 2 * k
    circ = Circuit(2 * k + 1, name="U_E")
    circ.extend(h(q) for q in row)
    # control value c = col + K * row, matching the sys-then-row control order
    angles = 2 * np.arccos(np.clip(As, -1, 1)).reshape(-1)
    circ.extend(uniformly_controlled_ry(angles, sys + row, anc, tol=tol))
    circ.extend(swap(a, b) for a, b in zip(row, sys))
    circ.extend(h(q) for q in row)
    return BlockEncoding(circ, float(K), As, k, tol)


def block_encode_incidence(incidence, k: int | None = None, tol: float = 0.0,
                           cap: int = DEFAULT_QUBIT_CAP) -> BlockEncoding:
    """Block encoding of the incidence matrix padded to ``2**max(n, m)`` square."""
    E = incidence.toarray() if hasattr(incidence, "toarray") else np.asarray(incidence)
    M, N = E.shape
    if k is None:
        k = Dimensions(N, M).k
    return block_encode(E, k, tol, cap)


# ---------------------------------------------------------------------------
# topology-controlled edge removal


def remove_single_edge(topology: list, edge: list, flag: int, num_qubits: int) -> Circuit:
    """``U_rse``: flip ``flag`` exactly when the topology label equals the edge label.

    XOR the topology register into the edge register, flip the flag on the
    all-zero edge pattern, undo the XOR.
    """
    if len(topology) != len(edge):
        raise ValueError("topology and edge registers differ in size")
    circ = Circuit(num_qubits, name="U_rse")
    circ.extend(cnot(t, e) for t, e in zip(topology, edge))
    circ.append(xgate(flag, [(e, 0) for e in edge]))
    circ.extend(cnot(t, e) for t, e in zip(topology, edge))
    return circ


def rme_controls(i: int, dicke: list, edge: list) -> list:
    """Control pattern flagging edge ``i``: ``d_i = 1`` and the edge register equal to ``i``."""
    return [(dicke[i], 1)] + [(q, (i >> b) & 1) for b, q in enumerate(edge)]


def remove_multiple_edges(layout: RegisterLayout, N: int | None = None) -> Circuit:
    """``U_rme``: one multi-controlled X on the flag per real edge ``i < N``."""
    dicke = layout.qubits("dicke")
    N = len(dicke) if N is None else N
    n = ceil_log2(N)
    edge = layout.qubits("sys1")[:n]
    flag = layout.qubit("flag")
    circ = Circuit(layout.total, name="U_rme")
    for i in range(N):
        circ.append(xgate(flag, rme_controls(i, dicke, edge)))
    return circ


def remove_edges_classical(config, layout: RegisterLayout) -> Circuit:
    """``U_rme`` with the configuration register fixed to the basis state ``config``.

    Gates for kept edges vanish and the ``d_i`` control of removed ones is dropped.
    """
    config = np.asarray(config, dtype=int)
    n = ceil_log2(config.size)
    edge = layout.qubits("sys1")[:n]
    flag = layout.qubit("flag")
    circ = Circuit(layout.total, name="U_rme|d")
    for i in np.flatnonzero(config):
        circ.append(xgate(flag, [(q, (int(i) >> b) & 1) for b, q in enumerate(edge)]))
    return circ


# ---------------------------------------------------------------------------
# composed preparation


@dataclass
class PreparedState:
    """``psi_f`` together with what is needed to interpret it.

    ``S`` counts configurations in superposition (1 when the configuration
    register holds a single basis state or is absent), ``W`` is the sum of
    squared weights and ``alpha`` the block encoding's subnormalisation.
    """

    state: Statevector
    graph: WeightedGraph
    x: int
    alpha: float
    S: int
    W: float
    dicke_circuit: Circuit
    cuf: Circuit
    encoding: BlockEncoding
    config: np.ndarray | None = None

    @property
    def layout(self) -> RegisterLayout:
        return self.state.layout

    @property
    def dims(self) -> Dimensions:
        return Dimensions(self.graph.N, self.graph.M)

    @property
    def normalization(self) -> float:
        """``alpha^4 S W``: distance = normalization * success probability."""
        return self.alpha**4 * self.S * self.W

    def ancilla_zero_mask(self) -> tuple[int, int]:
        """``(mask, value)`` selecting ``flag = 1`` with every ``a_V`` ancilla zero.

        The ``a_V`` ancillas are the ``anc`` registers plus the ``sys`` bits at
        or above ``m``.
        """
        return success_mask(self.layout, self.dims.m)

    def success_probabilities(self) -> dict[int, float]:
        """``p(d, 0^{2 a_V}, 1_f)`` keyed by configuration index.

        Every weight-``x`` configuration gets an entry. With the binary edge
        label register (``x = 1``) label ``i`` is reported as configuration
        ``e_i``.
        """
        mask, value = self.ancilla_zero_mask()
        p = self.state.probabilities()
        idx = np.flatnonzero((np.arange(p.size) & mask) == value)
        for reg in ("dicke", "topo"):
            if reg in self.layout:
                sums = np.bincount(self.layout.extract(idx, reg), weights=p[idx],
                                   minlength=1 << self.layout.size(reg))
                if reg == "topo":
                    return {1 << i: float(sums[i]) for i in range(self.graph.N)}
                configs = ([self.config] if self.config is not None
                           else enumerate_configurations(self.graph.N, self.x))
                return {config_index(c): float(sums[config_index(c)]) for c in configs}
        return {config_index(self.config): float(p[idx].sum())}

    def branch(self, d, flag: int = 0) -> np.ndarray:
        """Amplitudes of ``|d>|0^{a_V}, u>|0^{a_V}, w>|flag>`` as a ``K x K`` array ``[u, w]``."""
        L, K = self.layout, self.dims.K
        u, w = np.meshgrid(np.arange(K), np.arange(K), indexing="ij")
        idx = (u << L.offset("sys1")) | (w << L.offset("sys2")) | (flag << L.offset("flag"))
        if "dicke" in L:
            idx |= config_index(d) << L.offset("dicke")
        return self.state.amplitudes[idx]


def success_mask(layout: RegisterLayout, m: int) -> tuple[int, int]:
    mask = 0
    for name in ("anc1", "anc2"):
        mask |= ((1 << layout.size(name)) - 1) << layout.offset(name)
    for name in ("sys1", "sys2"):
        k = layout.size(name)
        mask |= (((1 << k) - 1) ^ ((1 << m) - 1)) << layout.offset(name)
    flag = 1 << layout.offset("flag")
    return mask | flag, flag


def work_qubits(layout: RegisterLayout) -> list[int]:
    return [q for name in ("sys1", "anc1", "sys2", "anc2", "flag") for q in layout.qubits(name)]


def build_cuf(graph: WeightedGraph, layout: RegisterLayout, encoding: BlockEncoding,
              config=None) -> Circuit:
    """``cU_f = (U_E (x) U_E) U_rme U_enc``, controlled by the configuration register.

    With ``config`` given the configuration is treated as a classical input.
    """
    cuf = Circuit(layout.total, name="cU_f")
    cuf.extend(amplitude_encode_weights(graph.b, layout))
    if config is None:
        cuf.extend(remove_multiple_edges(layout, graph.N))
    else:
        cuf.extend(remove_edges_classical(config, layout))
    for s, a in (("sys1", "anc1"), ("sys2", "anc2")):
        cuf.extend(encoding.on(layout.qubits(s) + layout.qubits(a), layout.total))
    return cuf


def prepare_psi_f(graph: WeightedGraph, x: int, config=None, classical_config: bool = False,
                  cap: int = DEFAULT_QUBIT_CAP, extra=(), tol: float = 0.0) -> PreparedState:
    """Prepare ``psi_f`` for removing ``x`` of the graph's edges.

    By default the configuration register holds ``|D^N_x>``. With ``config``
    it holds that single basis state instead; ``classical_config=True`` then
    drops the register altogether and resolves the removal gates classically,
    which saves ``N`` qubits.
    """
    if not 0 <= x <= graph.N:
        raise ValueError(f"x = {x} outside [0, {graph.N}]")
    if config is not None:
        config = np.asarray(config, dtype=np.int8)
        if config.shape != (graph.N,) or int(config.sum()) != x:
            raise CardinalityError(f"configuration must have length {graph.N} and weight {x}")
    elif classical_config:
        raise ValueError("classical_config needs a configuration")
    dims = Dimensions(graph.N, graph.M)
    layout = problem_layout(graph.N, graph.M, dicke=0 if classical_config else None,
                            extra=extra, cap=cap)
    encoding = block_encode_incidence(build_incidence(graph, dense=True), dims.k, tol=tol, cap=cap)

    if classical_config:
        dicke_circ = Circuit(layout.total, name="config")
        cuf = build_cuf(graph, layout, encoding, config)
        S = 1
    else:
        dq = layout.qubits("dicke")
        if config is None:
            dicke_circ = remap(dicke_prepare(graph.N, x), dq, layout.total)
            S = math.comb(graph.N, x)
        else:
            dicke_circ = Circuit(layout.total, [xgate(dq[i]) for i in np.flatnonzero(config)],
                                 name="config")
            S = 1
        cuf = build_cuf(graph, layout, encoding)

    state = Statevector.zero(layout)
    dicke_circ.apply(state)
    cuf.apply(state)
    W = float(np.sum(graph.b**2))
    return PreparedState(state, graph, x, encoding.alpha, S, W, dicke_circ, cuf, encoding, config)


def prepare_psi_f_binary(graph: WeightedGraph, cap: int = DEFAULT_QUBIT_CAP) -> PreparedState:
    """``x = 1`` variant: Hadamard edge-label register and ``U_rse`` instead of Dicke + ``U_rme``.

    The label register spans ``2**n`` values, so ``S`` is ``2**n``; labels at or
    above ``N`` point at zero-weight padding and never contribute.
    """
    dims = Dimensions(graph.N, graph.M)
    layout = problem_layout(graph.N, graph.M, dicke=0, extra=(("topo", dims.n),), cap=cap)
    encoding = block_encode_incidence(build_incidence(graph, dense=True), dims.k, cap=cap)
    topo = layout.qubits("topo")
    prep = remap(hadamard_topology(dims.n), topo, layout.total) if topo else Circuit(layout.total)
    cuf = Circuit(layout.total, name="cU_f")
    cuf.extend(amplitude_encode_weights(graph.b, layout))
    cuf.extend(remove_single_edge(topo, layout.qubits("sys1")[: dims.n], layout.qubit("flag"),
                                  layout.total))
    for s, a in (("sys1", "anc1"), ("sys2", "anc2")):
        cuf.extend(encoding.on(layout.qubits(s) + layout.qubits(a), layout.total))
    state = Statevector.zero(layout)
    prep.apply(state)
    cuf.apply(state)
    W = float(np.sum(graph.b**2))
    return PreparedState(state, graph, 1, encoding.alpha, 1 << dims.n, W, prep, cuf, encoding)
