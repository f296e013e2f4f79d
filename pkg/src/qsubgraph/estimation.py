"""Amplitude estimation: write each configuration's distance label into a phase register.

The Grover-type operator ``cQ = -cU_f P_0 cU_f^dag P_s`` is block diagonal in
the configuration register. On the block of configuration ``d`` its two
relevant eigenvalues are ``exp(+-i theta_d)`` with
``theta_d = 2 arcsin sqrt(q_d)``, where ``q_d`` is the probability that the
``d`` branch of the prepared state lands on the success pattern (flag 1, all
vertex ancillas 0). Phase estimation of ``cQ`` therefore labels each
configuration with a fixed-point approximation of ``theta_d``, a strictly
increasing function of its distance.

Phase register convention: ``a_eps`` qubits read as a two's-complement integer
``k`` stand for ``theta = 2 pi k / 2**a_eps``. After the sign-magnitude
conversion the top qubit (segment ``sign``) holds the sign and the remaining
``a_eps - 1`` qubits (segment ``label``) hold ``|k|``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, cnot, gphase, h, phase, swap, x, z
from .encoding import Dimensions, PreparedState, prepare_psi_f, problem_layout, work_qubits
from .graph import CardinalityError, WeightedGraph, config_index, frobenius_distance_q
from .statevector import QubitCapError, RegisterLayout, Statevector

DEFAULT_AEPS = 6


# ---------------------------------------------------------------------------
# reflections and the Grover-type operator


def vertex_ancillas(layout: RegisterLayout, m: int) -> list[int]:
    """The ``2 a_V`` qubits that must read 0 on a successful branch."""
    qs = []
    for s, a in (("sys1", "anc1"), ("sys2", "anc2")):
        qs += layout.qubits(s)[m:] + layout.qubits(a)
    return sorted(qs)


def build_success_reflection(layout: RegisterLayout, m: int) -> Circuit:
    """``P_s``: phase -1 on ``|1>_f |0^{2 a_V}>``, identity elsewhere."""
    controls = [(q, 0) for q in vertex_ancillas(layout, m)]
    return Circuit(layout.total, [z(layout.qubit("flag"), controls)], name="P_s")


def build_zero_reflection(layout: RegisterLayout) -> Circuit:
    """``P_0``: phase -1 on the all-zero work register, identity elsewhere."""
    work = work_qubits(layout)
    target, rest = work[-1], work[:-1]
    return Circuit(layout.total, [x(target), z(target, [(q, 0) for q in rest]), x(target)],
                   name="P_0")


def build_cQ(cuf: Circuit, layout: RegisterLayout, m: int) -> Circuit:
    """``cQ = -cU_f P_0 cU_f^dag P_s`` (gates listed in application order).

    The explicit ``gphase(pi)`` matters: once ``cQ`` is controlled by a phase
    qubit the sign becomes a relative phase.
    """
    circ = Circuit(layout.total, name="cQ")
    circ += build_success_reflection(layout, m)
    circ += cuf.inverse()
    circ += build_zero_reflection(layout)
    circ += cuf
    circ.append(gphase(math.pi))
    return circ


def q_block(prepared: PreparedState) -> tuple[Circuit, RegisterLayout]:
    """``cQ`` built for a prepared state (convenience wrapper)."""
    return build_cQ(prepared.cuf, prepared.layout, prepared.dims.m), prepared.layout


# ---------------------------------------------------------------------------
# Fourier transform and sign-magnitude conversion


def qft(qubits: list, num_qubits: int, inverse: bool = False) -> Circuit:
    """``|p> -> 2^{-a/2} sum_k exp(2 pi i p k / 2^a) |k>`` with ``qubits[j]`` = bit ``j``."""
    a = len(qubits)
    circ = Circuit(num_qubits, name="QFT")
    for j in range(a - 1, -1, -1):
        circ.append(h(qubits[j]))
        for l in range(j - 1, -1, -1):
            circ.append(phase(math.pi / (1 << (j - l)), qubits[j], [(qubits[l], 1)]))
    for j in range(a // 2):
        circ.append(swap(qubits[j], qubits[a - 1 - j]))
    if inverse:
        circ = circ.inverse()
        circ.name = "QFT^dag"
    return circ


def twos_complement_to_sign_magnitude(qubits: list, num_qubits: int) -> Circuit:
    """Map a two's-complement register to sign (top qubit) and magnitude.

    Controlled on the sign qubit: decrement the magnitude bits (giving the
    one's complement), then flip them. ``1101 -> 1011``; nonnegative values
    are untouched. The map is a permutation of basis states.
    """
    if len(qubits) < 2:
        raise ValueError("sign-magnitude conversion needs at least 2 qubits")
    sign, mag = qubits[-1], list(qubits[:-1])
    circ = Circuit(num_qubits, name="tc2sm")
    for l in range(len(mag) - 1, -1, -1):
        circ.append(x(mag[l], [(sign, 1)] + [(q, 0) for q in mag[:l]]))
    circ.extend(cnot(sign, q) for q in mag)
    return circ


def sign_magnitude_value(k: int, a: int) -> tuple[int, int]:
    """Classical reference: ``(sign, magnitude)`` of the ``a``-bit two's-complement ``k``."""
    k %= 1 << a
    if k >> (a - 1):
        mag = ((1 << a) - k) % (1 << (a - 1))
        return 1, mag
    return 0, k


# ---------------------------------------------------------------------------
# phase estimation


def true_phase(q) -> np.ndarray:
    """``2 arcsin sqrt(q)``."""
    return 2 * np.arcsin(np.sqrt(np.clip(q, 0.0, 1.0)))


def branch_success_probability(graph: WeightedGraph, d, alpha: float | None = None) -> float:
    """Per-branch success probability ``q_d = D / (alpha^4 W)`` (no ``1/S`` factor)."""
    if alpha is None:
        alpha = float(Dimensions(graph.N, graph.M).K)
    return frobenius_distance_q(graph, d) / (alpha**4 * float(np.sum(graph.b**2)))


@dataclass
class LabeledState:
    """State after phase estimation and sign-magnitude conversion.

    ``state.layout`` ends with the segments ``label`` (``a_eps - 1`` qubits)
    and ``sign``.
    """

    state: Statevector
    prepared: PreparedState
    a_eps: int

    @property
    def layout(self) -> RegisterLayout:
        return self.state.layout

    @property
    def lsb(self) -> float:
        """Phase represented by one label unit."""
        return 2 * math.pi / (1 << self.a_eps)

    def true_label(self, d) -> float:
        """Exact ``theta_d`` in label units."""
        q = branch_success_probability(self.prepared.graph, d, self.prepared.alpha)
        return float(true_phase(q)) / self.lsb

    def label_distribution(self, d=None) -> np.ndarray:
        """Joint probabilities over magnitude labels, for one configuration or summed."""
        p = self.state.probabilities()
        labels = self.layout.extract(np.arange(p.size), "label")
        if d is not None and "dicke" in self.layout:
            keep = self.layout.extract(np.arange(p.size), "dicke") == config_index(d)
            p = np.where(keep, p, 0.0)
        return np.bincount(labels, weights=p, minlength=1 << self.layout.size("label"))

    def config_label_table(self) -> np.ndarray:
        """``P[dicke, label]`` marginal; a single row when there is no configuration register."""
        names = ["dicke", "label"] if "dicke" in self.layout else ["label"]
        table = self.state.marginal(names)
        return table.reshape(-1, 1 << self.layout.size("label"))

    def mass_within(self, d, width: float = 1.0) -> float:
        """Fraction of the ``d`` branch whose label is within ``width`` units of the true one."""
        dist = self.label_distribution(d)
        total = dist.sum()
        if total == 0:
            return 0.0
        near = np.abs(np.arange(dist.size) - self.true_label(d)) <= width + 1e-12
        return float(dist[near].sum() / total)

    def condition(self, d) -> "LabeledState":
        """Restrict to the configuration register in state ``d`` and renormalise."""
        L = self.layout
        keep = L.extract(np.arange(1 << L.total), "dicke") == config_index(d)
        amps = np.where(keep, self.state.amplitudes, 0)
        norm = np.linalg.norm(amps)
        if norm == 0:
            raise ValueError("configuration has no amplitude in this state")
        return LabeledState(Statevector(amps / norm, L), self.prepared, self.a_eps)


def qpe_layout(layout: RegisterLayout, a_eps: int) -> RegisterLayout:
    if a_eps < 2:
        raise ValueError("a_eps must be at least 2")
    total = layout.total + a_eps
    if total > layout.cap:
        raise QubitCapError(total, layout.cap, f"phase estimation with a_eps={a_eps}")
    return layout.extended(("label", a_eps - 1), ("sign", 1))


def qpe_circuit(cq: Circuit, layout: RegisterLayout) -> Circuit:
    """Gate-level phase estimation on the ``label + sign`` register of ``layout``."""
    ph = layout.qubits("label") + layout.qubits("sign")
    circ = Circuit(layout.total, name="QPE")
    circ.extend(h(q) for q in ph)
    lifted = Circuit(layout.total, cq.gates)
    for j, q in enumerate(ph):
        ctl = lifted.controlled([(q, 1)])
        for _ in range(1 << j):
            circ += ctl
    circ += qft(ph, layout.total, inverse=True)
    return circ


def phase_estimate(prepared: PreparedState, a_eps: int = DEFAULT_AEPS, method: str = "power") -> LabeledState:
    """Label every branch of ``prepared`` with its phase, then convert to sign-magnitude.

    ``method="circuit"`` simulates the gate-level circuit (Hadamards, controlled
    powers of ``cQ``, inverse QFT). ``method="power"`` produces the same state
    by applying ``cQ`` repeatedly to the unextended register, stacking
    ``cQ^p |psi>`` along the phase axis and applying the inverse Fourier
    transform there. That costs ``2**a_eps - 1`` applications of ``cQ`` on
    ``a_eps`` fewer qubits.
    """
    layout = qpe_layout(prepared.layout, a_eps)
    cq = build_cQ(prepared.cuf, prepared.layout, prepared.dims.m)
    if method == "circuit":
        base = np.zeros((1 << a_eps, 1 << prepared.layout.total), dtype=complex)
        base[0] = prepared.state.amplitudes
        state = Statevector(base.reshape(-1), layout)
        qpe_circuit(cq, layout).apply(state)
    elif method == "power":
        P = 1 << a_eps
        stack = np.empty((P, 1 << prepared.layout.total), dtype=complex)
        v = prepared.state.copy()
        for p in range(P):
            stack[p] = v.amplitudes
            if p + 1 < P:
                cq.apply(v, check_norm=False)
        # inverse QFT on the phase axis: sum_p exp(-2 pi i p k / P) v_p / sqrt(P), and
        # the 1/sqrt(P) from the initial Hadamards
        stack = np.fft.fft(stack, axis=0) / P
        state = Statevector(stack.reshape(-1), layout)
    else:
        raise ValueError(f"unknown method {method!r}")
    ph = layout.qubits("label") + layout.qubits("sign")
    twos_complement_to_sign_magnitude(ph, layout.total).apply(state)
    return LabeledState(state, prepared, a_eps)


def label_configurations(graph: WeightedGraph, x: int, a_eps: int = DEFAULT_AEPS,
                         cap: int | None = None, method: str = "power") -> LabeledState:
    """``psi_label``: Dicke superposition, ``cU_f``, phase estimation, conversion."""
    kw = {} if cap is None else {"cap": cap}
    qpe_layout(problem_layout(graph.N, graph.M, **kw), a_eps)  # fail before allocating
    prepared = prepare_psi_f(graph, x, **kw)
    return phase_estimate(prepared, a_eps, method)


def label_single_config(y, graph: WeightedGraph, a_eps: int = DEFAULT_AEPS, cap: int | None = None,
                        method: str = "power", x: int | None = None) -> LabeledState:
    """``psi_label^y``: the same pipeline with the configuration register set to ``|y>``.

    Raises :class:`CardinalityError` when ``x`` is given and ``y`` does not
    remove exactly ``x`` edges.
    """
    y = np.asarray(y, dtype=np.int8)
    if x is not None and int(y.sum()) != x:
        raise CardinalityError(f"configuration removes {int(y.sum())} edges, expected {x}")
    kw = {} if cap is None else {"cap": cap}
    prepared = prepare_psi_f(graph, int(y.sum()), config=y, **kw)
    return phase_estimate(prepared, a_eps, method)
