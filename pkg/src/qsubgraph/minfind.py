"""Minimum finding over labeled configurations.

Threshold search in the style of Durr and Hoyer: keep a current configuration
``y`` and its label, amplify the branches whose label is strictly below it,
measure, and move the threshold whenever the measured label is lower. The
number of amplification rounds per attempt follows the randomised schedule
of Boyer, Brassard, Hoyer and Tapp for an unknown number of marked items.

Two modes are available.

``full``
    The statevector holds the whole labeled state (configuration, work
    registers, phase register). Marking is the phase version of a reversible
    subtract / copy-borrow / add comparator on the label register, and the
    diffusion is the reflection about the labeled state.
``hybrid``
    Only the configuration register is simulated; each configuration's phase
    ``theta_d`` is computed classically from its exact success probability.
    This reaches instances far beyond the qubit cap.
"""
from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .circuit import Circuit, cnot, x
from .encoding import Dimensions
from .estimation import (DEFAULT_AEPS, LabeledState, branch_success_probability, label_configurations,
                         true_phase)
from .graph import WeightedGraph, config_bits, config_from_index, config_index, configurations, frobenius_distance_q
from .statevector import RegisterLayout, Statevector

LAMBDA = 6 / 5


def step_budget(S: int) -> float:
    """``22.5 sqrt(S) + 1.4 log2(S)**2`` amplification steps."""
    return 22.5 * math.sqrt(S) + 1.4 * math.log2(S) ** 2


# ---------------------------------------------------------------------------
# comparator


def add_constant(qubits: list, c: int, num_qubits: int) -> Circuit:
    """``|v> -> |v + c mod 2**len(qubits)>`` as a cascade of multi-controlled X gates."""
    n = len(qubits)
    c %= 1 << n
    circ = Circuit(num_qubits, name=f"add{c}")
    for j in range(n):
        if (c >> j) & 1:
            # increment the sub-register qubits[j:]
            for l in range(n - 1, j - 1, -1):
                circ.append(x(qubits[l], [(q, 1) for q in qubits[j:l]]))
    return circ


def mark_below_threshold(label: list, borrow: int, marker: int, threshold: int,
                         num_qubits: int) -> Circuit:
    """Flip ``marker`` iff the label register's value is strictly below ``threshold``.

    Subtract ``threshold`` from the label extended by a zero ``borrow`` qubit,
    copy the borrow (the extended sign) onto the marker, add ``threshold``
    back. ``borrow`` returns to zero.
    """
    reg = list(label) + [borrow]
    if not 0 <= threshold <= 1 << len(label):
        raise ValueError("threshold outside the label range")
    circ = Circuit(num_qubits, name=f"lt{threshold}")
    circ += add_constant(reg, -threshold, num_qubits)
    circ.append(cnot(borrow, marker))
    circ += add_constant(reg, threshold, num_qubits)
    return circ


def comparator_table(bits: int, threshold: int) -> np.ndarray:
    """Marker value for each label, read off by running the comparator on basis states."""
    layout = RegisterLayout((("label", bits), ("borrow", 1), ("marker", 1)))
    circ = mark_below_threshold(layout.qubits("label"), layout.qubit("borrow"),
                                layout.qubit("marker"), threshold, layout.total)
    table = np.zeros(1 << bits, dtype=bool)
    for v in range(1 << bits):
        s = Statevector.basis(layout, label=v)
        circ.apply(s)
        out = int(np.argmax(np.abs(s.amplitudes)))
        if layout.extract(out, "borrow") or layout.extract(out, "label") != v:
            raise AssertionError("comparator did not uncompute its ancilla")
        table[v] = bool(layout.extract(out, "marker"))
    return table


# ---------------------------------------------------------------------------
# amplitude amplification


def grover_iterate(amps: np.ndarray, reference: np.ndarray, marked: np.ndarray,
                   iterations: int = 1) -> np.ndarray:
    """Apply ``(2|ref><ref| - I) O`` ``iterations`` times, with ``O`` = -1 on ``marked``.

    ``reference`` is the normalised state prepared by the search's preparation
    circuit, so the reflection about it equals ``A P_0 A^dag`` up to sign.
    """
    phi = amps.copy()
    if iterations == 0:
        return phi
    sign = np.where(marked, -1.0, 1.0)
    for _ in range(iterations):
        phi *= sign
        overlap = np.vdot(reference, phi)
        phi *= -1
        phi += (2 * overlap) * reference
    return phi


def boyer_schedule(S: int, rng: np.random.Generator, lam: float = LAMBDA):
    """Yield Grover iteration counts ``j`` uniform in ``[0, m)`` with ``m <- min(lam m, sqrt S)``."""
    m = 1.0
    cap = math.sqrt(S)
    while True:
        yield int(rng.integers(0, math.ceil(m)))
        m = min(lam * m, cap)


# ---------------------------------------------------------------------------
# search spaces


@dataclass
class LogEntry:
    step: int
    action: str
    iterations: int
    measured: str
    label: float
    accepted: bool


@dataclass
class MinFinderRun:
    """Record of one minimum-finding run.

    ``threshold_history`` lists the labels of successive thresholds; they
    strictly decrease.
    """

    graph: str
    x: int
    seed: int
    mode: str
    S: int
    budget: float
    steps: int = 0
    config: str = ""
    threshold: float = math.nan
    threshold_history: list = field(default_factory=list)
    log: list = field(default_factory=list)
    exhausted: bool = False

    def record(self, action, iterations, measured, label, accepted):
        self.log.append(LogEntry(self.steps, action, int(iterations), measured, float(label), bool(accepted)))

    def to_jsonl(self) -> str:
        return "".join(json.dumps(asdict(e)) + "\n" for e in self.log)


class FullSearchSpace:
    """Labeled statevector together with per-basis-state configuration and label values.

    Only the support of the labeled state is stored: the oracle is diagonal and
    the diffusion reflects about the labeled state, so amplitudes outside its
    support stay exactly zero.
    """

    def __init__(self, labeled: LabeledState, support_tol: float = 0.0):
        L = labeled.layout
        amps = labeled.state.amplitudes
        idx = np.flatnonzero(np.abs(amps) > support_tol)
        self.labeled = labeled
        self.reference = amps[idx] / np.linalg.norm(amps[idx])
        self.configs = L.extract(idx, "dicke").astype(np.int64)
        self.labels = L.extract(idx, "label").astype(np.int32)
        self.label_bits = L.size("label")
        self.N = L.size("dicke")
        self._tables: dict[int, np.ndarray] = {}
        self._reference_cdf = None

    def marked(self, threshold: int) -> np.ndarray:
        if threshold not in self._tables:
            table = comparator_table(self.label_bits, threshold)
            self._tables = {threshold: table[self.labels]}
        return self._tables[threshold]

    def measure(self, phi: np.ndarray | None, rng) -> tuple[int, int]:
        """Sample ``(config, label)``; ``phi=None`` measures the labeled state itself."""
        if phi is None:
            if self._reference_cdf is None:
                self._reference_cdf = np.cumsum(np.abs(self.reference) ** 2)
            cdf = self._reference_cdf
        else:
            cdf = np.cumsum(phi.real**2 + phi.imag**2)
        i = min(int(np.searchsorted(cdf, rng.random() * cdf[-1], side="right")), cdf.size - 1)
        return int(self.configs[i]), int(self.labels[i])

    def threshold_label(self, y: int, rng) -> int:
        """One label sample of ``psi_label^y`` (the labeled state conditioned on ``y``)."""
        sel = self.configs == y
        p = np.abs(self.reference[sel]) ** 2
        return int(rng.choice(self.labels[sel], p=p / p.sum()))


class HybridSearchSpace:
    """Configuration register only, with exact real phases computed classically.

    The register is stored on the support of the Dicke state (the ``S``
    weight-``x`` basis states); the remaining amplitudes are always zero.
    """

    def __init__(self, graph: WeightedGraph, x: int):
        self.N = graph.N
        configs = configurations(graph.N, x)
        alpha = float(Dimensions(graph.N, graph.M).K)
        self.configs = np.array([config_index(d) for d in configs], dtype=np.int64)
        self.labels = np.array([true_phase(branch_success_probability(graph, d, alpha)) for d in configs])
        self.reference = np.full(len(configs), 1 / math.sqrt(len(configs)), dtype=complex)
        self._lookup = dict(zip(self.configs.tolist(), self.labels.tolist()))

    def marked(self, threshold: float) -> np.ndarray:
        return self.labels < threshold

    def measure(self, phi: np.ndarray | None, rng) -> tuple[int, float]:
        p = np.abs(self.reference if phi is None else phi) ** 2
        i = int(rng.choice(p.size, p=p / p.sum()))
        return int(self.configs[i]), float(self.labels[i])

    def threshold_label(self, y: int, rng) -> float:
        return self._lookup[y]


def _bits(index: int, N: int) -> str:
    return config_bits(config_from_index(index, N))


def find_minimum(graph: WeightedGraph, x: int, seed: int = 0, mode: str = "full",
                 a_eps: int = DEFAULT_AEPS, space=None, cap: int | None = None):
    """Search for the weight-``x`` configuration of least distance.

    Parameters
    ----------
    graph, x
        Instance and number of removed edges.
    seed
        Seeds every random choice of the run.
    mode
        ``"full"`` or ``"hybrid"`` (see the module docstring).
    a_eps
        Phase-register size in full mode.
    space
        A prebuilt :class:`FullSearchSpace` or :class:`HybridSearchSpace`;
        lets repeated runs share the labeled state.

    Returns
    -------
    (config, distance, run)
        The final threshold configuration as an int8 array, its classical
        distance, and the :class:`MinFinderRun` log.
    """
    if not 0 <= x <= graph.N:
        raise ValueError(f"x = {x} outside [0, {graph.N}]")
    rng = np.random.default_rng(seed)
    S = math.comb(graph.N, x)
    run = MinFinderRun(graph.name, x, seed, mode, S, step_budget(S) if S > 1 else 0.0)
    all_configs = configurations(graph.N, x)
    y_arr = all_configs[int(rng.integers(S))]
    y = config_index(y_arr)

    if S == 1:
        run.config = config_bits(y_arr)
        run.record("init", 0, run.config, 0.0, True)
        return y_arr, frobenius_distance_q(graph, y_arr), run

    if space is None:
        if mode == "full":
            kw = {} if cap is None else {"cap": cap}
            space = FullSearchSpace(label_configurations(graph, x, a_eps, **kw))
        elif mode == "hybrid":
            space = HybridSearchSpace(graph, x)
        else:
            raise ValueError(f"unknown mode {mode!r}")

    thr = space.threshold_label(y, rng)
    run.threshold_history.append(thr)
    run.record("init", 0, _bits(y, graph.N), thr, True)

    schedule = boyer_schedule(S, rng)
    while True:
        j = next(schedule)
        cost = max(j, 1)
        if run.steps + cost > run.budget:
            run.exhausted = True
            break
        run.steps += cost
        phi = grover_iterate(space.reference, space.reference, space.marked(thr), j) if j else None
        d, lab = space.measure(phi, rng)
        accepted = lab < thr
        run.record("search", j, _bits(d, graph.N), lab, accepted)
        if accepted:
            y, thr = d, lab
            run.threshold_history.append(thr)
            schedule = boyer_schedule(S, rng)

    run.config = _bits(y, graph.N)
    run.threshold = float(thr)
    y_arr = config_from_index(y, graph.N)
    return y_arr, frobenius_distance_q(graph, y_arr), run
