"""Gate lists, their application to statevectors, and multi-control decompositions."""
from __future__ import annotations

import math
from collections import Counter
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .statevector import (
    Statevector,
    _assert_norm,
    _check_qubits,
    apply_matrix_inplace,
    apply_phase_inplace,
    apply_swap_inplace,
)

_FIXED = {
    "h": np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2),
    "x": np.array([[0, 1], [1, 0]], dtype=complex),
    "y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "z": np.array([[1, 0], [0, -1]], dtype=complex),
}
_SELF_INVERSE = {"h", "x", "y", "z", "swap"}

#: multi-controlled gates with more controls than this use the borrowed-ancilla ladder
RECURSIVE_CONTROL_LIMIT = 8


@dataclass(frozen=True)
class Gate:
    """One gate. ``controls`` holds ``(qubit, polarity)`` pairs.

    Kinds: ``h x y z`` fixed; ``ry(theta)``, ``p(phi)`` (diag(1, e^{i phi}));
    ``u`` (arbitrary 2x2, params = 4 complex entries, row major); ``swap`` on
    two targets; ``gphase(phi)`` with no targets, which becomes a relative
    phase once controlled.
    """

    name: str
    targets: tuple = ()
    controls: tuple = ()
    params: tuple = ()

    @property
    def qubits(self) -> tuple:
        return tuple(self.targets) + tuple(q for q, _ in self.controls)

    @property
    def matrix(self) -> np.ndarray:
        if self.name in _FIXED:
            return _FIXED[self.name]
        if self.name == "ry":
            c, s = math.cos(self.params[0] / 2), math.sin(self.params[0] / 2)
            return np.array([[c, -s], [s, c]], dtype=complex)
        if self.name == "p":
            return np.array([[1, 0], [0, np.exp(1j * self.params[0])]], dtype=complex)
        if self.name == "u":
            return np.array(self.params, dtype=complex).reshape(2, 2)
        raise ValueError(f"gate {self.name!r} has no 2x2 matrix")

    def inverse(self) -> "Gate":
        if self.name in _SELF_INVERSE:
            return self
        if self.name in ("ry", "p", "gphase"):
            return Gate(self.name, self.targets, self.controls, (-self.params[0],))
        if self.name == "u":
            m = self.matrix.conj().T
            return Gate("u", self.targets, self.controls, tuple(m.reshape(-1)))
        raise ValueError(f"cannot invert {self.name!r}")

    def with_controls(self, controls) -> "Gate":
        return Gate(self.name, self.targets, tuple(controls) + self.controls, self.params)

    def apply(self, amps: np.ndarray, n: int):
        if self.name == "swap":
            apply_swap_inplace(amps, n, self.targets[0], self.targets[1], self.controls)
        elif self.name == "gphase":
            apply_phase_inplace(amps, n, np.exp(1j * self.params[0]), self.controls)
        else:
            apply_matrix_inplace(amps, n, self.targets[0], self.matrix, self.controls)

    def to_text(self) -> str:
        name = self.name
        if self.params:
            name += "(" + ",".join(repr(complex(p)) if self.name == "u" else repr(float(p))
                                   for p in self.params) + ")"
        targets = " ".join(str(q) for q in self.targets)
        controls = " ".join(f"{q}:{p}" for q, p in self.controls)
        return f"{name}; {targets}; {controls}".rstrip()

    @classmethod
    def from_text(cls, line: str) -> "Gate":
        parts = [p.strip() for p in line.split(";")]
        parts += [""] * (3 - len(parts))
        head = parts[0]
        params = ()
        if "(" in head:
            head, _, rest = head.partition("(")
            conv = complex if head == "u" else float
            params = tuple(conv(p) for p in rest.rstrip(")").split(","))
        targets = tuple(int(t) for t in parts[1].split())
        controls = tuple(tuple(int(v) for v in c.split(":")) for c in parts[2].split())
        return cls(head, targets, controls, params)


def h(q):
    return Gate("h", (q,))


def x(q, controls=()):
    return Gate("x", (q,), tuple(controls))


def z(q, controls=()):
    return Gate("z", (q,), tuple(controls))


def ry(theta, q, controls=()):
    return Gate("ry", (q,), tuple(controls), (float(theta),))


def phase(phi, q, controls=()):
    return Gate("p", (q,), tuple(controls), (float(phi),))


def swap(q1, q2, controls=()):
    return Gate("swap", (q1, q2), tuple(controls))


def gphase(phi, controls=()):
    return Gate("gphase", (), tuple(controls), (float(phi),))


def unitary(U, q, controls=()):
    U = np.asarray(U, dtype=complex)
    return Gate("u", (q,), tuple(controls), tuple(U.reshape(-1)))


def cnot(c, t):
    return x(t, [(c, 1)])


class Circuit:
    """An ordered gate list over ``num_qubits`` qubits."""

    def __init__(self, num_qubits: int, gates=(), name: str = ""):
        self.num_qubits = num_qubits
        self.gates: list[Gate] = []
        self.name = name
        self.extend(gates)

    def append(self, gate: Gate) -> "Circuit":
        _check_qubits(self.num_qubits, gate.qubits)
        if any(p not in (0, 1) for _, p in gate.controls):
            raise ValueError("control polarity must be 0 or 1")
        self.gates.append(gate)
        return self

    def extend(self, gates) -> "Circuit":
        if isinstance(gates, Circuit):
            gates = gates.gates
        for g in gates:
            self.append(g)
        return self

    def __iadd__(self, other):
        return self.extend(other)

    def __add__(self, other: "Circuit") -> "Circuit":
        out = Circuit(max(self.num_qubits, other.num_qubits), self.gates, self.name)
        return out.extend(other)

    def __len__(self):
        return len(self.gates)

    def __iter__(self):
        return iter(self.gates)

    def inverse(self) -> "Circuit":
        return Circuit(self.num_qubits, [g.inverse() for g in reversed(self.gates)],
                       self.name + "^dag" if self.name else "")

    def controlled(self, controls) -> "Circuit":
        """Every gate with ``controls`` prepended."""
        controls = tuple((int(q), int(p)) for q, p in controls)
        return Circuit(self.num_qubits, [g.with_controls(controls) for g in self.gates], self.name)

    def apply(self, state: Statevector, check_norm: bool = True) -> Statevector:
        if state.num_qubits < self.num_qubits:
            raise ValueError(f"circuit needs {self.num_qubits} qubits, state has {state.num_qubits}")
        amps, n = state.amplitudes, state.num_qubits
        for g in self.gates:
            g.apply(amps, n)
        if check_norm:
            _assert_norm(state)
        return state

    def unitary(self, max_qubits: int = 12) -> np.ndarray:
        """Dense matrix, column ``j`` is the image of basis state ``j``.

        The identity is flattened row-major and each gate acts on the row bits,
        which sit ``n`` qubits above the column bits.
        """
        n = self.num_qubits
        if n > max_qubits:
            raise ValueError(f"dense unitary limited to {max_qubits} qubits")
        flat = np.eye(1 << n, dtype=complex).reshape(-1)
        shifted = remap(self, {q: q + n for q in range(n)}, 2 * n)
        for g in shifted.gates:
            g.apply(flat, 2 * n)
        return flat.reshape(1 << n, 1 << n)

    def counts(self) -> Counter:
        """Gate histogram keyed by ``name`` or ``c<k>-name`` for k controls."""
        return Counter((f"c{len(g.controls)}-" if g.controls else "") + g.name for g in self.gates)

    def to_text(self) -> str:
        header = f"# qubits {self.num_qubits}" + (f" {self.name}" if self.name else "")
        return "\n".join([header] + [g.to_text() for g in self.gates]) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "Circuit":
        lines = text.splitlines()
        head = lines[0].split()
        if head[:2] != ["#", "qubits"]:
            raise ValueError("missing '# qubits n' header")
        circ = cls(int(head[2]), name=" ".join(head[3:]))
        for line in lines[1:]:
            if line.strip() and not line.startswith("#"):
                circ.append(Gate.from_text(line))
        return circ

    def decompose(self, max_controls: int = 1) -> "Circuit":
        """Rewrite multi-controlled gates until none has more than ``max_controls`` controls."""
        out = Circuit(self.num_qubits, name=self.name)
        for g in self.gates:
            out.extend(decompose_gate(g, self.num_qubits, max_controls))
        return out

    def __repr__(self):
        return f"<Circuit {self.name or ''} qubits={self.num_qubits} gates={len(self.gates)}>"


# ---------------------------------------------------------------------------
# multi-controlled decompositions


def _sqrt_unitary(U: np.ndarray) -> np.ndarray:
    V = scipy.linalg.sqrtm(U)
    return np.asarray(V, dtype=complex)


def _open_controls_to_closed(g: Gate):
    """X-conjugation turning every polarity-0 control into a polarity-1 one."""
    flips = [q for q, p in g.controls if p == 0]
    closed = Gate(g.name, g.targets, tuple((q, 1) for q, _ in g.controls), g.params)
    return [x(q) for q in flips], closed


def mcu_recursive(U: np.ndarray, controls: list, target: int) -> list[Gate]:
    """Ancilla-free recursion C^n(U) -> C(V), C^{n-1}X, C(V^dag), C^{n-1}X, C^{n-1}(V).

    ``V`` is a square root of ``U``; controls are closed (polarity 1). Returns
    gates with at most one control.
    """
    if len(controls) <= 1:
        return [unitary(U, target, [(c, 1) for c in controls])]
    V = _sqrt_unitary(U)
    *rest, last = controls
    X = _FIXED["x"]
    gates = [unitary(V, target, [(last, 1)])]
    gates += mcu_recursive(X, rest, last)
    gates += [unitary(V.conj().T, target, [(last, 1)])]
    gates += mcu_recursive(X, rest, last)
    gates += mcu_recursive(V, rest, target)
    return gates


def mcx_borrowed_ladder(controls: list, target: int, borrowed: list) -> list[Gate]:
    """C^n X from 4(n-2) Toffolis using ``n - 2`` borrowed (dirty) ancillas.

    The borrowed qubits are returned to their input state.
    """
    n = len(controls)
    if n <= 2:
        return [x(target, [(c, 1) for c in controls])]
    if len(borrowed) < n - 2:
        raise ValueError(f"need {n - 2} borrowed qubits, got {len(borrowed)}")
    a = list(borrowed[: n - 2]) + [target]

    def tof(j):
        # j = 1 joins the first two controls; j >= 2 chains control j with a[j-2]
        if j == 1:
            return x(a[0], [(controls[0], 1), (controls[1], 1)])
        return x(a[j - 1], [(controls[j], 1), (a[j - 2], 1)])

    order = (list(range(n - 1, 0, -1)) + list(range(2, n))
             + list(range(n - 2, 0, -1)) + list(range(2, n - 1)))
    return [tof(j) for j in order]


def decompose_gate(g: Gate, num_qubits: int, max_controls: int = 1) -> list[Gate]:
    if len(g.controls) <= max_controls:
        return [g]
    pre, closed = _open_controls_to_closed(g)
    ctrls = [q for q, _ in closed.controls]
    if closed.name == "gphase":
        # controlled global phase == phase gate on one control, controlled by the rest
        inner = phase(closed.params[0], ctrls[-1], [(c, 1) for c in ctrls[:-1]])
        body = decompose_gate(inner, num_qubits, max_controls)
    elif closed.name == "swap":
        a, b = closed.targets
        body = [cnot(b, a)]
        body += decompose_gate(x(b, [(a, 1)] + list(closed.controls)), num_qubits, max_controls)
        body += [cnot(b, a)]
    elif closed.name == "x" and len(ctrls) > RECURSIVE_CONTROL_LIMIT:
        used = set(ctrls) | {closed.targets[0]}
        free = [q for q in range(num_qubits) if q not in used]
        if len(free) >= len(ctrls) - 2:
            body = []
            for t in mcx_borrowed_ladder(ctrls, closed.targets[0], free):
                body += decompose_gate(t, num_qubits, max_controls)
        else:
            body = mcu_recursive(closed.matrix, ctrls, closed.targets[0])
    else:
        body = mcu_recursive(closed.matrix, ctrls, closed.targets[0])
    return pre + body + pre


def remap(circuit: Circuit, mapping, num_qubits: int) -> Circuit:
    """Relabel qubit ``q`` as ``mapping[q]`` inside a ``num_qubits`` circuit."""
    out = Circuit(num_qubits, name=circuit.name)
    for g in circuit.gates:
        out.append(Gate(g.name, tuple(mapping[q] for q in g.targets),
                        tuple((mapping[q], p) for q, p in g.controls), g.params))
    return out


def uniformly_controlled_ry(angles, controls: list, target: int, tol: float = 0.0) -> list[Gate]:
    """Multiplexed ``RY(angles[c])`` on ``target`` for control value ``c``.

    ``controls[j]`` carries bit ``j`` of ``c``. Gray-code decomposition into
    ``2**q`` RY and CNOT gates; rotations with ``|theta| <= tol`` are dropped
    and the CNOTs around them cancelled in pairs.
    """
    q = len(controls)
    size = 1 << q
    angles = np.asarray(angles, dtype=float)
    if angles.shape != (size,):
        raise ValueError(f"need {size} angles for {q} controls")
    if q == 0:
        return [ry(angles[0], target)] if abs(angles[0]) > tol else []
    gray = np.arange(size) ^ (np.arange(size) >> 1)
    signs = np.array([[(-1) ** bin(c & g).count("1") for g in gray] for c in range(size)])
    thetas = signs.T @ angles / size
    gates, pending = [], set()
    for i in range(size):
        if abs(thetas[i]) > tol:
            gates += [cnot(controls[j], target) for j in sorted(pending)]
            pending = set()
            gates.append(ry(thetas[i], target))
        flip = int(gray[i] ^ gray[(i + 1) % size]).bit_length() - 1
        pending ^= {flip}
    gates += [cnot(controls[j], target) for j in sorted(pending)]
    return gates
