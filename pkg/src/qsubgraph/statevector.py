"""Dense statevector engine over a named multi-register layout.

Qubit ``q`` is bit ``q`` of the basis index (little-endian). Segments of a
:class:`RegisterLayout` are concatenated from the least significant qubit up,
and each segment is little-endian in its own right.

Gate kernels update the amplitude array in place. A gate touching qubits
``q_1 > q_2 > ...`` is applied through a reshaped view of the array in which
each touched qubit owns an axis of length two and the untouched runs between
them are merged into single axes, so numpy sweeps long contiguous strides.
"""
from __future__ import annotations

import struct
from collections import Counter
from dataclasses import dataclass, field
from typing import Iterable, Mapping

import numpy as np

# 2**25 complex128 amplitudes take 512 MiB; larger states do not fit desk machines
DEFAULT_QUBIT_CAP = 25
NORM_TOL = 1e-10
UNITARY_TOL = 1e-12

_DUMP_MAGIC = b"QSVEC\x00\x01\x00"


class QubitCapError(RuntimeError):
    """The requested layout needs more qubits than the simulation cap allows."""

    def __init__(self, required: int, available: int, what: str = "layout"):
        self.required = required
        self.available = available
        self.what = what
        super().__init__(f"{what}: needs {required} qubits, simulation cap is {available}")


class PostselectionError(ValueError):
    """The requested outcome has zero probability."""


@dataclass(frozen=True)
class RegisterLayout:
    """Ordered named segments of qubits."""

    segments: tuple[tuple[str, int], ...]
    cap: int = DEFAULT_QUBIT_CAP
    _offsets: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        offsets, pos = {}, 0
        for name, size in self.segments:
            if name in offsets:
                raise ValueError(f"duplicate segment {name!r}")
            if size < 0:
                raise ValueError(f"segment {name!r} has negative size")
            offsets[name] = pos
            pos += size
        object.__setattr__(self, "_offsets", offsets)
        if pos > self.cap:
            raise QubitCapError(pos, self.cap)

    @property
    def total(self) -> int:
        return sum(size for _, size in self.segments)

    @property
    def names(self) -> list[str]:
        return [name for name, _ in self.segments]

    def __contains__(self, name) -> bool:
        return name in self._offsets

    def size(self, name: str) -> int:
        return dict(self.segments)[name]

    def offset(self, name: str) -> int:
        return self._offsets[name]

    def qubits(self, name: str) -> list[int]:
        start = self._offsets[name]
        return list(range(start, start + self.size(name)))

    def qubit(self, name: str, i: int = 0) -> int:
        if not 0 <= i < self.size(name):
            raise IndexError(f"qubit {i} outside segment {name!r}")
        return self._offsets[name] + i

    def extract(self, index, name: str):
        """Value of segment ``name`` in basis index (or index array) ``index``."""
        return (index >> self._offsets[name]) & ((1 << self.size(name)) - 1)

    def compose(self, **values: int) -> int:
        """Basis index with the given per-segment values and zeros elsewhere."""
        index = 0
        for name, value in values.items():
            if not 0 <= value < (1 << self.size(name)):
                raise ValueError(f"value {value} does not fit segment {name!r}")
            index |= value << self._offsets[name]
        return index

    def without(self, names: Iterable[str]) -> "RegisterLayout":
        names = set(names)
        return RegisterLayout(tuple(s for s in self.segments if s[0] not in names), self.cap)

    def extended(self, *segments: tuple[str, int]) -> "RegisterLayout":
        return RegisterLayout(self.segments + tuple(segments), self.cap)

    def describe(self) -> str:
        return " ".join(f"{name}[{size}]" for name, size in self.segments)


class Statevector:
    """Complex amplitudes over a :class:`RegisterLayout`. Mutated in place by gates."""

    def __init__(self, amplitudes, layout: RegisterLayout):
        amps = np.asarray(amplitudes, dtype=np.complex128)
        if amps.shape != (1 << layout.total,):
            raise ValueError(f"expected {1 << layout.total} amplitudes, got {amps.shape}")
        self.amplitudes = amps
        self.layout = layout

    @classmethod
    def zero(cls, layout: RegisterLayout) -> "Statevector":
        return cls.basis(layout, 0)

    @classmethod
    def basis(cls, layout: RegisterLayout, index: int = 0, **values: int) -> "Statevector":
        amps = np.zeros(1 << layout.total, dtype=np.complex128)
        amps[index | layout.compose(**values)] = 1.0
        return cls(amps, layout)

    @property
    def num_qubits(self) -> int:
        return self.layout.total

    def copy(self) -> "Statevector":
        return Statevector(self.amplitudes.copy(), self.layout)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def marginal(self, names: Iterable[str]) -> np.ndarray:
        """Joint distribution of the named segments.

        The result has one axis per name, in the order given, each of length
        ``2**size``.
        """
        names = list(names)
        tensor = self.probabilities().reshape([1 << s for _, s in reversed(self.layout.segments)])
        order = [n for n, _ in reversed(self.layout.segments)]
        keep = [order.index(n) for n in names]
        drop = tuple(i for i in range(len(order)) if i not in keep)
        reduced = tensor.sum(axis=drop) if drop else tensor
        remaining = [i for i in range(len(order)) if i in keep]
        return np.transpose(reduced, [remaining.index(k) for k in keep])

    def __repr__(self):
        return f"<Statevector {self.layout.describe()}>"


# ---------------------------------------------------------------------------
# kernels


def _split_view(amps: np.ndarray, n: int, qubits: Iterable[int]):
    """View of ``amps`` with one length-2 axis per qubit in ``qubits``.

    Returns the view and a dict qubit -> axis.
    """
    qs = sorted(set(qubits), reverse=True)
    shape, axes, hi = [], {}, n
    for q in qs:
        run = hi - q - 1
        if run:
            shape.append(1 << run)
        axes[q] = len(shape)
        shape.append(2)
        hi = q
    if hi:
        shape.append(1 << hi)
    return amps.reshape(shape), axes


def _check_qubits(n: int, qubits):
    qubits = list(qubits)
    if len(set(qubits)) != len(qubits):
        raise ValueError(f"qubit collision in {qubits}")
    for q in qubits:
        if not 0 <= q < n:
            raise IndexError(f"qubit {q} outside 0..{n - 1}")


def _control_index(ndim, axes, controls):
    idx = [slice(None)] * ndim
    for q, pol in controls:
        idx[axes[q]] = pol
    return idx


def apply_matrix_inplace(amps: np.ndarray, n: int, target: int, U: np.ndarray, controls=()):
    """Apply the 2x2 matrix ``U`` to ``target`` on the subspace matching ``controls``.

    ``controls`` is a sequence of ``(qubit, polarity)`` pairs. No validation.
    """
    view, axes = _split_view(amps, n, [target] + [q for q, _ in controls])
    idx = _control_index(view.ndim, axes, controls)
    idx0, idx1 = list(idx), list(idx)
    idx0[axes[target]] = 0
    idx1[axes[target]] = 1
    a0, a1 = view[(*idx0, ...)], view[(*idx1, ...)]
    u00, u01, u10, u11 = U[0, 0], U[0, 1], U[1, 0], U[1, 1]
    if u01 == 0 and u10 == 0:
        if u00 != 1:
            a0 *= u00
        if u11 != 1:
            a1 *= u11
    elif u00 == 0 and u11 == 0:
        tmp = a0.copy()
        a0[...] = a1
        if u01 != 1:
            a0 *= u01
        a1[...] = tmp
        if u10 != 1:
            a1 *= u10
    else:
        tmp = a0.copy()
        a0 *= u00
        a0 += u01 * a1
        a1 *= u11
        a1 += u10 * tmp


def apply_swap_inplace(amps: np.ndarray, n: int, q1: int, q2: int, controls=()):
    view, axes = _split_view(amps, n, [q1, q2] + [q for q, _ in controls])
    idx = _control_index(view.ndim, axes, controls)
    i01, i10 = list(idx), list(idx)
    i01[axes[q1]], i01[axes[q2]] = 0, 1
    i10[axes[q1]], i10[axes[q2]] = 1, 0
    a, b = view[(*i01, ...)], view[(*i10, ...)]
    tmp = a.copy()
    a[...] = b
    b[...] = tmp


def apply_phase_inplace(amps: np.ndarray, n: int, phase: complex, controls=()):
    """Multiply the subspace matching ``controls`` by ``phase`` (global phase if none)."""
    if not controls:
        amps *= phase
        return
    view, axes = _split_view(amps, n, [q for q, _ in controls])
    view[(*_control_index(view.ndim, axes, controls), ...)] *= phase


def _assert_norm(state: Statevector):
    if __debug__:
        nrm = state.norm()
        if abs(nrm - 1.0) > NORM_TOL:
            raise AssertionError(f"norm drifted to {nrm!r}")


def is_unitary(U, tol: float = UNITARY_TOL) -> bool:
    U = np.asarray(U, dtype=complex)
    return U.shape[0] == U.shape[1] and np.allclose(U.conj().T @ U, np.eye(U.shape[0]), atol=tol, rtol=0)


def apply_single_qubit(state: Statevector, qubit: int, U) -> Statevector:
    """Apply a 2x2 unitary to one qubit in place and return the state."""
    U = np.asarray(U, dtype=complex)
    if U.shape != (2, 2) or not is_unitary(U):
        raise ValueError("gate matrix is not a 2x2 unitary")
    _check_qubits(state.num_qubits, [qubit])
    apply_matrix_inplace(state.amplitudes, state.num_qubits, qubit, U)
    _assert_norm(state)
    return state


_NAMED = {
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


def apply_multi_controlled(state: Statevector, controls, target: int, op="X") -> Statevector:
    """Apply ``op`` (``"X"``, ``"Z"`` or a 2x2 unitary) to ``target`` when all controls match.

    ``controls`` holds ``(qubit, polarity)`` pairs; polarity 0 is an open control.
    """
    U = _NAMED[op] if isinstance(op, str) else np.asarray(op, dtype=complex)
    if U.shape != (2, 2) or not is_unitary(U):
        raise ValueError("target operation is not a 2x2 unitary")
    controls = [(int(q), int(p)) for q, p in controls]
    if any(p not in (0, 1) for _, p in controls):
        raise ValueError("control polarity must be 0 or 1")
    _check_qubits(state.num_qubits, [target] + [q for q, _ in controls])
    apply_matrix_inplace(state.amplitudes, state.num_qubits, target, U, controls)
    _assert_norm(state)
    return state


# ---------------------------------------------------------------------------
# measurement


@dataclass
class SampleHistogram:
    """Counts of measured basis indices.

    ``counts`` maps basis index to count. In infinite-shot mode the counts are
    exact probabilities and ``total`` is 1.0.
    """

    counts: dict
    total: float
    layout: RegisterLayout
    seed: int | None = None

    def __post_init__(self):
        s = sum(self.counts.values())
        if not np.isclose(s, self.total, rtol=1e-12, atol=1e-12):
            raise ValueError(f"counts sum to {s}, expected {self.total}")

    @property
    def exact(self) -> bool:
        return self.seed is None

    def segment_counts(self, *names: str) -> Counter:
        """Counts keyed by the tuple of the named segments' values."""
        out = Counter()
        for index, c in self.counts.items():
            out[tuple(self.layout.extract(index, n) for n in names)] += c
        return out


def measure_all(state: Statevector, shots: int, seed: int) -> SampleHistogram:
    """Draw ``shots`` i.i.d. computational-basis samples (multinomial, seeded)."""
    if shots <= 0:
        raise ValueError("shots must be positive")
    p = state.probabilities()
    total = p.sum()
    if total <= 0:
        raise ValueError("cannot sample a zero-norm state")
    rng = np.random.default_rng(seed)
    counts = rng.multinomial(shots, p / total)
    nz = np.flatnonzero(counts)
    return SampleHistogram({int(i): int(counts[i]) for i in nz}, shots, state.layout, seed)


def exact_histogram(state: Statevector, threshold: float = 0.0) -> SampleHistogram:
    """Infinite-shot limit: the probabilities themselves."""
    p = state.probabilities()
    p = p / p.sum()
    nz = np.flatnonzero(p > threshold)
    counts = {int(i): float(p[i]) for i in nz}
    return SampleHistogram(counts, float(sum(counts.values())), state.layout, None)


def postselect(state: Statevector, pattern: Mapping[str, int]):
    """Condition on whole segments taking the given values.

    Returns ``(substate, probability)`` where the substate lives on the layout
    with the selected segments removed and is renormalised.
    """
    layout = state.layout
    for name, value in pattern.items():
        if name not in layout:
            raise KeyError(f"no segment {name!r}")
        if not 0 <= value < (1 << layout.size(name)):
            raise ValueError(f"value {value} does not fit segment {name!r}")
    order = [n for n, _ in reversed(layout.segments)]
    tensor = state.amplitudes.reshape([1 << s for _, s in reversed(layout.segments)])
    idx = tuple(pattern.get(n, slice(None)) for n in order)
    sub = np.ascontiguousarray(tensor[idx]).reshape(-1)
    prob = float(np.vdot(sub, sub).real)
    if prob <= 0:
        raise PostselectionError(f"pattern {dict(pattern)} has zero probability")
    return Statevector(sub / np.sqrt(prob), layout.without(pattern)), prob


def overlap(state1: Statevector, state2: Statevector) -> complex:
    """``<state1|state2>``."""
    if state1.layout.segments != state2.layout.segments:
        raise ValueError("layout mismatch")
    return complex(np.vdot(state1.amplitudes, state2.amplitudes))


# ---------------------------------------------------------------------------
# binary dump


def dump_statevector(state: Statevector, path):
    """Write magic header, uint32 qubit count, raw little-endian complex128 amplitudes."""
    with open(path, "wb") as fh:
        fh.write(_DUMP_MAGIC)
        fh.write(struct.pack("<I", state.num_qubits))
        fh.write(state.amplitudes.astype("<c16").tobytes())


def load_statevector(path, layout: RegisterLayout | None = None) -> Statevector:
    with open(path, "rb") as fh:
        if fh.read(len(_DUMP_MAGIC)) != _DUMP_MAGIC:
            raise ValueError(f"{path}: not a statevector dump")
        (n,) = struct.unpack("<I", fh.read(4))
        amps = np.frombuffer(fh.read(), dtype="<c16")
    if amps.size != 1 << n:
        raise ValueError(f"{path}: truncated dump ({amps.size} of {1 << n} amplitudes)")
    if layout is None:
        layout = RegisterLayout((("q", n),), cap=max(n, DEFAULT_QUBIT_CAP))
    elif layout.total != n:
        raise ValueError(f"{path}: dump has {n} qubits, layout has {layout.total}")
    return Statevector(amps.astype(np.complex128), layout)
