"""Weighted graphs, Laplacians and exact classical distance oracles.

Everything in this module is classical and exact. It is the ground truth the
quantum pipeline is checked against.

A configuration is a 0/1 vector ``d`` over the edges where ``d[i] == 1`` means
edge ``i`` is removed. The active-edge vector is ``1 - d``.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np
from scipy import sparse

#: matrices above this many vertices are built in sparse (COO) form
DENSE_VERTEX_LIMIT = 64


class GraphFormatError(ValueError):
    """Malformed graph input. ``line`` is the 1-based offending line, if known."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class CardinalityError(ValueError):
    """A configuration does not remove the required number of edges."""


@dataclass(frozen=True)
class WeightedGraph:
    """Simple undirected graph with strictly positive edge weights.

    Edges are stored oriented from the lower to the higher vertex index. The
    order of ``edges`` is fixed at construction and defines the edge index used
    everywhere downstream.
    """

    vertex_count: int
    edges: tuple[tuple[int, int], ...]
    weights: tuple[float, ...]
    name: str = field(default="", compare=False)

    def __post_init__(self):
        if self.vertex_count < 1:
            raise GraphFormatError("vertex count must be positive")
        if len(self.edges) != len(self.weights):
            raise GraphFormatError("edges and weights differ in length")
        oriented = []
        seen = set()
        for (r, s), b in zip(self.edges, self.weights):
            r, s = int(r), int(s)
            if r == s:
                raise GraphFormatError(f"self-loop at vertex {r}")
            if not (0 <= r < self.vertex_count and 0 <= s < self.vertex_count):
                raise GraphFormatError(f"edge ({r}, {s}) outside [0, {self.vertex_count})")
            if not (b > 0 and math.isfinite(b)):
                raise GraphFormatError(f"edge ({r}, {s}) has non-positive weight {b}")
            key = (min(r, s), max(r, s))
            if key in seen:
                raise GraphFormatError(f"parallel edge {key}")
            seen.add(key)
            oriented.append(key)
        object.__setattr__(self, "edges", tuple(oriented))
        object.__setattr__(self, "weights", tuple(float(b) for b in self.weights))

    @classmethod
    def from_edges(cls, vertex_count: int, edges, weights=None, name: str = ""):
        edges = [tuple(e) for e in edges]
        if weights is None:
            weights = [1.0] * len(edges)
        return cls(vertex_count, tuple(edges), tuple(weights), name=name)

    @property
    def M(self) -> int:
        return self.vertex_count

    @property
    def N(self) -> int:
        return len(self.edges)

    @property
    def b(self) -> np.ndarray:
        return np.asarray(self.weights, dtype=float)

    def __repr__(self):
        label = f" {self.name!r}" if self.name else ""
        return f"<WeightedGraph{label} M={self.M} N={self.N}>"


# ---------------------------------------------------------------------------
# file format and generators


def parse_graph(text: str, name: str = "") -> WeightedGraph:
    """Parse the ``M N`` header + ``r s b`` edge-list format. ``#`` starts a comment."""
    records = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if line:
            records.append((lineno, line.split()))
    if not records:
        raise GraphFormatError("empty graph file")
    lineno, head = records[0]
    if len(head) != 2:
        raise GraphFormatError("header must be 'M N'", lineno)
    try:
        M, N = int(head[0]), int(head[1])
    except ValueError:
        raise GraphFormatError("header must hold two integers", lineno) from None
    body = records[1:]
    if len(body) != N:
        line = body[N][0] if len(body) > N else (body[-1][0] if body else lineno)
        raise GraphFormatError(f"expected {N} edge lines, found {len(body)}", line)
    edges, weights = [], []
    for lineno, parts in body:
        if len(parts) != 3:
            raise GraphFormatError("edge line must be 'r s b'", lineno)
        try:
            r, s, b = int(parts[0]), int(parts[1]), float(parts[2])
        except ValueError:
            raise GraphFormatError(f"cannot parse edge {' '.join(parts)!r}", lineno) from None
        try:
            WeightedGraph(M, ((r, s),), (b,))
        except GraphFormatError as exc:
            raise GraphFormatError(str(exc), lineno) from None
        edges.append((r, s))
        weights.append(b)
    try:
        return WeightedGraph(M, tuple(edges), tuple(weights), name=name)
    except GraphFormatError as exc:
        raise GraphFormatError(str(exc), body[-1][0] if body else None) from None


def load_graph(path) -> WeightedGraph:
    path = Path(path)
    return parse_graph(path.read_text(), name=path.stem)


def format_graph(graph: WeightedGraph) -> str:
    lines = [f"{graph.M} {graph.N}"]
    lines += [f"{r} {s} {b!r}" for (r, s), b in zip(graph.edges, graph.weights)]
    return "\n".join(lines) + "\n"


def path_graph(M: int, weights=None) -> WeightedGraph:
    return WeightedGraph.from_edges(M, [(i, i + 1) for i in range(M - 1)], weights, name=f"path{M}")


def cycle_graph(M: int, weights=None) -> WeightedGraph:
    if M < 3:
        raise GraphFormatError("a cycle needs at least 3 vertices")
    edges = [(i, i + 1) for i in range(M - 1)] + [(0, M - 1)]
    return WeightedGraph.from_edges(M, edges, weights, name=f"cycle{M}")


def star_graph(M: int, weights=None) -> WeightedGraph:
    """Star with centre 0 and ``M - 1`` spokes."""
    return WeightedGraph.from_edges(M, [(0, i) for i in range(1, M)], weights, name=f"star{M}")


def random_graph(M: int, N: int, seed: int = 0) -> WeightedGraph:
    """Connected random sparse graph: a random spanning tree plus extra edges.

    Weights are drawn uniformly from [0.5, 2.0).
    """
    max_edges = M * (M - 1) // 2
    if not (M - 1 <= N <= max_edges):
        raise GraphFormatError(f"need {M - 1} <= N <= {max_edges} for a connected simple graph")
    rng = np.random.default_rng(seed)
    order = rng.permutation(M)
    chosen = set()
    for k in range(1, M):
        u, v = int(order[k]), int(order[rng.integers(k)])
        chosen.add((min(u, v), max(u, v)))
    rest = [e for e in itertools.combinations(range(M), 2) if e not in chosen]
    for idx in rng.permutation(len(rest))[: N - len(chosen)]:
        chosen.add(rest[idx])
    edges = sorted(chosen)
    weights = np.round(rng.uniform(0.5, 2.0, size=len(edges)), 3)
    return WeightedGraph.from_edges(M, edges, weights.tolist(), name=f"rand{M}_{N}_{seed}")


def generate(spec: str) -> WeightedGraph:
    """Build a graph from ``path:M``, ``cycle:M``, ``star:M`` or ``rand:M,N,seed``."""
    kind, _, args = spec.partition(":")
    try:
        nums = [int(a) for a in args.split(",")] if args else []
    except ValueError:
        raise GraphFormatError(f"bad generator arguments in {spec!r}") from None
    makers = {"path": (path_graph, 1), "cycle": (cycle_graph, 1), "star": (star_graph, 1),
              "rand": (random_graph, 3)}
    if kind not in makers or len(nums) != makers[kind][1]:
        raise GraphFormatError(f"unknown generator {spec!r}")
    return makers[kind][0](*nums)


# ---------------------------------------------------------------------------
# matrices


def build_incidence(graph: WeightedGraph, dense: bool | None = None):
    """Oriented incidence matrix: +1 at each edge's tail, -1 at its head.

    Returned dense (``np.ndarray``) for small graphs and as a ``scipy.sparse``
    COO matrix above :data:`DENSE_VERTEX_LIMIT` vertices, unless ``dense`` is
    given explicitly.
    """
    if dense is None:
        dense = graph.M <= DENSE_VERTEX_LIMIT
    rows = np.array([e[k] for e in graph.edges for k in (0, 1)], dtype=np.int64)
    cols = np.repeat(np.arange(graph.N), 2)
    vals = np.tile([1, -1], graph.N).astype(np.int64)
    E = sparse.coo_matrix((vals, (rows, cols)), shape=(graph.M, graph.N))
    return E.toarray() if dense else E


def _active(graph: WeightedGraph, config) -> np.ndarray:
    if config is None:
        return np.ones(graph.N)
    d = np.asarray(config, dtype=int)
    if d.shape != (graph.N,):
        raise CardinalityError(f"configuration length {d.size} != N = {graph.N}")
    return 1.0 - d


def build_laplacian(graph: WeightedGraph, config=None, dense: bool | None = None):
    """Laplacian of the subgraph left after removing the edges flagged in ``config``.

    ``config=None`` gives the reference Laplacian with every edge active.
    """
    if dense is None:
        dense = graph.M <= DENSE_VERTEX_LIMIT
    w = graph.b * _active(graph, config)
    if dense:
        E = build_incidence(graph, dense=True).astype(float)
        return (E * w) @ E.T
    E = build_incidence(graph, dense=False).tocsr().astype(float)
    return (E @ sparse.diags(w) @ E.T).tocoo()


def build_q_matrix(graph: WeightedGraph) -> np.ndarray:
    """``Q[i, j] = b_i b_j (v_i . v_j)^2`` for incidence columns ``v_i``."""
    E = build_incidence(graph, dense=False).tocsc().astype(float)
    G = (E.T @ E).toarray()
    b = graph.b
    return np.outer(b, b) * G**2


# ---------------------------------------------------------------------------
# distances


def _check_cardinality(d: np.ndarray, x: int | None):
    if x is not None and int(d.sum()) != x:
        raise CardinalityError(f"configuration removes {int(d.sum())} edges, expected {x}")


def _as_config(graph: WeightedGraph, config) -> np.ndarray:
    d = np.asarray(config, dtype=int)
    if d.shape != (graph.N,) or np.any((d != 0) & (d != 1)):
        raise CardinalityError(f"configuration must be a 0/1 vector of length {graph.N}")
    return d


def frobenius_distance_dense(graph: WeightedGraph, config, x: int | None = None) -> float:
    """Squared Frobenius norm of ``B - B^d`` computed elementwise."""
    d = _as_config(graph, config)
    _check_cardinality(d, x)
    diff = build_laplacian(graph, dense=True) - build_laplacian(graph, d, dense=True)
    return float(np.sum(diff * diff))


def frobenius_distance_q(graph: WeightedGraph, config, x: int | None = None, Q=None) -> float:
    """``d^T Q d``."""
    d = _as_config(graph, config)
    _check_cardinality(d, x)
    if Q is None:
        Q = build_q_matrix(graph)
    return float(d @ Q @ d)


def frobenius_distance_sparse(graph: WeightedGraph, config, x: int | None = None) -> float:
    """Distance in O(N) from the removed edges only.

    Sums, per vertex, the squared removed weight incident to it, then adds
    twice the squared weight of every removed edge (the off-diagonal pair).
    """
    d = _as_config(graph, config)
    _check_cardinality(d, x)
    per_vertex = {}
    off_diagonal = 0.0
    for i in np.flatnonzero(d):
        (r, s), b = graph.edges[i], graph.weights[i]
        per_vertex[r] = per_vertex.get(r, 0.0) + b
        per_vertex[s] = per_vertex.get(s, 0.0) + b
        off_diagonal += 2.0 * b * b
    return float(sum(v * v for v in per_vertex.values()) + off_diagonal)


def enumerate_configurations(N: int, x: int) -> Iterator[np.ndarray]:
    """All 0/1 vectors of length ``N`` with ``x`` ones, in lexicographic order."""
    if not 0 <= x <= N:
        raise ValueError(f"x = {x} outside [0, {N}]")
    # lexicographic order of the zero positions is lexicographic order of d
    for zeros in itertools.combinations(range(N), N - x):
        d = np.ones(N, dtype=np.int8)
        d[list(zeros)] = 0
        yield d


def configurations(N: int, x: int) -> list[np.ndarray]:
    return list(enumerate_configurations(N, x))


def config_index(d: Sequence[int]) -> int:
    """Basis index of configuration ``d`` with ``d[i]`` on qubit ``i``."""
    return int(sum(int(v) << i for i, v in enumerate(d)))


def config_from_index(index: int, N: int) -> np.ndarray:
    return np.array([(index >> i) & 1 for i in range(N)], dtype=np.int8)


def config_bits(d: Sequence[int]) -> str:
    """``d_0 d_1 ... d_{N-1}`` as a string."""
    return "".join(str(int(v)) for v in d)


def all_distances(graph: WeightedGraph, x: int) -> list[tuple[np.ndarray, float]]:
    Q = build_q_matrix(graph)
    return [(d, float(d @ Q @ d)) for d in configurations(graph.N, x)]


def argmin_bruteforce(graph: WeightedGraph, x: int) -> tuple[np.ndarray, float]:
    """Exhaustive minimiser; ties go to the lexicographically smallest ``d``."""
    if not 0 <= x <= graph.N:
        raise ValueError(f"x = {x} outside [0, {graph.N}]")
    best, best_val = None, math.inf
    for d, val in all_distances(graph, x):
        if val < best_val:
            best, best_val = d, val
    return best, best_val


def quadratic_form_classical(graph: WeightedGraph, config, a) -> float:
    """``a^T B^d a`` as the sum of ``b_i (a . v_i)^2`` over active edges."""
    a = np.asarray(a, dtype=float)
    if a.shape != (graph.M,):
        raise ValueError(f"vector length {a.size} != M = {graph.M}")
    active = _active(graph, config)
    total = 0.0
    for (r, s), b, on in zip(graph.edges, graph.weights, active):
        total += b * on * (a[r] - a[s]) ** 2
    return float(total)


# ---------------------------------------------------------------------------
# built-in instances

def builtin_graphs() -> dict[str, WeightedGraph]:
    """Small documented example graphs shipped with the package.

    ``grid4`` and ``grid9`` are stand-ins with the edge counts of small power
    grid test cases; their weights are made up and make no claim of matching
    any published data set.
    """
    graphs = [
        WeightedGraph.from_edges(2, [(0, 1)], [1.5], name="edge"),
        path_graph(3),
        WeightedGraph.from_edges(3, [(0, 1), (1, 2)], [1.0, 3.0], name="p3w"),
        WeightedGraph.from_edges(3, [(0, 1), (1, 2), (0, 2)], [1.0, 2.0, 0.5], name="triangle"),
        star_graph(4),
        cycle_graph(4),
        path_graph(5),
        # 4-bus style ring: four buses, four lines, one weak tie line
        WeightedGraph.from_edges(4, [(0, 1), (0, 2), (1, 3), (2, 3)],
                                 [2.0, 1.2, 1.6, 0.3], name="grid4"),
        # triangle with a pendant edge, unique x=1 and x=2 minimisers
        WeightedGraph.from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)],
                                 [1.0, 1.4, 1.8, 0.25], name="kite"),
        # 9-bus style: three generator spurs feeding a 6-bus ring
        WeightedGraph.from_edges(
            9,
            [(0, 3), (3, 4), (4, 5), (2, 5), (5, 6), (6, 7), (1, 7), (7, 8), (3, 8)],
            [1.73, 1.18, 0.59, 1.70, 0.99, 1.39, 1.60, 1.38, 1.08],
            name="grid9",
        ),
    ]
    return {g.name: g for g in graphs}


def builtin_graph(name: str) -> WeightedGraph:
    graphs = builtin_graphs()
    if name not in graphs:
        raise KeyError(f"no built-in graph {name!r}; have {sorted(graphs)}")
    return graphs[name]
