"""Reading distances back out of the prepared state, and the resource model.

Includes shot-histogram reconstruction and the summed absolute error
``Delta_x``, a convergence study over shot counts, the overlap estimator for
Laplacian quadratic forms, and the asymptotic runtime and memory formulas
evaluated with unit constants.
"""
from __future__ import annotations

import csv
import io
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .encoding import Dimensions, PreparedState, prepare_psi_f, success_mask
from .graph import WeightedGraph, all_distances, config_bits, config_index
from .statevector import SampleHistogram, exact_histogram, measure_all


# ---------------------------------------------------------------------------
# distance reconstruction


@dataclass
class DistanceReport:
    """Reconstructed and exact distances for every weight-``x`` configuration."""

    configs: list
    D_quantum: np.ndarray
    D_classical: np.ndarray
    shots: float
    seed: int | None
    alpha: float
    S: int
    W: float

    @property
    def delta(self) -> float:
        """``Delta_x``: summed absolute error over all configurations."""
        return float(np.sum(np.abs(self.D_quantum - self.D_classical)))

    @property
    def abs_err(self) -> np.ndarray:
        return np.abs(self.D_quantum - self.D_classical)

    def rows(self):
        for d, q, c, e in zip(self.configs, self.D_quantum, self.D_classical, self.abs_err):
            yield config_bits(d), float(q), float(c), float(e)

    def to_csv(self, header: dict | None = None) -> str:
        buf = io.StringIO()
        for k, v in (header or {}).items():
            buf.write(f"# {k}: {v}\n")
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["config_bits", "D_quantum", "D_classical", "abs_err"])
        for bits, q, c, e in self.rows():
            w.writerow([bits, repr(q), repr(c), repr(e)])
        return buf.getvalue()

    def summary(self) -> dict:
        return {"seed": self.seed, "shots": self.shots, "delta_x": self.delta, "alpha": self.alpha,
                "S": self.S, "W": self.W}


def success_counts(histogram: SampleHistogram, prepared: PreparedState) -> dict[int, float]:
    """Counts of ``(d, 0^{2 a_V}, 1_f)`` outcomes keyed by configuration index."""
    mask, value = success_mask(histogram.layout, prepared.dims.m)
    has_d = "dicke" in histogram.layout
    out: dict[int, float] = {}
    for index, c in histogram.counts.items():
        if index & mask == value:
            d = histogram.layout.extract(index, "dicke") if has_d else 0
            out[d] = out.get(d, 0) + c
    return out


def reconstruct_distances(histogram: SampleHistogram, prepared: PreparedState) -> DistanceReport:
    """Estimate ``D(d) = alpha^4 S W * S_succ(d) / S_total`` from measured counts.

    Configurations never observed get distance 0.
    """
    if histogram.total <= 0:
        raise ValueError("histogram has zero shots")
    succ = success_counts(histogram, prepared)
    graph, x = prepared.graph, prepared.x
    pairs = all_distances(graph, x)
    configs = [d for d, _ in pairs]
    D0 = np.array([D for _, D in pairs])
    Dq = np.array([succ.get(config_index(d), 0.0) for d in configs], dtype=float)
    Dq *= prepared.normalization / histogram.total
    return DistanceReport(configs, Dq, D0, histogram.total, histogram.seed, prepared.alpha,
                          prepared.S, prepared.W)


def sample_distances(prepared: PreparedState, shots: int | None, seed: int | None = None) -> DistanceReport:
    """Measure ``prepared`` with ``shots`` samples, or exactly when ``shots`` is None."""
    if shots is None:
        hist = exact_histogram(prepared.state)
    else:
        hist = measure_all(prepared.state, shots, seed)
    return reconstruct_distances(hist, prepared)


# ---------------------------------------------------------------------------
# convergence


@dataclass
class ConvergenceStudy:
    shots: np.ndarray
    deltas: np.ndarray  # (len(shots), seeds)
    slope: float
    intercept: float

    @property
    def mean(self) -> np.ndarray:
        return self.deltas.mean(axis=1)

    def percentiles(self, q=(25, 50, 75)) -> np.ndarray:
        return np.percentile(self.deltas, q, axis=1).T

    def table(self) -> list[dict]:
        rows = []
        for s, m, (p25, p50, p75) in zip(self.shots, self.mean, self.percentiles()):
            rows.append({"shots": int(s), "mean": float(m), "p25": float(p25), "p50": float(p50),
                         "p75": float(p75)})
        return rows

    def to_json(self, **extra) -> str:
        return json.dumps({**extra, "slope": self.slope, "intercept": self.intercept,
                           "table": self.table()}, indent=2)


def loglog_slope(x, y) -> tuple[float, float]:
    """Least-squares line through ``(ln x, ln y)``; returns (slope, intercept)."""
    slope, intercept = np.polyfit(np.log(x), np.log(y), 1)
    return float(slope), float(intercept)


def convergence_study(graph: WeightedGraph, x: int, shots, seeds, prepared: PreparedState | None = None
                      ) -> ConvergenceStudy:
    """``Delta_x`` over a grid of shot counts and seeds, with a log-log fit of the mean.

    The grid needs at least three shot counts spanning two decades.
    """
    shots = np.asarray(sorted(set(int(s) for s in shots)))
    if shots.size < 3 or shots[-1] < 100 * shots[0] or shots[0] <= 0:
        raise ValueError("need at least 3 positive shot counts spanning 2 decades")
    seeds = list(seeds)
    if not seeds:
        raise ValueError("need at least one seed")
    if prepared is None:
        prepared = prepare_psi_f(graph, x)
    deltas = np.array([[sample_distances(prepared, int(s), seed).delta for seed in seeds] for s in shots])
    slope, intercept = loglog_slope(shots, deltas.mean(axis=1))
    return ConvergenceStudy(shots, deltas, slope, intercept)


# ---------------------------------------------------------------------------
# quadratic forms


def quadratic_form_quantum(prepared: PreparedState, d, a) -> float:
    """``a^T B^{active} a`` from the overlap of the ``d`` branch with ``|a>|a>``.

    The branch with the flag at 0 and all vertex ancillas at 0 holds
    ``sum_i (1 - d_i) b_i (E e_i) (x) (E e_i) / (alpha^2 sqrt(S W))``. Its
    overlap with the normalised ``|a>|a>`` is therefore
    ``a^T B a / (alpha^2 sqrt(S W) ||a||^2)``, which is rescaled here.
    """
    a = np.asarray(a, dtype=float)
    graph = prepared.graph
    if a.shape != (graph.M,):
        raise ValueError(f"vector must have length {graph.M}")
    norm2 = float(a @ a)
    if norm2 == 0:
        raise ValueError("zero vector")
    K = prepared.dims.K
    ap = np.zeros(K)
    ap[: graph.M] = a
    amp = prepared.branch(d, flag=0)
    overlap = np.einsum("u,w,uw->", ap, ap, amp) / norm2
    return float((overlap * prepared.alpha**2 * math.sqrt(prepared.S * prepared.W) * norm2).real)


def quadratic_form_for(graph: WeightedGraph, d, a, prepared: PreparedState | None = None) -> float:
    """Convenience wrapper that prepares the single-configuration state when needed."""
    d = np.asarray(d, dtype=np.int8)
    if prepared is None:
        prepared = prepare_psi_f(graph, int(d.sum()), config=d, classical_config=True)
    return quadratic_form_quantum(prepared, d, a)


# ---------------------------------------------------------------------------
# cost model


def _loglog(N: float) -> float:
    return math.log2(math.log2(N)) if N > 2 else 0.0


@dataclass
class CostModel:
    """Asymptotic resource formulas evaluated with every hidden constant set to 1.

    The values are placeholders for ``O(.)`` expressions, useful only for
    comparing growth rates.
    """

    N: int
    M: int
    x: int
    eps: float
    S: float
    t_min: float
    t_cla: float
    n_min: int
    components: dict = field(default_factory=dict)
    notes: str = ("unit constants; S1 and S2 (minimum-finder and amplification rounds) are "
                  "symbolic with S1*S2 = O(sqrt S)")

    def to_dict(self) -> dict:
        return asdict(self)


def cost_model_eval(N: int, M: int | None = None, x: int = 1, eps: float = 1.0) -> CostModel:
    """Runtime and qubit count of the quantum search against brute force.

    ``S = N**x / x!``, ``t_min = sqrt(S) N loglog N / eps`` and
    ``t_cla = S N``, with base-2 logarithms.
    """
    if N < 2:
        raise ValueError("N must be at least 2")
    if eps <= 0 or eps > 1:
        raise ValueError("eps must lie in (0, 1]")
    M = N if M is None else M
    S = N**x / math.factorial(x)
    t_min = math.sqrt(S) * N * _loglog(N) / eps
    t_cla = S * N
    logmax = math.ceil(math.log2(max(N, M)))
    n_min = min(N, x * math.ceil(math.log2(N))) + 4 * logmax + 3 + math.ceil(math.log2(1 / eps))
    a_V = 2 * Dimensions(N, M).k + 1 - Dimensions(N, M).m
    comp = {
        "t_DS": float(N),
        "t_enc": float(N),
        "t_E": float(N),
        "t_Toffoli_rme": N * _loglog(N),
        "t_Toffoli_reflection": math.log2(2 * a_V + 1),
    }
    comp["t_cQ"] = sum(comp.values())
    comp["t_AE"] = comp["t_DS"] + comp["t_cQ"] / eps
    comp["t_min_from_components"] = math.sqrt(S) * comp["t_AE"]
    return CostModel(N, M, x, eps, S, t_min, t_cla, n_min, comp)


def cost_sweep(Ns, xs=(1, 2, 3), eps: float = 1.0) -> list[dict]:
    """Rows ``(x, N, S, t_min, t_cla, n_min)`` for plotting runtime against ``N``."""
    rows = []
    for x in xs:
        for N in Ns:
            c = cost_model_eval(int(N), None, x, eps)
            rows.append({"x": x, "N": int(N), "S": c.S, "t_min": c.t_min, "t_cla": c.t_cla,
                         "n_min": c.n_min})
    return rows


def crossover(rows: list[dict], x: int) -> int | None:
    """Smallest ``N`` of the sweep beyond which ``t_min < t_cla`` holds throughout."""
    sel = sorted((r for r in rows if r["x"] == x), key=lambda r: r["N"])
    threshold = None
    for r in reversed(sel):
        if r["t_min"] < r["t_cla"]:
            threshold = r["N"]
        else:
            break
    return threshold


def log_grid(lo: float, hi: float, per_decade: int = 4) -> list[int]:
    n = int(round(math.log10(hi / lo) * per_decade)) + 1
    return sorted(set(int(round(v)) for v in np.logspace(math.log10(lo), math.log10(hi), n)))
