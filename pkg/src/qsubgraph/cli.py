"""Command-line entry point: ``qsubgraph <command> [options]``.

Commands
--------
enumerate   classical distances of every configuration, ascending
sample      prepare the state, sample it and reconstruct distances
converge    Delta_x over a grid of shot counts and seeds
minfind     quantum minimum finding (full or hybrid simulation)
costmodel   unit-constant runtime/memory sweep
quadform    Laplacian quadratic form from the state overlap

Exit codes: 0 success, 2 usage error, 3 qubit cap exceeded, 4 malformed input.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import sys

import numpy as np

from . import __version__
from .analysis import convergence_study, cost_sweep, crossover, log_grid, quadratic_form_quantum, sample_distances
from .encoding import prepare_psi_f
from .estimation import DEFAULT_AEPS
from .graph import (CardinalityError, GraphFormatError, all_distances, argmin_bruteforce, builtin_graph,
                    builtin_graphs, config_bits, generate, load_graph,
                    quadratic_form_classical)
from .minfind import find_minimum
from .statevector import DEFAULT_QUBIT_CAP, QubitCapError

EXIT_OK, EXIT_USAGE, EXIT_CAP, EXIT_INPUT = 0, 2, 3, 4
VERIFY_LIMIT = 12


class UsageError(Exception):
    pass


class InputError(Exception):
    pass


# ---------------------------------------------------------------------------
# argument helpers


def parse_int_list(text: str) -> list[int]:
    """``"3"``, ``"0,2,5"`` or the inclusive range ``"0-9"``."""
    try:
        out = []
        for part in text.split(","):
            part = part.strip()
            if "-" in part[1:]:
                lo, hi = part.split("-", 1) if not part.startswith("-") else (part, "")
                out += list(range(int(lo), int(hi) + 1))
            else:
                out.append(int(float(part)))
        return out
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"not an integer list: {text!r}") from exc


def load_input_graph(args):
    if args.graph and args.gen:
        raise UsageError("give either --graph or --gen, not both")
    if args.graph:
        if args.graph.startswith("builtin:"):
            try:
                return builtin_graph(args.graph.split(":", 1)[1])
            except KeyError as exc:
                raise UsageError(f"unknown built-in graph; choose from {sorted(builtin_graphs())}") from exc
        try:
            return load_graph(args.graph)
        except FileNotFoundError as exc:
            raise InputError(f"graph file not found: {args.graph}") from exc
    if args.gen:
        return generate(args.gen)
    raise UsageError("a graph is required (--graph FILE | --graph builtin:NAME | --gen SPEC)")


def check_x(args, graph):
    if args.x is None:
        raise UsageError("--x is required")
    if not 0 <= args.x <= graph.N:
        raise UsageError(f"--x {args.x} outside [0, N={graph.N}]")


def provenance(args, graph=None, **extra) -> dict:
    head = {"tool": "qsubgraph", "version": __version__, "command": args.command}
    if graph is not None:
        head |= {"graph": graph.name or "(unnamed)", "M": graph.M, "N": graph.N}
    for key in ("x", "seeds", "shots", "aeps", "cap", "mode"):
        val = getattr(args, key, None)
        if val is not None:
            head[key] = val
    head.update(extra)
    return head


def emit(args, header: dict, rows: list[dict] | None = None, payload: dict | None = None):
    """Write ``rows`` as CSV (with a ``#`` provenance header) or everything as JSON."""
    if args.format == "json":
        doc = {"provenance": header}
        if rows is not None:
            doc["rows"] = rows
        if payload:
            doc.update(payload)
        text = json.dumps(doc, indent=2, default=_json_default) + "\n"
    else:
        buf = io.StringIO()
        for k, v in header.items():
            buf.write(f"# {k}: {v}\n")
        for k, v in (payload or {}).items():
            if not isinstance(v, (list, dict)):
                buf.write(f"# {k}: {v}\n")
        if rows:
            w = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
            w.writeheader()
            w.writerows({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()} for r in rows)
        text = buf.getvalue()
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    if isinstance(o, np.ndarray):
        return o.tolist()
    raise TypeError(type(o))


# ---------------------------------------------------------------------------
# commands


def cmd_enumerate(args):
    graph = load_input_graph(args)
    check_x(args, graph)
    pairs = sorted(all_distances(graph, args.x), key=lambda p: (p[1], config_bits(p[0])))
    best, _ = argmin_bruteforce(graph, args.x)
    rows = [{"config_bits": config_bits(d), "D_classical": D,
             "argmin": int(config_bits(d) == config_bits(best))} for d, D in pairs]
    emit(args, provenance(args, graph), rows)
    return EXIT_OK


def cmd_sample(args):
    graph = load_input_graph(args)
    check_x(args, graph)
    exact = args.mode == "infinite-shot"
    if not exact and (args.shots is None or args.shots <= 0):
        raise UsageError("--shots must be positive (or use --mode infinite-shot)")
    seed = args.seeds[0] if args.seeds else 0
    prepared = prepare_psi_f(graph, args.x, cap=args.cap)
    report = sample_distances(prepared, None if exact else args.shots, None if exact else seed)
    head = provenance(args, graph, seed=seed, alpha=prepared.alpha, S=prepared.S, W=prepared.W,
                      layout=prepared.layout.describe())
    rows = [{"config_bits": b, "D_quantum": q, "D_classical": c, "abs_err": e} for b, q, c, e in report.rows()]
    emit(args, head, rows, {"delta_x": report.delta})
    return EXIT_OK


def cmd_converge(args):
    graph = load_input_graph(args)
    check_x(args, graph)
    shots = args.shot_grid or [10**4, 10**5, 10**6, 10**7]
    seeds = args.seeds or list(range(10))
    prepared = prepare_psi_f(graph, args.x, cap=args.cap)
    try:
        study = convergence_study(graph, args.x, shots, seeds, prepared)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    head = provenance(args, graph, alpha=prepared.alpha, layout=prepared.layout.describe())
    emit(args, head, study.table(), {"slope": study.slope, "intercept": study.intercept})
    return EXIT_OK


def cmd_minfind(args):
    graph = load_input_graph(args)
    check_x(args, graph)
    mode = args.mode or "full"
    if mode not in ("full", "hybrid"):
        raise UsageError("minfind --mode must be full or hybrid")
    seed = args.seeds[0] if args.seeds else 0
    try:
        config, D, run = find_minimum(graph, args.x, seed, mode=mode, a_eps=args.aeps, cap=args.cap)
    except QubitCapError:
        if mode == "full":
            print("hint: --mode hybrid simulates only the configuration register", file=sys.stderr)
        raise
    result = {"d": config_bits(config), "active": config_bits(1 - config), "D": D,
              "steps": run.steps, "budget": run.budget}
    if graph.N <= VERIFY_LIMIT:
        _, best = argmin_bruteforce(graph, args.x)
        result["verified"] = bool(np.isclose(D, best))
        if not result["verified"]:
            print(f"warning: budget exhausted; best-so-far D={D} exceeds the minimum {best}", file=sys.stderr)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(run.to_jsonl())
    head = provenance(args, graph, seed=seed, mode=mode)
    if args.format == "json":
        emit(args, head, None, {"result": result})
    else:
        line = f"d={result['d']}, D={D:g}"
        if "verified" in result:
            line += f", verified={str(result['verified']).lower()}"
        text = "".join(f"# {k}: {v}\n" for k, v in head.items()) + line + "\n"
        if args.out:
            with open(args.out, "w", encoding="utf-8") as fh:
                fh.write(text)
        else:
            sys.stdout.write(text)
    return EXIT_OK


def cmd_costmodel(args):
    xs = args.xs or [1, 2, 3]
    Ns = log_grid(args.nmin, args.nmax, args.per_decade)
    if Ns[0] < 2:
        raise UsageError("--nmin must be at least 2")
    rows = cost_sweep(Ns, xs, args.eps)
    cross = {f"crossover_x{x}": crossover(rows, x) for x in xs}
    head = provenance(args, None, eps=args.eps, constants="unit (O-notation placeholders)")
    emit(args, head, rows, cross)
    return EXIT_OK


def read_vector(path, M: int) -> np.ndarray:
    try:
        with open(path, encoding="utf-8") as fh:
            text = fh.read()
    except FileNotFoundError as exc:
        raise InputError(f"vector file not found: {path}") from exc
    vals = []
    for lineno, line in enumerate(text.splitlines(), 1):
        line = line.split("#", 1)[0]
        for tok in line.replace(",", " ").split():
            try:
                vals.append(float(tok))
            except ValueError as exc:
                raise InputError(f"{path}:{lineno}: not a number: {tok!r}") from exc
    if len(vals) != M:
        raise InputError(f"{path}: expected {M} values, found {len(vals)}")
    return np.array(vals)


def cmd_quadform(args):
    graph = load_input_graph(args)
    if not args.vector:
        raise UsageError("--vector FILE is required")
    a = read_vector(args.vector, graph.M)
    if args.config:
        if len(args.config) != graph.N or set(args.config) - {"0", "1"}:
            raise UsageError(f"--config must be {graph.N} bits")
        d = np.array([int(c) for c in args.config], dtype=np.int8)
    else:
        d = np.zeros(graph.N, dtype=np.int8)
    if not np.any(a):
        raise InputError("vector is identically zero")
    prepared = prepare_psi_f(graph, int(d.sum()), config=d, classical_config=True, cap=args.cap)
    q = quadratic_form_quantum(prepared, d, a)
    c = quadratic_form_classical(graph, d, a)
    head = provenance(args, graph, alpha=prepared.alpha, layout=prepared.layout.describe())
    emit(args, head, [{"config_bits": config_bits(d), "quantum": q, "classical": c, "abs_err": abs(q - c)}])
    return EXIT_OK


# ---------------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qsubgraph", description="Most-similar-subgraph search under edge removal.")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, x=True):
        sp.add_argument("--graph", help="graph file, or builtin:NAME")
        sp.add_argument("--gen", help="generator: path:M | cycle:M | star:M | rand:M,N,seed")
        if x:
            sp.add_argument("--x", type=int, help="number of removed edges")
        sp.add_argument("--cap", type=int, default=DEFAULT_QUBIT_CAP, help="qubit cap")
        sp.add_argument("--out", help="output file (default stdout)")
        sp.add_argument("--format", choices=("csv", "json"), default="csv")

    sp = sub.add_parser("enumerate", help="classical distances, ascending")
    common(sp)
    sp.set_defaults(func=cmd_enumerate)

    sp = sub.add_parser("sample", help="sample the prepared state and reconstruct distances")
    common(sp)
    sp.add_argument("--shots", type=int)
    sp.add_argument("--seeds", type=parse_int_list, help="seed (first entry is used)")
    sp.add_argument("--mode", choices=("sampled", "infinite-shot"), default="sampled")
    sp.set_defaults(func=cmd_sample)

    sp = sub.add_parser("converge", help="Delta_x against shot count")
    common(sp)
    sp.add_argument("--shots", dest="shot_grid", type=parse_int_list, help="shot grid, e.g. 10000,100000,1000000")
    sp.add_argument("--seeds", type=parse_int_list, help="seeds, e.g. 0-9")
    sp.set_defaults(func=cmd_converge)

    sp = sub.add_parser("minfind", help="quantum minimum finding")
    common(sp)
    sp.add_argument("--mode", choices=("full", "hybrid"), default="full")
    sp.add_argument("--aeps", type=int, default=DEFAULT_AEPS, help="phase register qubits")
    sp.add_argument("--seeds", type=parse_int_list, help="seed (first entry is used)")
    sp.add_argument("--log", help="write the run log as JSON lines")
    sp.set_defaults(func=cmd_minfind)

    sp = sub.add_parser("costmodel", help="unit-constant runtime sweep")
    sp.add_argument("--x", dest="xs", type=parse_int_list, help="removed-edge counts, e.g. 1,2,3")
    sp.add_argument("--nmin", type=float, default=10)
    sp.add_argument("--nmax", type=float, default=1e5)
    sp.add_argument("--per-decade", type=int, default=4)
    sp.add_argument("--eps", type=float, default=1.0)
    sp.add_argument("--out")
    sp.add_argument("--format", choices=("csv", "json"), default="csv")
    sp.set_defaults(func=cmd_costmodel)

    sp = sub.add_parser("quadform", help="quadratic form a^T B a via the state overlap")
    common(sp, x=False)
    sp.add_argument("--vector", help="file with M numbers")
    sp.add_argument("--config", help="removed-edge bits d_0..d_{N-1} (default: none removed)")
    sp.set_defaults(func=cmd_quadform)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CardinalityError as exc:
        print(f"usage error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QubitCapError as exc:
        print(f"resource error: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (GraphFormatError, InputError) as exc:
        print(f"input error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
