"""Command-line interface: ``maxpersist <command> [options]``.

Exit codes: 0 success, 1 domain error, 2 usage or I/O error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .benchgen import GenerationError, LfrParams, generate_batch
from .benchmark import METHODS, BenchmarkConfig, report_csv, run_instances
from .curve import peak_report
from .exact import exact_search
from .graph import Graph, GraphError, read_edge_list
from .localsearch import SearchParams, crr, interchange, tree_vns, vns_stream
from .milp import build_p1, decode_members, solve_external, write_lp
from .persistence import CommunitySolution, alpha_of
from .shrink import random_shrink
from .svg import render_curve

EXACT_LIMIT = 40


class UsageError(Exception):
    pass


class DomainError(Exception):
    pass


def _positive(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _int_list(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(t) for t in text.split(",") if t.strip())
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _name_list(text: str) -> tuple[str, ...]:
    return tuple(t.strip() for t in text.split(",") if t.strip())


def _common(p: argparse.ArgumentParser, graph: bool = True) -> None:
    if graph:
        p.add_argument("--graph", required=True, help="edge-list file")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--threads", type=_positive, default=1)
    p.add_argument("--config", help="key=value file; command-line flags take precedence")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="maxpersist", description="Maximum persistence community search.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)
    parser.commands = sub.choices

    p = sub.add_parser("curve", help="persistence curve, peaks and SVG chart")
    _common(p)
    p.add_argument("--max-start", type=_positive, default=100)
    p.add_argument("--max-random-step", type=int)
    p.add_argument("--out", default="curve", help="output prefix for .csv, .json, .peaks.json, .svg")

    p = sub.add_parser("optimize", help="best connected k-subset by a heuristic")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--method", choices=METHODS, default="crr")
    p.add_argument("--max-start", type=_positive, default=100)
    p.add_argument("--max-random-step", type=int)
    p.add_argument("--min-distance", type=int, default=2)
    p.add_argument("--out", help="JSON output path (default: stdout)")

    p = sub.add_parser("exact", help="exhaustive optimum for small graphs")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--force", action="store_true", help=f"allow graphs above {EXACT_LIMIT} nodes")
    p.add_argument("--out")

    p = sub.add_parser("export-milp", help="write the linearized model as an LP file")
    _common(p)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--out", required=True, help="LP file path")
    p.add_argument("--solver-cmd", help="optional solver command using {lp} and {sol} placeholders")

    p = sub.add_parser("generate", help="LFR-style benchmark graphs")
    _common(p, graph=False)
    _lfr_flags(p)
    p.add_argument("--count", type=_positive, default=1)
    p.add_argument("--out", required=True, help="output directory")
    p.add_argument("--emit-truth", action="store_true")

    p = sub.add_parser("benchmark", help="scaled benchmark report (CSV)")
    _common(p, graph=False)
    _lfr_flags(p, with_n=False)
    p.add_argument("--sizes", type=_int_list, default=(20,))
    p.add_argument("--instances", type=_positive, default=20)
    p.add_argument("--maxit", type=_int_list, default=(100, 1000))
    p.add_argument("--methods", type=_name_list, default=METHODS)
    p.add_argument("--max-start", type=_positive, default=100, help="starts for tree VNS and CRR")
    p.add_argument("--max-random-step", type=int)
    p.add_argument("--min-distance", type=int, default=2)
    p.add_argument("--timings", action="store_true", help="append mean wall-clock columns")
    p.add_argument("--out", help="CSV output path (default: stdout)")
    return parser


def _lfr_flags(p: argparse.ArgumentParser, with_n: bool = True) -> None:
    if with_n:
        p.add_argument("--n", type=int, required=True)
    p.add_argument("--mu", type=float, default=0.1)
    p.add_argument("--gamma", type=float, default=2.0)
    p.add_argument("--beta", type=float, default=1.0)
    p.add_argument("--avg-degree-frac", type=float, default=0.3)
    p.add_argument("--k-min", type=int, default=2)
    p.add_argument("--k-max", type=int)
    p.add_argument("--s-min-frac", type=float, default=0.2)
    p.add_argument("--s-max-frac", type=float, default=0.5)


def read_config(path: str) -> dict[str, str]:
    values = {}
    try:
        with open(path, encoding="utf-8") as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise UsageError(f"cannot read config {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key = value")
        key, value = (t.strip() for t in line.split("=", 1))
        values[key.replace("-", "_")] = value.strip("\"'")
    return values


def _config_path(argv: list[str]) -> str | None:
    for i, a in enumerate(argv):
        if a == "--config" and i + 1 < len(argv):
            return argv[i + 1]
        if a.startswith("--config="):
            return a.split("=", 1)[1]
    return None


def parse_args(argv: list[str] | None) -> argparse.Namespace:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    path = _config_path(argv)
    command = next((a for a in argv if a in parser.commands), None)
    if path is not None and command is not None:
        # config values become defaults of the chosen subcommand; explicit flags still win
        sub = parser.commands[command]
        actions = {a.dest: a for a in sub._actions}
        defaults = {}
        for key, value in read_config(path).items():
            action = actions.get(key)
            if action is None or key in ("config", "help"):
                raise UsageError(f"unknown config key {key!r} for command {command}")
            if action.nargs == 0:
                defaults[key] = value.lower() in ("1", "true", "yes", "on")
            else:
                try:
                    defaults[key] = action.type(value) if action.type else value
                except (argparse.ArgumentTypeError, ValueError) as exc:
                    raise UsageError(f"config key {key}: {exc}") from None
            action.required = False
        sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def load_graph(path: str) -> Graph:
    try:
        return read_edge_list(path)
    except FileNotFoundError:
        raise UsageError(f"graph file not found: {path}") from None
    except OSError as exc:
        raise UsageError(f"cannot read graph file {path}: {exc.strerror}") from None
    except GraphError as exc:
        raise UsageError(f"{path}: {exc}") from None


def _check_k(g: Graph, k: int) -> None:
    if not 2 <= k <= g.n - 1:
        raise UsageError(f"--k must lie in 2..{g.n - 1} for this graph, got {k}")


def _check_steps(g: Graph, steps: int | None) -> None:
    if steps is not None and not 0 <= steps <= g.n - 2:
        raise UsageError(f"--max-random-step must lie in 0..{g.n - 2}")


def _write_text(path: str | None, text: str) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror}") from None


def _json(data) -> str:
    return json.dumps(data, indent=2) + "\n"


def solution_json(g: Graph, sol: CommunitySolution, method: str) -> dict:
    return {
        "k": sol.size,
        "alpha": float(sol.alpha),
        "alpha_exact": f"{sol.alpha.numerator}/{sol.alpha.denominator}",
        "internal_edges": sol.internal_edges,
        "external_edges": sol.external_edges,
        "members": g.label_values(sol.members),
        "method": method,
    }


def _trace_summary(trace: list[CommunitySolution]) -> dict:
    return {"improvements": len(trace), "alphas": [float(s.alpha) for s in trace]}


def cmd_curve(args) -> int:
    g = load_graph(args.graph)
    _check_steps(g, args.max_random_step)
    if g.n < 5:
        raise UsageError("curve needs a graph with at least 5 nodes")
    curve = random_shrink(g, args.max_start, args.max_random_step, args.seed, args.threads)
    report = peak_report(curve)
    data = curve.to_json(g)
    data["peaks"] = report["peaks"]
    _write_text(args.out + ".csv", curve.to_csv(g))
    _write_text(args.out + ".json", _json(data))
    _write_text(args.out + ".peaks.json", _json(report))
    alphas = {k: float(a) for k, a in curve.alphas().items()}
    _write_text(args.out + ".svg", render_curve(alphas, report["peaks"], os.path.basename(args.graph)))
    return 0


def cmd_optimize(args) -> int:
    g = load_graph(args.graph)
    _check_k(g, args.k)
    _check_steps(g, args.max_random_step)
    if args.min_distance < 0:
        raise UsageError("--min-distance must be non-negative")
    params = SearchParams(args.max_start, args.max_start, args.min_distance, args.seed)
    trace: list[CommunitySolution] = []
    if args.method == "crr":
        sol = crr(g, args.k, params, trace)
        out = solution_json(g, sol, "crr")
    else:
        curve = random_shrink(g, args.max_start, args.max_random_step, args.seed, args.threads)
        start = curve.witness(args.k)
        trace.append(start)
        sol = interchange(g, start, trace)
        if args.method == "rsvns":
            sol = tree_vns(g, sol, params.max_start_vns, vns_stream(params.seed), trace)
        out = solution_json(g, sol, args.method)
        out["shrink_alpha"] = float(start.alpha)
    out["trace"] = _trace_summary(trace)
    _write_text(args.out, _json(out))
    return 0


def cmd_exact(args) -> int:
    g = load_graph(args.graph)
    _check_k(g, args.k)
    if g.n > EXACT_LIMIT and not args.force:
        raise UsageError(f"refusing exhaustive search on n={g.n} > {EXACT_LIMIT} nodes; "
                         "pass --force to run anyway")
    if g.n > EXACT_LIMIT:
        print(f"warning: exhaustive search on n={g.n} may take very long", file=sys.stderr)
    sol, count = exact_search(g, args.k)
    out = solution_json(g, sol, "exact")
    out["subsets_enumerated"] = count
    _write_text(args.out, _json(out))
    return 0


def cmd_export_milp(args) -> int:
    g = load_graph(args.graph)
    _check_k(g, args.k)
    model = build_p1(g, args.k)
    try:
        parent = os.path.dirname(args.out)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(args.out, "w", encoding="ascii", newline="\n") as fh:
            write_lp(model, fh)
    except OSError as exc:
        raise UsageError(f"cannot write {args.out}: {exc.strerror}") from None
    if args.solver_cmd:
        try:
            values = solve_external(model, args.solver_cmd)
        except Exception as exc:  # solver failures are reported, not fatal to the export
            raise DomainError(f"external solver failed: {exc}") from None
        members = decode_members(g, values)
        if len(members) != args.k:
            raise DomainError(f"solver returned {len(members)} selected nodes, expected {args.k}")
        out = solution_json(g, alpha_of(g, members), "milp")
        out["objective"] = float(model.objective_value(values))
        _write_text(None, _json(out))
    return 0


def _lfr_params(args, n: int) -> LfrParams:
    try:
        return LfrParams(n=n, gamma=args.gamma, beta=args.beta, mu=args.mu,
                         avg_degree_frac=args.avg_degree_frac, k_min=args.k_min, k_max=args.k_max,
                         s_min_frac=args.s_min_frac, s_max_frac=args.s_max_frac, seed=args.seed)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_generate(args) -> int:
    params = _lfr_params(args, args.n)
    try:
        generate_batch(params, args.count, args.out, args.emit_truth, args.threads)
    except GenerationError as exc:
        raise DomainError(f"generation failed: {exc}") from None
    except OSError as exc:
        raise UsageError(f"cannot write to {args.out}: {exc.strerror}") from None
    return 0


def cmd_benchmark(args) -> int:
    lfr = _lfr_params(args, max(args.sizes) if args.sizes else 20)
    try:
        search = SearchParams(args.max_start, args.max_start, args.min_distance, args.seed)
        cfg = BenchmarkConfig(sizes=tuple(args.sizes), instances=args.instances, maxits=tuple(args.maxit),
                              methods=tuple(args.methods), lfr=lfr, max_random_step=args.max_random_step,
                              search=search, seed=args.seed, timings=args.timings, threads=args.threads)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    try:
        results = run_instances(cfg)
    except GenerationError as exc:
        raise DomainError(f"generation failed: {exc}") from None
    _write_text(args.out, report_csv(cfg, results))
    return 0


COMMANDS = {
    "curve": cmd_curve,
    "optimize": cmd_optimize,
    "exact": cmd_exact,
    "export-milp": cmd_export_milp,
    "generate": cmd_generate,
    "benchmark": cmd_benchmark,
}


def main(argv: list[str] | None = None) -> int:
    try:
        args = parse_args(argv)
        return COMMANDS[args.command](args)
    except SystemExit as exc:
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"maxpersist: error: {exc}", file=sys.stderr)
        return 2
    except (DomainError, GraphError, GenerationError, ValueError) as exc:
        print(f"maxpersist: error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
