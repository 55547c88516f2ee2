"""Command-line front end.

Every problem subcommand reads a graph, runs either a minimum-parameter
sweep or (with ``--param``) a single decision query, and prints a JSON
report to stdout.  Exit status: 0 answered, 2 timeout, 1 usage/input error.
"""
from __future__ import annotations

import argparse
import json
import sys
import time

from .boxes import BoxConsistencyError
from .cnf import CapacityError, DimacsError, parse_dimacs, to_dimacs
from .encoders import BoxLayout, EncodingError, Layout1D, Layout2D, Orientation
from .graph import GraphError, ParseError, read_graph
from .search import (
    PROBLEMS,
    Instance,
    SearchStatus,
    VerificationFailure,
    default_bounds,
    run_benchmark,
    solve_at,
    solve_min_parameter,
    st_instances,
    write_rows,
)
from .solver import SolverError, Status, make_solver
from .svg import boxes_svg, layout2d_svg

EXIT_OK, EXIT_ERROR, EXIT_TIMEOUT = 0, 1, 2

# subcommand -> (problem key, default timeout in seconds)
SUBCOMMANDS = {
    "pathwidth": ("pathwidth", 300),
    "bandwidth": ("bandwidth", 300),
    "st-orient": ("st", 300),
    "bar-vis": ("bar-vis", 600),
    "bar-k-vis": ("bar-vis", 600),
    "boxicity": ("boxicity", 600),
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # argparse would exit with 2, which is reserved for timeouts here
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_ERROR, f"{self.prog}: error: {message}\n")


def _grid(text: str) -> tuple[int, int]:
    try:
        h, w = text.lower().split("x")
        h, w = int(h), int(w)
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected HxW, got {text!r}") from None
    if h < 1 or w < 1:
        raise argparse.ArgumentTypeError("grid sides must be >= 1")
    return h, w


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="gridsat", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--timeout", type=float, default=None,
                        help="total wall-clock budget in seconds (default 300 for 1-d, 600 for 2-d problems)")
    common.add_argument("--solver", default="internal",
                        help='"internal", "internal-python" or an external solver command line')
    common.add_argument("--seed", type=int, default=0)

    for name in SUBCOMMANDS:
        p = sub.add_parser(name, parents=[common], help=f"{name} of a graph")
        p.add_argument("graph", help='graph file (edge list or GML), "-" for stdin')
        p.add_argument("--format", choices=["edges", "gml"], default=None)
        p.add_argument("--param", nargs="?", type=int, const=-1, default=None,
                       help="decide a single parameter value instead of sweeping "
                            "(without a value: take it from --grid)")
        p.add_argument("--min", type=int, default=None, dest="lower")
        p.add_argument("--max", type=int, default=None, dest="upper")
        p.add_argument("--emit-cnf", default=None, metavar="PATH")
        p.add_argument("--cardinality", choices=["binomial", "sequential"], default="binomial")
        if name == "st-orient":
            p.add_argument("--s", type=int, default=None)
            p.add_argument("--t", type=int, default=None)
        if name in ("bar-vis", "bar-k-vis"):
            p.add_argument("--grid", type=_grid, default=None, help="HxW (height fixed, width swept)")
            p.add_argument("--no-sten", action="store_true",
                           help="drop the clauses pinning incidences to edge-bar ends")
            p.add_argument("--k", type=int, default=0 if name == "bar-vis" else 1)
        if name == "boxicity":
            p.add_argument("--dim", type=int, default=2)
            p.add_argument("--grid", type=_grid, default=None, help="SxS square grid")
        if name in ("bar-vis", "bar-k-vis", "boxicity"):
            p.add_argument("--svg", default=None, metavar="PATH")
            p.add_argument("--grid-lines", action="store_true")

    p = sub.add_parser("solve-cnf", parents=[common], help="solve a DIMACS file")
    p.add_argument("cnf", help='DIMACS file, "-" for stdin')
    p.add_argument("--json", action="store_true", help="JSON report instead of SAT/UNSAT lines")

    p = sub.add_parser("bench", parents=[common], help="benchmark a directory or list of graphs")
    p.add_argument("graphs", nargs="+", help="graph files")
    p.add_argument("--problem", choices=["pathwidth", "bandwidth", "st-orient", "bar-vis",
                                         "bar-k-vis", "boxicity"], required=True)
    p.add_argument("--early-stop", type=int, default=400)
    p.add_argument("--workers", type=int, default=1)
    p.add_argument("--out", default=None, help="write rows to .csv or .jsonl")
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--dim", type=int, default=2)
    return parser


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    with open(path) as fh:
        return fh.read()


def _load_graph(path: str, fmt: str | None):
    if path == "-":
        return read_graph(path, fmt=fmt or "edges", text=sys.stdin.read())
    return read_graph(path, fmt=fmt)


def solution_to_json(solution) -> dict | None:
    if solution is None:
        return None
    if isinstance(solution, Layout1D):
        return {"intervals": {str(v): list(iv) for v, iv in sorted(solution.intervals.items())}}
    if isinstance(solution, Orientation):
        return {"arcs": [list(a) for _, a in sorted(solution.arcs.items())],
                "levels": {str(v): lv for v, lv in sorted(solution.levels.items())}}
    if isinstance(solution, Layout2D):
        return {"height": solution.height, "width": solution.width,
                "vertex_bars": {str(v): list(b) for v, b in sorted(solution.vertex_bars.items())},
                "edge_bars": {f"{u}-{w}": list(b) for (u, w), b in sorted(solution.edge_bars.items())}}
    if isinstance(solution, BoxLayout):
        return {"side": solution.side,
                "boxes": {str(v): [list(iv) for iv in b.bounds] for v, b in sorted(solution.boxes.items())}}
    if isinstance(solution, dict):
        return {"positions": {str(v): p for v, p in sorted(solution.items())}}
    raise TypeError(f"cannot serialise {type(solution).__name__}")


def _problem_options(args, g) -> tuple[dict, dict]:
    """(problem options, extra report fields)."""
    options: dict = {}
    extra: dict = {}
    if args.command == "st-orient":
        s = 0 if args.s is None else args.s
        t = g.n - 1 if args.t is None else args.t
        if not (0 <= s < g.n and 0 <= t < g.n) or s == t:
            raise UsageError("--s and --t must be two distinct vertices")
        options.update(s=s, t=t)
        extra["added_st_edge"] = not g.has_edge(s, t)
    elif args.command in ("bar-vis", "bar-k-vis"):
        if args.command == "bar-k-vis" and args.k < 1:
            raise UsageError("bar-k-vis needs --k >= 1")
        if args.k < 0:
            raise UsageError("--k must be >= 0")
        options.update(k=args.k, endpoints=not args.no_sten,
                       height=args.grid[0] if args.grid else g.n)
    elif args.command == "boxicity":
        if args.dim < 1:
            raise UsageError("--dim must be >= 1")
        options["d"] = args.dim
    return options, extra


def _decision_value(args) -> int:
    if args.param is not None and args.param >= 0:
        return args.param
    grid = getattr(args, "grid", None)
    if grid is None:
        raise UsageError("--param without a value needs --grid")
    if args.command == "boxicity":
        if grid[0] != grid[1]:
            raise UsageError("boxicity grids are square: use --grid SxS")
        return grid[0]
    return grid[1]


def run_problem(args) -> int:
    problem, default_timeout = SUBCOMMANDS[args.command]
    budget = default_timeout if args.timeout is None else args.timeout
    g = _load_graph(args.graph, args.format)
    options, extra = _problem_options(args, g)
    if problem == "st":
        g = g.with_edge(options["s"], options["t"])
    formula_opts = {"cardinality": args.cardinality}
    report: dict = {
        "command": args.command,
        "problem": problem,
        "graph": {"name": g.name, "n": g.n, "m": g.m},
        "options": {k: v for k, v in options.items()},
        "solver": args.solver,
        "seed": args.seed,
        "timeout": budget,
    }
    report.update(extra)
    start = time.monotonic()
    if args.param is not None:
        value = _decision_value(args)
        enc, result, solution = solve_at(problem, g, value, budget, args.solver, args.seed,
                                         options, formula_opts)
        report.update(mode="decision", param=value, status=result.status.value,
                      optimum=None, bounds=None,
                      iterations=[{"param": value, "num_vars": enc.num_vars,
                                   "num_clauses": enc.num_clauses, "status": result.status.value,
                                   "seconds": round(result.stats.seconds, 6)}])
        timed_out = result.status is Status.TIMEOUT
    else:
        lo, hi = default_bounds(problem, g, options)
        if args.lower is not None:
            lo = args.lower
        if args.upper is not None:
            hi = args.upper
        if lo > hi:
            raise UsageError(f"empty parameter range [{lo}, {hi}]")
        outcome = solve_min_parameter(problem, g, (lo, hi), budget, args.solver, args.seed,
                                      options, formula_opts, graph_id=g.name)
        enc, solution = outcome.encoding, outcome.solution
        report.update(mode="sweep", param=outcome.optimum, status=outcome.status.value,
                      optimum=outcome.optimum, bounds=[lo, hi],
                      iterations=outcome.to_dict()["iterations"])
        timed_out = outcome.status is SearchStatus.TIMEOUT
    report["seconds"] = round(time.monotonic() - start, 6)
    report["solution"] = solution_to_json(solution)
    if problem == "st":
        levels = report["param"] if report["status"] in ("SAT", "OPTIMAL") else None
        report["levels"] = levels
        report["longest_path"] = None if levels is None else levels - 1
    if args.emit_cnf and enc is not None:
        with open(args.emit_cnf, "w") as fh:
            fh.write(to_dimacs(enc.formula))
    svg_path = getattr(args, "svg", None)
    if svg_path and solution is not None:
        if isinstance(solution, Layout2D):
            text = layout2d_svg(solution, grid=args.grid_lines)
        elif len(next(iter(solution.boxes.values())).bounds) == 2:
            text = boxes_svg(solution, grid=args.grid_lines)
        else:
            text = None
            print("svg: only 2-dimensional box layouts are drawn", file=sys.stderr)
        if text is not None:
            with open(svg_path, "w") as fh:
                fh.write(text)
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")
    return EXIT_TIMEOUT if timed_out else EXIT_OK


def run_solve_cnf(args) -> int:
    formula = parse_dimacs(_read_text(args.cnf))
    budget = args.timeout
    result = make_solver(args.solver, args.seed)(formula, budget)
    if args.json:
        json.dump({"status": result.status.value, "model": result.model() or None,
                   "num_vars": formula.num_vars, "num_clauses": formula.num_clauses,
                   "stats": {"decisions": result.stats.decisions, "conflicts": result.stats.conflicts,
                             "propagations": result.stats.propagations,
                             "seconds": round(result.stats.seconds, 6)}},
                  sys.stdout, indent=2)
        sys.stdout.write("\n")
    else:
        print(result.status.value)
        if result.sat:
            print("v " + " ".join(map(str, result.model() + [0])))
    return EXIT_TIMEOUT if result.status is Status.TIMEOUT else EXIT_OK


def run_bench(args) -> int:
    problem, default_timeout = SUBCOMMANDS[args.problem]
    timeout = default_timeout if args.timeout is None else args.timeout
    graphs = [(path, read_graph(path)) for path in args.graphs]
    options: dict = {}
    if problem == "st":
        instances = st_instances(graphs, seed=args.seed)
    else:
        instances = [Instance(gid, g) for gid, g in graphs]
    if problem == "bar-vis":
        k = args.k if args.k is not None else (1 if args.problem == "bar-k-vis" else 0)
        options["k"] = k
    if problem == "boxicity":
        options["d"] = args.dim
    rows = run_benchmark(instances, problem, timeout, early_stop=args.early_stop,
                         solver=args.solver, seed=args.seed, options=options, workers=args.workers)
    if args.out:
        write_rows(rows, args.out)
    for row in rows:
        sys.stdout.write(json.dumps(row) + "\n")
    return EXIT_OK


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "solve-cnf":
            return run_solve_cnf(args)
        if args.command == "bench":
            return run_bench(args)
        return run_problem(args)
    except (UsageError, GraphError, ParseError, DimacsError, EncodingError, CapacityError,
            OSError, ValueError) as exc:
        print(f"gridsat: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (SolverError, VerificationFailure, BoxConsistencyError) as exc:
        print(f"gridsat: internal error: {exc}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
