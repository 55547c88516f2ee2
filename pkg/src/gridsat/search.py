"""Minimum-parameter search and a batch benchmark harness.

A sweep starts at a lower bound and raises the parameter by one until the
formula becomes satisfiable; the model is decoded and independently
verified before the value is reported.
"""
from __future__ import annotations

import csv
import enum
import json
import math
import random
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import Any, Callable, Iterable

from .encoders import (
    decode_bandwidth,
    decode_boxicity,
    decode_layout2d,
    decode_orientation,
    decode_pathwidth,
    encode_bandwidth,
    encode_bar_visibility,
    encode_boxicity,
    encode_pathwidth,
    encode_st_orientation,
)
from .graph import Graph, biconnected_components
from .solver import Status, make_solver
from .verify import (
    verify_bandwidth,
    verify_bar_visibility,
    verify_boxicity,
    verify_pathwidth,
    verify_st_orientation,
)


class SearchStatus(str, enum.Enum):
    OPTIMAL = "OPTIMAL"
    TIMEOUT = "TIMEOUT"
    INFEASIBLE_IN_RANGE = "INFEASIBLE_IN_RANGE"


class VerificationFailure(RuntimeError):
    """A decoded model failed its independent check: the encoding is wrong."""


@dataclass
class Problem:
    name: str
    param: str
    encode: Callable[..., Any]
    decode: Callable[..., Any]
    verify: Callable[..., Any]


def _enc_pw(g, v, o, fo):
    return encode_pathwidth(g, v, **fo)


def _enc_bw(g, v, o, fo):
    return encode_bandwidth(g, v, **fo)


def _enc_st(g, v, o, fo):
    return encode_st_orientation(g, o["s"], o["t"], v, **fo)


def _enc_bar(g, v, o, fo):
    return encode_bar_visibility(g, o.get("height") or g.n, v, k=o.get("k", 0),
                                 endpoints=o.get("endpoints", True), **fo)


def _enc_box(g, v, o, fo):
    return encode_boxicity(g, o.get("d", 2), v, **fo)


PROBLEMS: dict[str, Problem] = {
    "pathwidth": Problem("pathwidth", "p", _enc_pw, decode_pathwidth,
                         lambda g, sol, v, o: verify_pathwidth(g, sol, v)),
    "bandwidth": Problem("bandwidth", "k", _enc_bw, decode_bandwidth,
                         lambda g, sol, v, o: verify_bandwidth(g, sol, v)),
    "st": Problem("st", "levels", _enc_st, decode_orientation,
                  lambda g, sol, v, o: verify_st_orientation(g, sol, o["s"], o["t"], v)),
    "bar-vis": Problem("bar-vis", "W", _enc_bar, decode_layout2d,
                       lambda g, sol, v, o: verify_bar_visibility(g, sol, o.get("k", 0))),
    "boxicity": Problem("boxicity", "side", _enc_box, decode_boxicity,
                        lambda g, sol, v, o: verify_boxicity(g, sol, o.get("d", 2))),
}


def default_bounds(problem: str, g: Graph, options: dict | None = None) -> tuple[int, int]:
    """Cheap a-priori range for the sweep parameter."""
    n = g.n
    if problem == "pathwidth":
        return (0, 0) if g.m == 0 else (1, n - 1)
    if problem == "bandwidth":
        return (0, 0) if g.m == 0 else (math.ceil(g.max_degree() / 2), n - 1)
    if problem == "st":
        return (2, 2) if n == 2 else (3, n)
    if problem == "bar-vis":
        return (1, n)
    if problem == "boxicity":
        return (3, max(n, 3))
    raise KeyError(f"unknown problem {problem!r}")


@dataclass
class IterationRecord:
    param: int
    num_vars: int
    num_clauses: int
    status: str
    seconds: float


@dataclass
class SearchOutcome:
    problem: str
    graph_id: str
    status: SearchStatus
    optimum: int | None
    bounds: tuple[int, int]
    iterations: list[IterationRecord] = field(default_factory=list)
    total_seconds: float = 0.0
    solution: Any = None
    encoding: Any = None

    def to_dict(self) -> dict:
        return {
            "problem": self.problem,
            "graph": self.graph_id,
            "status": self.status.value,
            "optimum": self.optimum,
            "bounds": list(self.bounds),
            "iterations": [asdict(r) for r in self.iterations],
            "total_seconds": round(self.total_seconds, 6),
        }


def solve_at(problem: str, g: Graph, value: int, budget: float | None = None,
             solver: str | None = None, seed: int = 0, options: dict | None = None,
             formula_opts: dict | None = None):
    """Single decision query. Returns ``(encoding, result, solution)``; the
    solution is decoded and verified when the result is SAT."""
    spec = PROBLEMS[problem]
    options = options or {}
    enc = spec.encode(g, value, options, formula_opts or {})
    result = make_solver(solver, seed)(enc.formula, budget)
    solution = None
    if result.status is Status.SAT:
        solution = spec.decode(enc, result.assignment)
        verdict = spec.verify(g, solution, value, options)
        if not verdict:
            raise VerificationFailure(f"{problem} at {value}: " + "; ".join(verdict.problems))
    return enc, result, solution


def solve_min_parameter(problem: str, g: Graph, bounds: tuple[int, int] | None = None,
                        total_budget: float | None = None, solver: str | None = None,
                        seed: int = 0, options: dict | None = None,
                        formula_opts: dict | None = None, graph_id: str = "") -> SearchOutcome:
    """Linear upward scan; each iteration may use whatever budget is left."""
    lo, hi = bounds if bounds is not None else default_bounds(problem, g, options)
    if lo > hi:
        raise ValueError(f"empty parameter range [{lo}, {hi}]")
    outcome = SearchOutcome(problem, graph_id or g.name, SearchStatus.INFEASIBLE_IN_RANGE, None, (lo, hi))
    start = time.monotonic()
    for value in range(lo, hi + 1):
        remaining = None if total_budget is None else total_budget - (time.monotonic() - start)
        if remaining is not None and remaining <= 0:
            outcome.status = SearchStatus.TIMEOUT
            break
        t0 = time.monotonic()
        enc, result, solution = solve_at(problem, g, value, remaining, solver, seed, options, formula_opts)
        outcome.encoding = enc
        outcome.iterations.append(IterationRecord(value, enc.num_vars, enc.num_clauses,
                                                  result.status.value, time.monotonic() - t0))
        if result.status is Status.SAT:
            outcome.status = SearchStatus.OPTIMAL
            outcome.optimum = value
            outcome.solution = solution
            break
        if result.status is Status.TIMEOUT:
            outcome.status = SearchStatus.TIMEOUT
            break
    outcome.total_seconds = time.monotonic() - start
    return outcome


# --- benchmark harness -------------------------------------------------------

@dataclass
class Instance:
    graph_id: str
    graph: Graph
    options: dict = field(default_factory=dict)
    seed: int | None = None


BENCH_FIELDS = ["graph", "n", "m", "problem", "status", "optimum", "iterations", "seconds", "seed"]


def st_instances(graphs: Iterable[tuple[str, Graph]], seed: int = 0) -> list[Instance]:
    """Blocks with at least three vertices, each with a random (s, t) pair;
    the s-t edge is added when missing."""
    rng = random.Random(seed)
    out = []
    for gid, g in graphs:
        for bi, block in enumerate(biconnected_components(g)):
            if block.n < 3:
                continue
            s, t = rng.sample(range(block.n), 2)
            inst_seed = rng.randrange(2**32)
            out.append(Instance(f"{gid}#b{bi}", block.with_edge(s, t), {"s": s, "t": t}, inst_seed))
    return out


def _run_one(args) -> dict:
    inst, problem, timeout, solver, seed, options = args
    opts = dict(options)
    opts.update(inst.options)
    outcome = solve_min_parameter(problem, inst.graph, total_budget=timeout, solver=solver,
                                  seed=seed, options=opts, graph_id=inst.graph_id)
    return {
        "graph": inst.graph_id,
        "n": inst.graph.n,
        "m": inst.graph.m,
        "problem": problem,
        "status": outcome.status.value,
        "optimum": outcome.optimum,
        "iterations": len(outcome.iterations),
        "seconds": round(outcome.total_seconds, 4),
        "seed": inst.seed if inst.seed is not None else seed,
    }


def run_benchmark(instances: Iterable[Instance], problem: str, timeout: float,
                  early_stop: int | None = 400, solver: str | None = None, seed: int = 0,
                  options: dict | None = None, workers: int = 1) -> list[dict]:
    """Run the sweep on every instance in ascending ``n + m``.

    Stops once more than ``early_stop`` consecutive instances time out.
    With ``workers > 1`` instances run in a process pool but rows are still
    consumed (and the stop rule applied) in size order.
    """
    ordered = sorted(instances, key=lambda i: (i.graph.n + i.graph.m, i.graph_id))
    jobs = [(inst, problem, timeout, solver, seed, options or {}) for inst in ordered]
    rows: list[dict] = []
    streak = 0

    def consume(row: dict) -> bool:
        nonlocal streak
        rows.append(row)
        streak = streak + 1 if row["status"] == SearchStatus.TIMEOUT.value else 0
        return early_stop is not None and streak > early_stop

    if workers <= 1:
        for job in jobs:
            if consume(_run_one(job)):
                break
        return rows
    with ProcessPoolExecutor(max_workers=workers) as pool:
        futures = [pool.submit(_run_one, job) for job in jobs]
        for fut in futures:
            if consume(fut.result()):
                for rest in futures:
                    rest.cancel()
                break
    return rows


def write_rows(rows: list[dict], path: str, fmt: str | None = None) -> None:
    fmt = fmt or ("csv" if path.endswith(".csv") else "jsonl")
    with open(path, "w", newline="") as fh:
        if fmt == "csv":
            writer = csv.DictWriter(fh, fieldnames=BENCH_FIELDS)
            writer.writeheader()
            writer.writerows(rows)
        else:
            for row in rows:
                fh.write(json.dumps(row) + "\n")
