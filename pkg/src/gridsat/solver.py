"""SAT solving: a built-in CDCL engine and an adapter for external DIMACS solvers.

The built-in engine uses two watched literals (with a separate fast path for
binary clauses), first-UIP learning with local minimisation, VSIDS activity
with exponential decay, phase saving, Luby restarts and LBD-based clause
database reduction.
"""
from __future__ import annotations

import enum
import heapq
import os
import random
import shlex
import subprocess
import tempfile
import time
from dataclasses import dataclass, field
from typing import Sequence

from .cnf import CnfFormula, first_falsified, to_dimacs


class Status(str, enum.Enum):
    SAT = "SAT"
    UNSAT = "UNSAT"
    TIMEOUT = "TIMEOUT"


class SolverError(RuntimeError):
    pass


class ExternalSolverError(SolverError):
    pass


@dataclass
class SolveStats:
    decisions: int = 0
    conflicts: int = 0
    propagations: int = 0
    restarts: int = 0
    seconds: float = 0.0


@dataclass
class SolveResult:
    status: Status
    assignment: list[bool] | None = None
    stats: SolveStats = field(default_factory=SolveStats)

    @property
    def sat(self) -> bool:
        return self.status is Status.SAT

    def model(self) -> list[int]:
        """DIMACS-style model literals (empty unless SAT)."""
        if self.assignment is None:
            return []
        return [v if self.assignment[v] else -v for v in range(1, len(self.assignment))]


def _luby(i: int) -> int:
    """i-th element (1-based) of the Luby sequence 1,1,2,1,1,2,4,..."""
    k = 1
    while (1 << k) - 1 < i:
        k += 1
    while True:
        if i == (1 << k) - 1:
            return 1 << (k - 1)
        i -= (1 << (k - 1)) - 1
        k = 1
        while (1 << k) - 1 < i:
            k += 1


class CdclSolver:
    """Single-use CDCL search over a fixed clause list.

    Literals are kept internally as ``2*v`` (positive) and ``2*v+1``
    (negative); ``lit ^ 1`` negates.
    """

    restart_unit = 100
    var_decay = 0.95
    clause_decay = 0.999

    def __init__(self, num_vars: int, clauses: Sequence[Sequence[int]], seed: int = 0):
        self.n = num_vars
        n2 = 2 * num_vars + 2
        self.lval = [0] * n2            # 1 true, -1 false, 0 unassigned
        self.level = [0] * (num_vars + 1)
        self.reason = [-1] * (num_vars + 1)
        self.trail: list[int] = []
        self.trail_lim: list[int] = []
        self.qhead = 0
        self.watches: list[list[int]] = [[] for _ in range(n2)]
        self.bin_watches: list[list[tuple[int, int]]] = [[] for _ in range(n2)]
        self.clauses: list[list[int] | None] = []
        self.learnt_info: dict[int, list] = {}    # clause index -> [lbd, activity]
        self.cla_inc = 1.0
        self.activity = [0.0] * (num_vars + 1)
        self.var_inc = 1.0
        self.phase = [1] * (num_vars + 1)          # 1 = try negative literal first
        self.seen = [0] * (num_vars + 1)
        self.stats = SolveStats()
        self.unsat = False
        self.pending_units: list[tuple[int, int]] = []

        if seed:
            rng = random.Random(seed)
            self.activity = [rng.random() * 1e-5 for _ in range(num_vars + 1)]
        for raw in clauses:
            self._add_input_clause(raw)
        self.heap = [(-self.activity[v], v) for v in range(1, num_vars + 1)]
        heapq.heapify(self.heap)

    # --- construction ---------------------------------------------------
    def _add_input_clause(self, raw: Sequence[int]) -> None:
        lits = set()
        for x in raw:
            lit = 2 * x if x > 0 else -2 * x + 1
            if lit ^ 1 in lits:
                return                                  # tautology
            lits.add(lit)
        if not lits:
            self.unsat = True
            return
        clause = sorted(lits)
        if len(clause) == 1:
            self.pending_units.append((clause[0], -1))
            return
        self._attach(clause)

    def _attach(self, clause: list[int]) -> int:
        ci = len(self.clauses)
        self.clauses.append(clause)
        if len(clause) == 2:
            a, b = clause
            self.bin_watches[a].append((b, ci))
            self.bin_watches[b].append((a, ci))
        else:
            self.watches[clause[0]].append(ci)
            self.watches[clause[1]].append(ci)
        return ci

    # --- core -----------------------------------------------------------
    def _enqueue(self, lit: int, reason: int) -> None:
        v = lit >> 1
        self.lval[lit] = 1
        self.lval[lit ^ 1] = -1
        self.level[v] = len(self.trail_lim)
        self.reason[v] = reason
        self.trail.append(lit)

    def _propagate(self) -> int:
        """Unit propagation; returns a conflicting clause index or -1."""
        lval = self.lval
        level = self.level
        reason = self.reason
        trail = self.trail
        clauses = self.clauses
        watches = self.watches
        bin_watches = self.bin_watches
        dl = len(self.trail_lim)
        qhead = self.qhead
        props = 0
        while qhead < len(trail):
            p = trail[qhead]
            qhead += 1
            props += 1
            fl = p ^ 1
            for other, ci in bin_watches[fl]:
                val = lval[other]
                if val == 1:
                    continue
                if val == -1:
                    self.qhead = len(trail)
                    self.stats.propagations += props
                    return ci
                lval[other] = 1
                lval[other ^ 1] = -1
                level[other >> 1] = dl
                reason[other >> 1] = ci
                trail.append(other)
            ws = watches[fl]
            if not ws:
                continue
            kept = []
            watches[fl] = kept
            nws = len(ws)
            i = 0
            while i < nws:
                ci = ws[i]
                i += 1
                c = clauses[ci]
                if c is None:
                    continue
                if c[0] == fl:
                    c[0] = c[1]
                    c[1] = fl
                first = c[0]
                if lval[first] == 1:
                    kept.append(ci)
                    continue
                for k in range(2, len(c)):
                    lk = c[k]
                    if lval[lk] != -1:
                        c[1] = lk
                        c[k] = fl
                        watches[lk].append(ci)
                        break
                else:
                    kept.append(ci)
                    if lval[first] == -1:
                        kept.extend(ws[i:])
                        self.qhead = len(trail)
                        self.stats.propagations += props
                        return ci
                    lval[first] = 1
                    lval[first ^ 1] = -1
                    level[first >> 1] = dl
                    reason[first >> 1] = ci
                    trail.append(first)
        self.qhead = qhead
        self.stats.propagations += props
        return -1

    def _bump_var(self, v: int) -> None:
        act = self.activity
        act[v] += self.var_inc
        if act[v] > 1e100:
            for i in range(1, self.n + 1):
                act[i] *= 1e-100
            self.var_inc *= 1e-100
            self.heap = [(-act[u], u) for u in range(1, self.n + 1) if self.lval[2 * u] == 0]
            heapq.heapify(self.heap)
        elif self.lval[2 * v] == 0:
            heapq.heappush(self.heap, (-act[v], v))

    def _bump_clause(self, ci: int) -> None:
        info = self.learnt_info.get(ci)
        if info is None:
            return
        info[1] += self.cla_inc
        if info[1] > 1e20:
            for inf in self.learnt_info.values():
                inf[1] *= 1e-20
            self.cla_inc *= 1e-20

    def _analyze(self, confl: int) -> tuple[list[int], int, int]:
        seen = self.seen
        level = self.level
        reason = self.reason
        trail = self.trail
        clauses = self.clauses
        dl = len(self.trail_lim)
        learnt = [0]
        counter = 0
        p = -1
        idx = len(trail) - 1
        touched = []
        while True:
            self._bump_clause(confl)
            c = clauses[confl]
            for q in c:
                if p != -1 and q == p:
                    continue
                v = q >> 1
                if not seen[v] and level[v] > 0:
                    seen[v] = 1
                    touched.append(v)
                    self._bump_var(v)
                    if level[v] >= dl:
                        counter += 1
                    else:
                        learnt.append(q)
            while not seen[trail[idx] >> 1]:
                idx -= 1
            p = trail[idx]
            idx -= 1
            confl = reason[p >> 1]
            seen[p >> 1] = 0
            counter -= 1
            if counter <= 0:
                break
        learnt[0] = p ^ 1

        # local minimisation: drop literals implied by other learnt literals
        if len(learnt) > 2:
            kept = [learnt[0]]
            for q in learnt[1:]:
                r = reason[q >> 1]
                if r == -1:
                    kept.append(q)
                    continue
                for x in clauses[r]:
                    xv = x >> 1
                    if xv != q >> 1 and not seen[xv] and level[xv] > 0:
                        kept.append(q)
                        break
            learnt = kept
        for v in touched:
            seen[v] = 0

        if len(learnt) == 1:
            back = 0
        else:
            best = 1
            for i in range(2, len(learnt)):
                if level[learnt[i] >> 1] > level[learnt[best] >> 1]:
                    best = i
            learnt[1], learnt[best] = learnt[best], learnt[1]
            back = level[learnt[1] >> 1]
        lbd = len({level[q >> 1] for q in learnt})
        return learnt, back, lbd

    def _cancel_until(self, lvl: int) -> None:
        if len(self.trail_lim) <= lvl:
            return
        lval = self.lval
        phase = self.phase
        act = self.activity
        heap = self.heap
        stop = self.trail_lim[lvl]
        for i in range(len(self.trail) - 1, stop - 1, -1):
            lit = self.trail[i]
            v = lit >> 1
            lval[lit] = 0
            lval[lit ^ 1] = 0
            phase[v] = lit & 1
            self.reason[v] = -1
            heapq.heappush(heap, (-act[v], v))
        del self.trail[stop:]
        del self.trail_lim[lvl:]
        self.qhead = len(self.trail)

    def _pick_branch(self) -> int:
        heap = self.heap
        lval = self.lval
        act = self.activity
        while heap:
            neg_a, v = heapq.heappop(heap)
            if lval[2 * v] == 0 and -neg_a == act[v]:
                return 2 * v + self.phase[v]
        # stale entries exhausted: fall back to a scan
        for v in range(1, self.n + 1):
            if lval[2 * v] == 0:
                return 2 * v + self.phase[v]
        return -1

    def _reduce_db(self) -> None:
        locked = set()
        for lit in self.trail:
            r = self.reason[lit >> 1]
            if r != -1:
                locked.add(r)
        cands = [(info[0], info[1], ci) for ci, info in self.learnt_info.items()
                 if ci not in locked and info[0] > 2 and len(self.clauses[ci]) > 2]
        cands.sort(key=lambda t: (-t[0], t[1]))
        for _, _, ci in cands[: len(cands) // 2]:
            self.clauses[ci] = None
            del self.learnt_info[ci]

    def solve(self, deadline: float | None = None) -> Status:
        if self.unsat:
            return Status.UNSAT
        for lit, r in self.pending_units:
            val = self.lval[lit]
            if val == -1:
                return Status.UNSAT
            if val == 0:
                self._enqueue(lit, r)
        if self._propagate() != -1:
            return Status.UNSAT

        stats = self.stats
        restart_idx = 1
        conflict_budget = _luby(restart_idx) * self.restart_unit
        conflicts_here = 0
        max_learnts = max(len(self.clauses) // 3, 2000)
        next_check = stats.propagations + 2048
        while True:
            confl = self._propagate()
            if confl != -1:
                stats.conflicts += 1
                conflicts_here += 1
                if not self.trail_lim:
                    return Status.UNSAT
                learnt, back, lbd = self._analyze(confl)
                self._cancel_until(back)
                if len(learnt) == 1:
                    self._enqueue(learnt[0], -1)
                else:
                    ci = self._attach(learnt)
                    if len(learnt) > 2:
                        self.learnt_info[ci] = [lbd, self.cla_inc]
                    self._enqueue(learnt[0], ci)
                self.var_inc /= self.var_decay
                self.cla_inc /= self.clause_decay
                continue

            if deadline is not None and stats.propagations >= next_check:
                next_check = stats.propagations + 2048
                if time.monotonic() > deadline:
                    return Status.TIMEOUT
            if conflicts_here >= conflict_budget:
                stats.restarts += 1
                restart_idx += 1
                conflict_budget = _luby(restart_idx) * self.restart_unit
                conflicts_here = 0
                self._cancel_until(0)
            if len(self.learnt_info) > max_learnts + len(self.trail):
                self._reduce_db()
                max_learnts = int(max_learnts * 1.1)
            lit = self._pick_branch()
            if lit == -1:
                return Status.SAT
            stats.decisions += 1
            self.trail_lim.append(len(self.trail))
            self._enqueue(lit, -1)

    def assignment(self) -> list[bool]:
        return [False] + [self.lval[2 * v] == 1 for v in range(1, self.n + 1)]


def _checked(formula: CnfFormula, assignment: list[bool], who: str) -> None:
    bad = first_falsified(formula.clauses, assignment)
    if bad is not None:
        raise SolverError(f"{who} returned a model falsifying clause #{bad}: {formula.clauses[bad]}")


def _solve_compiled(formula: CnfFormula, deadline: float | None, seed: int,
                    max_conflicts: int | None) -> tuple[Status, list[bool] | None, SolveStats]:
    from . import _kernel

    arena, starts, lengths, units, trivially_unsat = _kernel.prepare(formula.num_vars, formula.clauses)
    if trivially_unsat:
        return Status.UNSAT, None, SolveStats()
    code, model, raw = _kernel.search(
        formula.num_vars, arena, starts, lengths, units,
        -1.0 if deadline is None else deadline, seed,
        -1 if max_conflicts is None else max_conflicts)
    stats = SolveStats(decisions=int(raw[0]), conflicts=int(raw[1]),
                       propagations=int(raw[2]), restarts=int(raw[3]))
    if code == _kernel.SAT:
        return Status.SAT, [bool(x) for x in model], stats
    if code == _kernel.UNSAT:
        return Status.UNSAT, None, stats
    return Status.TIMEOUT, None, stats


def solve(formula: CnfFormula, budget: float | None = None, seed: int = 0,
          engine: str = "compiled", max_conflicts: int | None = None) -> SolveResult:
    """Solve with the built-in engine; ``budget`` is a wall-clock limit in seconds.

    ``engine="compiled"`` runs the numba kernel, ``"python"`` the pure-Python
    search (same algorithm, much slower, no compilation).  ``max_conflicts``
    is only honoured by the compiled engine; hitting it reports TIMEOUT.
    """
    start = time.monotonic()
    if budget is not None and budget <= 0:
        return SolveResult(Status.TIMEOUT, stats=SolveStats())
    deadline = None if budget is None else start + budget
    if engine == "compiled":
        status, assignment, stats = _solve_compiled(formula, deadline, seed, max_conflicts)
    elif engine == "python":
        search = CdclSolver(formula.num_vars, formula.clauses, seed=seed)
        status = search.solve(deadline)
        stats = search.stats
        assignment = search.assignment() if status is Status.SAT else None
    else:
        raise ValueError(f"unknown engine {engine!r}")
    stats.seconds = time.monotonic() - start
    if status is Status.SAT:
        _checked(formula, assignment, "internal solver")
    return SolveResult(status, assignment, stats)


# --- external solvers -------------------------------------------------------

_SAT_WORDS = {"SAT", "SATISFIABLE", "S SATISFIABLE"}
_UNSAT_WORDS = {"UNSAT", "UNSATISFIABLE", "S UNSATISFIABLE"}
_OK_EXIT_CODES = {0, 10, 20}


def parse_solver_output(text: str, num_vars: int) -> tuple[Status, list[bool] | None]:
    """Parse the conventional ``SAT``/``UNSAT`` line plus model literal lines."""
    status = None
    literals: list[int] = []
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("c"):
            continue
        upper = line.upper()
        if upper in _SAT_WORDS:
            status = Status.SAT
            continue
        if upper in _UNSAT_WORDS:
            status = Status.UNSAT
            continue
        if upper in ("INDET", "UNKNOWN", "S UNKNOWN", "S INDETERMINATE"):
            status = Status.TIMEOUT
            continue
        if status is Status.SAT:
            tokens = line[1:].split() if line.startswith("v") else line.split()
            try:
                literals.extend(int(t) for t in tokens)
            except ValueError:
                raise ExternalSolverError(f"unparseable model line {line!r}") from None
    if status is None:
        raise ExternalSolverError("solver output has no SAT/UNSAT line")
    if status is not Status.SAT:
        return status, None
    assignment = [False] * (num_vars + 1)
    for lit in literals:
        if lit == 0:
            continue
        if abs(lit) > num_vars:
            raise ExternalSolverError(f"model literal {lit} out of range")
        assignment[abs(lit)] = lit > 0
    return status, assignment


def solve_external(formula: CnfFormula, solver_command: str | Sequence[str],
                   budget: float | None = None) -> SolveResult:
    """Run an external DIMACS solver and verify its model.

    The DIMACS file path is substituted for ``{input}`` in the command, or
    appended as the last argument.  If the command contains ``{output}`` the
    result is read from that file (MiniSat style), otherwise from stdout.
    """
    argv = shlex.split(solver_command) if isinstance(solver_command, str) else list(solver_command)
    start = time.monotonic()
    with tempfile.TemporaryDirectory(prefix="gridsat-") as tmp:
        cnf_path = os.path.join(tmp, "formula.cnf")
        out_path = os.path.join(tmp, "result.txt")
        with open(cnf_path, "w") as fh:
            fh.write(to_dimacs(formula))
        uses_output = any("{output}" in a for a in argv)
        if any("{input}" in a for a in argv):
            argv = [a.replace("{input}", cnf_path) for a in argv]
        else:
            argv.append(cnf_path)
        argv = [a.replace("{output}", out_path) for a in argv]
        if budget is not None and budget <= 0:
            return SolveResult(Status.TIMEOUT, stats=SolveStats(seconds=0.0))
        try:
            proc = subprocess.run(argv, capture_output=True, text=True, timeout=budget)
        except subprocess.TimeoutExpired:
            return SolveResult(Status.TIMEOUT, stats=SolveStats(seconds=time.monotonic() - start))
        except OSError as exc:
            raise ExternalSolverError(f"cannot run {argv[0]!r}: {exc}") from exc
        if proc.returncode not in _OK_EXIT_CODES:
            raise ExternalSolverError(
                f"{argv[0]} exited with code {proc.returncode}: {proc.stderr.strip()[:200]}")
        text = proc.stdout
        if uses_output:
            try:
                with open(out_path) as fh:
                    text = fh.read()
            except OSError:
                raise ExternalSolverError("solver wrote no result file") from None
        status, assignment = parse_solver_output(text, formula.num_vars)
    stats = SolveStats(seconds=time.monotonic() - start)
    if status is Status.SAT:
        bad = first_falsified(formula.clauses, assignment)
        if bad is not None:
            raise ExternalSolverError(
                f"external model falsifies clause #{bad}: {formula.clauses[bad]}")
    return SolveResult(status, assignment, stats)


def make_solver(which: str | None = None, seed: int = 0):
    """Return ``f(formula, budget) -> SolveResult``.

    ``which`` is ``"internal"`` (compiled engine), ``"internal-python"`` or an
    external solver command line.
    """
    if which is None or which == "internal":
        return lambda formula, budget=None: solve(formula, budget, seed=seed)
    if which == "internal-python":
        return lambda formula, budget=None: solve(formula, budget, seed=seed, engine="python")
    return lambda formula, budget=None: solve_external(formula, which, budget)
