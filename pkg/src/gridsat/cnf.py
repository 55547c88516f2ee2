"""Variable registry, clause database, cardinality translations and DIMACS I/O.

Literals are non-zero ints in the DIMACS convention: ``v`` is the positive
literal of variable ``v`` and ``-v`` its negation.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from math import comb
from typing import Hashable, Iterable, Sequence

DEFAULT_CLAUSE_LIMIT = 10_000_000

Clause = list[int]


class CapacityError(RuntimeError):
    """A single constraint would emit more clauses than the configured guard."""

    def __init__(self, constraint: str, estimate: int, limit: int):
        self.constraint = constraint
        self.estimate = estimate
        self.limit = limit
        super().__init__(
            f"constraint {constraint!r} would generate {estimate} clauses "
            f"(guard limit {limit})"
        )


class DimacsError(ValueError):
    pass


class VarRegistry:
    """Injective map from structured names to consecutive variable ids."""

    def __init__(self):
        self._ids: dict[Hashable, int] = {}
        self._names: list[Hashable] = [None]

    def new_var(self, name: Hashable) -> int:
        if name in self._ids:
            raise KeyError(f"variable {name!r} already registered")
        vid = len(self._names)
        self._ids[name] = vid
        self._names.append(name)
        return vid

    def __getitem__(self, name: Hashable) -> int:
        try:
            return self._ids[name]
        except KeyError:
            raise KeyError(f"unregistered variable {name!r}") from None

    def __contains__(self, name: Hashable) -> bool:
        return name in self._ids

    def __len__(self) -> int:
        return len(self._names) - 1

    def name_of(self, vid: int) -> Hashable:
        if not 1 <= vid < len(self._names):
            raise KeyError(f"variable id {vid} out of range")
        return self._names[vid]

    def names(self) -> list[Hashable]:
        return self._names[1:]


def new_var(reg: VarRegistry, name: Hashable) -> int:
    return reg.new_var(name)


# --- the four translation rules -------------------------------------------

def _guard(constraint: str, estimate: int, limit: int | None) -> None:
    if limit is not None and estimate > limit:
        raise CapacityError(constraint, estimate, limit)


def encode_at_least_activated(ys: Sequence[int], z: int) -> list[Clause]:
    """``sum(ys) >= z`` as the single clause ``y1 | ... | yk | -z``."""
    if not ys:
        raise ValueError("at-least-activated needs at least one variable")
    return [list(ys) + [-z]]


def encode_at_most(ys: Sequence[int], c: int, *, limit: int | None = DEFAULT_CLAUSE_LIMIT,
                   constraint: str = "at-most") -> list[Clause]:
    """``sum(ys) <= c``: one all-negative clause per (c+1)-subset."""
    k = len(ys)
    if c < 0:
        return [[]]
    if k <= c:
        return []
    _guard(constraint, comb(k, c + 1), limit)
    return [[-y for y in subset] for subset in combinations(ys, c + 1)]


def encode_at_least(ys: Sequence[int], c: int, *, limit: int | None = DEFAULT_CLAUSE_LIMIT,
                    constraint: str = "at-least") -> list[Clause]:
    """``sum(ys) >= c``: one all-positive clause per (k-c+1)-subset.

    ``c > k`` cannot be met and yields the contradiction marker ``[[]]``.
    """
    k = len(ys)
    if c <= 0:
        return []
    if c > k:
        return [[]]
    _guard(constraint, comb(k, k - c + 1), limit)
    return [list(subset) for subset in combinations(ys, k - c + 1)]


def encode_exactly(ys: Sequence[int], c: int, *, limit: int | None = DEFAULT_CLAUSE_LIMIT,
                   constraint: str = "exactly") -> list[Clause]:
    return (encode_at_most(ys, c, limit=limit, constraint=constraint)
            + encode_at_least(ys, c, limit=limit, constraint=constraint))


# --- sequential counter (opt-in) -------------------------------------------

def sequential_at_most(ys: Sequence[int], c: int, fresh) -> list[Clause]:
    """Sinz-style sequential counter for ``sum(ys) <= c``.

    ``fresh()`` must return a new variable id on every call.
    """
    k = len(ys)
    if c < 0:
        return [[]]
    if k <= c:
        return []
    if c == 0:
        return [[-y] for y in ys]
    # s[i][j] <=> at least j+1 of ys[0..i] are true (only the -> direction is needed)
    s = [[fresh() for _ in range(c)] for _ in range(k - 1)]
    out: list[Clause] = [[-ys[0], s[0][0]]]
    out.extend([-s[0][j]] for j in range(1, c))
    for i in range(1, k - 1):
        out.append([-ys[i], s[i][0]])
        out.append([-s[i - 1][0], s[i][0]])
        for j in range(1, c):
            out.append([-ys[i], -s[i - 1][j - 1], s[i][j]])
            out.append([-s[i - 1][j], s[i][j]])
        out.append([-ys[i], -s[i - 1][c - 1]])
    out.append([-ys[k - 1], -s[k - 2][c - 1]])
    return out


def sequential_at_least(ys: Sequence[int], c: int, fresh) -> list[Clause]:
    k = len(ys)
    if c <= 0:
        return []
    if c > k:
        return [[]]
    return sequential_at_most([-y for y in ys], k - c, fresh)


# --- formula ---------------------------------------------------------------

@dataclass
class CnfFormula:
    """Clause database over a :class:`VarRegistry`.

    ``cardinality`` selects how at-most/at-least constraints are translated:
    ``"binomial"`` (subset expansion, no auxiliaries) or ``"sequential"``.
    ``keep_tags`` records which constraint emitted each clause.
    """

    registry: VarRegistry = field(default_factory=VarRegistry)
    clauses: list[Clause] = field(default_factory=list)
    tags: list[str] = field(default_factory=list)
    cardinality: str = "binomial"
    clause_limit: int | None = DEFAULT_CLAUSE_LIMIT
    keep_tags: bool = True
    contradiction: str | None = None
    _extra_vars: int = 0

    def __post_init__(self):
        if self.cardinality not in ("binomial", "sequential"):
            raise ValueError(f"unknown cardinality encoding {self.cardinality!r}")

    @property
    def num_vars(self) -> int:
        return len(self.registry)

    @property
    def num_clauses(self) -> int:
        return len(self.clauses)

    def new_var(self, name: Hashable) -> int:
        return self.registry.new_var(name)

    def var(self, name: Hashable) -> int:
        return self.registry[name]

    def _fresh(self) -> int:
        self._extra_vars += 1
        return self.registry.new_var(("aux", self._extra_vars))

    def add_clause(self, lits: Iterable[int], tag: str = "") -> None:
        clause = list(lits)
        n = self.num_vars
        for lit in clause:
            if lit == 0 or abs(lit) > n:
                raise ValueError(f"literal {lit} does not reference a registered variable")
        if not clause and self.contradiction is None:
            self.contradiction = tag or "empty clause"
        self.clauses.append(clause)
        if self.keep_tags:
            self.tags.append(tag)

    def extend(self, clauses: Iterable[Clause], tag: str = "") -> None:
        for clause in clauses:
            self.add_clause(clause, tag)

    # cardinality helpers honour the formula's encoding choice and guard
    def at_least_activated(self, ys: Sequence[int], z: int, tag: str = "") -> None:
        self.extend(encode_at_least_activated(ys, z), tag)

    def at_most(self, ys: Sequence[int], c: int, tag: str = "") -> None:
        if self.cardinality == "sequential" and len(ys) > c + 1 and c > 0:
            self.extend(sequential_at_most(ys, c, self._fresh), tag)
        else:
            self.extend(encode_at_most(ys, c, limit=self.clause_limit, constraint=tag), tag)

    def at_least(self, ys: Sequence[int], c: int, tag: str = "") -> None:
        k = len(ys)
        if self.cardinality == "sequential" and 1 < c < k:
            self.extend(sequential_at_least(ys, c, self._fresh), tag)
        else:
            self.extend(encode_at_least(ys, c, limit=self.clause_limit, constraint=tag), tag)

    def exactly(self, ys: Sequence[int], c: int, tag: str = "") -> None:
        self.at_most(ys, c, tag)
        self.at_least(ys, c, tag)

    def is_satisfied_by(self, assignment: Sequence[bool]) -> bool:
        """``assignment[v]`` is the value of variable ``v`` (index 0 unused)."""
        return first_falsified(self.clauses, assignment) is None


def first_falsified(clauses: Iterable[Clause], assignment: Sequence[bool]) -> int | None:
    for idx, clause in enumerate(clauses):
        for lit in clause:
            if assignment[lit] if lit > 0 else not assignment[-lit]:
                break
        else:
            return idx
    return None


# --- DIMACS ----------------------------------------------------------------

def to_dimacs(formula: CnfFormula, comments: bool = False) -> str:
    lines = []
    if comments:
        for vid, name in enumerate(formula.registry.names(), start=1):
            lines.append(f"c var {vid} {name!r}")
    lines.append(f"p cnf {formula.num_vars} {formula.num_clauses}")
    with_tags = comments and formula.keep_tags
    for idx, clause in enumerate(formula.clauses):
        if with_tags and formula.tags[idx] and (idx == 0 or formula.tags[idx] != formula.tags[idx - 1]):
            lines.append(f"c {formula.tags[idx]}")
        lines.append(" ".join(map(str, clause + [0])))
    return "\n".join(lines) + "\n"


def parse_dimacs(text: str) -> CnfFormula:
    header = None
    clauses: list[Clause] = []
    current: Clause = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("c") or line.startswith("%"):
            continue
        if line.startswith("p"):
            parts = line.split()
            if header is not None or len(parts) != 4 or parts[1] != "cnf" \
                    or not parts[2].isdigit() or not parts[3].isdigit():
                raise DimacsError(f"line {lineno}: malformed header {line!r}")
            header = (int(parts[2]), int(parts[3]))
            continue
        if header is None:
            raise DimacsError(f"line {lineno}: clause before 'p cnf' header")
        for tok in line.split():
            try:
                lit = int(tok)
            except ValueError:
                raise DimacsError(f"line {lineno}: bad literal {tok!r}") from None
            if lit == 0:
                clauses.append(current)
                current = []
            elif abs(lit) > header[0]:
                raise DimacsError(f"line {lineno}: literal {lit} exceeds declared {header[0]} variables")
            else:
                current.append(lit)
    if header is None:
        raise DimacsError("missing 'p cnf' header")
    if current:
        clauses.append(current)
    if len(clauses) != header[1]:
        raise DimacsError(f"header declares {header[1]} clauses, found {len(clauses)}")
    formula = CnfFormula()
    for v in range(1, header[0] + 1):
        formula.new_var(("dimacs", v))
    formula.extend(clauses, "dimacs")
    return formula
