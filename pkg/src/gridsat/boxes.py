"""Grid boxes as CNF: variable families, box constraints, decoding, normalization."""
from __future__ import annotations

from dataclasses import dataclass
from itertools import product
from typing import Hashable, Iterator, Sequence

from .cnf import CnfFormula

Point = tuple[int, ...]


class BoxConsistencyError(RuntimeError):
    """A model does not describe a box; indicates an encoder bug."""


@dataclass(frozen=True)
class GridDims:
    sizes: tuple[int, ...]

    def __post_init__(self):
        if not self.sizes:
            raise ValueError("a grid needs at least one dimension")
        if any(u < 1 for u in self.sizes):
            raise ValueError(f"grid sizes must be >= 1, got {self.sizes}")
        object.__setattr__(self, "sizes", tuple(int(u) for u in self.sizes))

    @classmethod
    def of(cls, *sizes: int) -> GridDims:
        return cls(tuple(sizes))

    @property
    def d(self) -> int:
        return len(self.sizes)

    @property
    def num_points(self) -> int:
        total = 1
        for u in self.sizes:
            total *= u
        return total

    def points(self) -> Iterator[Point]:
        return product(*(range(1, u + 1) for u in self.sizes))

    def boxes(self) -> Iterator[GridBox]:
        spans = [[(s, t) for s in range(1, u + 1) for t in range(s, u + 1)] for u in self.sizes]
        for bounds in product(*spans):
            yield GridBox(bounds)


@dataclass(frozen=True)
class GridBox:
    """Closed integer box ``[s_1,t_1] x ... x [s_d,t_d]`` (1-based)."""

    bounds: tuple[tuple[int, int], ...]

    def __post_init__(self):
        object.__setattr__(self, "bounds", tuple((int(s), int(t)) for s, t in self.bounds))
        for s, t in self.bounds:
            if not 1 <= s <= t:
                raise ValueError(f"invalid box bounds {self.bounds}")

    @property
    def d(self) -> int:
        return len(self.bounds)

    def points(self) -> Iterator[Point]:
        return product(*(range(s, t + 1) for s, t in self.bounds))

    def contains(self, p: Point) -> bool:
        return all(s <= c <= t for c, (s, t) in zip(p, self.bounds))

    def intersects(self, other: GridBox) -> bool:
        return all(s1 <= t2 and s2 <= t1 for (s1, t1), (s2, t2) in zip(self.bounds, other.bounds))

    def fits(self, dims: GridDims) -> bool:
        return self.d == dims.d and all(t <= u for (_, t), u in zip(self.bounds, dims.sizes))

    def extent(self, k: int) -> int:
        s, t = self.bounds[k]
        return t - s + 1


@dataclass
class BoxVarSet:
    """Variable handles of one object's box.

    ``begin[k][i-1]`` / ``end[k][i-1]`` are the begin/end indicators for
    coordinate ``i`` in dimension ``k`` (0-based ``k``).  Point-only objects
    have ``begin`` and ``end`` set to ``None``.
    """

    obj: Hashable
    dims: GridDims
    x: dict[Point, int]
    begin: list[list[int]] | None = None
    end: list[list[int]] | None = None

    @property
    def has_bounds(self) -> bool:
        return self.begin is not None

    def variables(self) -> list[int]:
        out = list(self.x.values())
        if self.begin is not None:
            for fam in (self.begin, self.end):
                for row in fam:
                    out.extend(row)
        return out


def register_points(formula: CnfFormula, dims: GridDims, obj: Hashable,
                    family: str = "x") -> BoxVarSet:
    """Register only the point indicators of ``obj`` (no constraints)."""
    x = {p: formula.new_var((family, obj, p)) for p in dims.points()}
    return BoxVarSet(obj, dims, x)


def encode_box(formula: CnfFormula, dims: GridDims, obj: Hashable) -> BoxVarSet:
    """Allocate the box of ``obj`` and add the box-shape clauses.

    The dummy margin around the grid is not materialised: a neighbour that
    would lie on the margin is constant false, so its literal is dropped.
    """
    bv = register_points(formula, dims, obj)
    bv.begin = [[formula.new_var(("b", obj, k, i)) for i in range(1, u + 1)]
                for k, u in enumerate(dims.sizes)]
    bv.end = [[formula.new_var(("e", obj, k, i)) for i in range(1, u + 1)]
              for k, u in enumerate(dims.sizes)]
    formula.add_clause(list(bv.x.values()), "nonempty")
    for k in range(dims.d):
        formula.exactly(bv.begin[k], 1, "one-begin")
        formula.exactly(bv.end[k], 1, "one-end")
    x = bv.x
    for p, xp in x.items():
        for k, u in enumerate(dims.sizes):
            c = p[k]
            clause = [-xp, bv.begin[k][c - 1]]
            if c > 1:
                clause.append(x[p[:k] + (c - 1,) + p[k + 1:]])
            formula.add_clause(clause, "start")
            clause = [-xp, bv.end[k][c - 1]]
            if c < u:
                clause.append(x[p[:k] + (c + 1,) + p[k + 1:]])
            formula.add_clause(clause, "end")
    return bv


def fix_extent_one(formula: CnfFormula, bv: BoxVarSet, k: int, tag: str = "unit-extent") -> None:
    """Force the box to have extent 1 in dimension ``k`` (``b^k_i = e^k_i``)."""
    for b, e in zip(bv.begin[k], bv.end[k]):
        formula.add_clause([-b, e], tag)
        formula.add_clause([b, -e], tag)


def constrain_point(formula: CnfFormula, bv: BoxVarSet) -> None:
    for k in range(bv.dims.d):
        fix_extent_one(formula, bv, k, "point")


def constrain_segment(formula: CnfFormula, bv: BoxVarSet, axis: int) -> None:
    """Degenerate the box to a segment parallel to dimension ``axis``."""
    for k in range(bv.dims.d):
        if k != axis:
            fix_extent_one(formula, bv, k, "segment")


def _value(assignment, v: int) -> bool:
    return bool(assignment[v])


def true_points(bv: BoxVarSet, assignment) -> list[Point]:
    return sorted(p for p, v in bv.x.items() if _value(assignment, v))


def decode_box(bv: BoxVarSet, assignment) -> GridBox:
    """Read the box of ``bv`` from a model and check it is self-consistent."""
    if not bv.has_bounds:
        raise ValueError(f"{bv.obj!r} has no begin/end indicators; use true_points")
    bounds = []
    for k in range(bv.dims.d):
        starts = [i for i, v in enumerate(bv.begin[k], 1) if _value(assignment, v)]
        ends = [i for i, v in enumerate(bv.end[k], 1) if _value(assignment, v)]
        if len(starts) != 1 or len(ends) != 1:
            raise BoxConsistencyError(
                f"{bv.obj!r}: dimension {k} has begins {starts} and ends {ends}")
        if starts[0] > ends[0]:
            raise BoxConsistencyError(f"{bv.obj!r}: dimension {k} begins after it ends")
        bounds.append((starts[0], ends[0]))
    box = GridBox(tuple(bounds))
    if set(true_points(bv, assignment)) != set(box.points()):
        raise BoxConsistencyError(f"{bv.obj!r}: occupied points do not form the box {box.bounds}")
    return box


def box_assignment(bv: BoxVarSet, box: GridBox, size: int) -> list[bool]:
    """The canonical model of ``bv`` describing ``box`` (other variables false)."""
    values = [False] * (size + 1)
    for p in box.points():
        values[bv.x[p]] = True
    if bv.has_bounds:
        for k, (s, t) in enumerate(box.bounds):
            values[bv.begin[k][s - 1]] = True
            values[bv.end[k][t - 1]] = True
    return values


# --- real boxes and normalization -------------------------------------------

@dataclass(frozen=True)
class RealBox:
    """Axis-aligned box with real endpoints and per-end open/closed flags."""

    lo: tuple[float, ...]
    hi: tuple[float, ...]
    lo_closed: tuple[bool, ...]
    hi_closed: tuple[bool, ...]

    def __post_init__(self):
        d = len(self.lo)
        if not (len(self.hi) == len(self.lo_closed) == len(self.hi_closed) == d) or d == 0:
            raise ValueError("all RealBox fields need the same positive length")
        for a, b, lc, hc in zip(self.lo, self.hi, self.lo_closed, self.hi_closed):
            if a > b or (a == b and not (lc and hc)):
                raise ValueError(f"empty or reversed interval ({a}, {b})")

    @classmethod
    def closed(cls, *intervals: tuple[float, float]) -> RealBox:
        d = len(intervals)
        return cls(tuple(a for a, _ in intervals), tuple(b for _, b in intervals),
                   (True,) * d, (True,) * d)

    @property
    def d(self) -> int:
        return len(self.lo)


# tie order at equal coordinates: open right, closed left, closed right, open left
_RIGHT_OPEN, _LEFT_CLOSED, _RIGHT_CLOSED, _LEFT_OPEN = range(4)


def _compact_axis(intervals: Sequence[tuple[float, float, bool, bool]]) -> list[tuple[int, int]]:
    events = []
    for idx, (lo, hi, lo_closed, hi_closed) in enumerate(intervals):
        events.append((lo, _LEFT_CLOSED if lo_closed else _LEFT_OPEN, idx, 0))
        events.append((hi, _RIGHT_CLOSED if hi_closed else _RIGHT_OPEN, idx, 1))
    events.sort(key=lambda ev: (ev[0], ev[1]))
    out = [[0, 0] for _ in intervals]
    group = 1
    # equal endpoints of the same kind are one event, so they share a group
    for pos, (coord, kind, idx, side) in enumerate(events):
        out[idx][side] = group
        if kind in (_RIGHT_OPEN, _RIGHT_CLOSED):
            nxt = events[pos + 1] if pos + 1 < len(events) else None
            if nxt is None or (nxt[0], nxt[1]) != (coord, kind):
                group += 1
    return [(s, t) for s, t in out]


def normalize_boxes(boxes: Sequence[RealBox]) -> list[GridBox]:
    """Map real boxes to closed integer boxes on ``[1, n]^d`` with the same
    pairwise intersection relation (each axis is compacted independently)."""
    if not boxes:
        return []
    d = boxes[0].d
    if any(b.d != d for b in boxes):
        raise ValueError("boxes must share one dimension")
    per_axis = [
        _compact_axis([(b.lo[k], b.hi[k], b.lo_closed[k], b.hi_closed[k]) for b in boxes])
        for k in range(d)
    ]
    return [GridBox(tuple(per_axis[k][i] for k in range(d))) for i in range(len(boxes))]
