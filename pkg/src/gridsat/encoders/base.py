"""Shared encoding container and solution layout types."""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Any, Hashable

from ..boxes import BoxVarSet, GridBox
from ..cnf import CnfFormula, DEFAULT_CLAUSE_LIMIT
from ..graph import Edge, Graph


class EncodingError(ValueError):
    """Invalid problem parameters (missing st edge, bad grid, ...)."""


def vertex_obj(v: int) -> tuple[str, int]:
    return ("v", v)


def edge_obj(e: Edge) -> tuple[str, int, int]:
    return ("e", e[0], e[1])


@dataclass
class Encoding:
    """A formula plus everything needed to read a solution back out of a model.

    ``boxes`` maps graph objects (``("v", v)`` / ``("e", u, w)``) to their
    variable families; ``aux`` holds additional families keyed by name, e.g.
    ``aux["incidence"][(e, v)]`` is a point->var map.
    """

    problem: str
    graph: Graph
    params: dict[str, Any]
    formula: CnfFormula
    boxes: dict[Hashable, BoxVarSet] = field(default_factory=dict)
    aux: dict[str, dict] = field(default_factory=dict)

    @property
    def num_vars(self) -> int:
        return self.formula.num_vars

    @property
    def num_clauses(self) -> int:
        return self.formula.num_clauses


def new_formula(cardinality: str = "binomial", clause_limit: int | None = DEFAULT_CLAUSE_LIMIT,
                keep_tags: bool = True) -> CnfFormula:
    return CnfFormula(cardinality=cardinality, clause_limit=clause_limit, keep_tags=keep_tags)


# --- decoded solutions ------------------------------------------------------
# These are plain containers; verifiers depend on nothing else from encoders.

@dataclass
class Layout1D:
    """Vertex -> closed integer interval ``(lo, hi)``."""

    intervals: dict[int, tuple[int, int]]


@dataclass
class Orientation:
    """Edge (sorted pair) -> ``(tail, head)``, plus vertex levels."""

    arcs: dict[Edge, tuple[int, int]]
    levels: dict[int, int]


@dataclass
class Layout2D:
    """Bars on a grid with rows ``1..H`` and columns ``1..W``.

    ``vertex_bars[v] = (row, col_lo, col_hi)`` and
    ``edge_bars[e] = (col, row_lo, row_hi)``.
    """

    height: int
    width: int
    vertex_bars: dict[int, tuple[int, int, int]]
    edge_bars: dict[Edge, tuple[int, int, int]]


@dataclass
class BoxLayout:
    side: int
    boxes: dict[int, GridBox]
