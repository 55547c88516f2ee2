"""Bar visibility and bar k-visibility representations on an H x W grid.

Dimension 0 of the grid is vertical (rows ``1..H``) and dimension 1 is
horizontal (columns ``1..W``): vertex bars have a single row, edge bars a
single column.
"""
from __future__ import annotations

from ..boxes import BoxConsistencyError, GridDims, decode_box, encode_box, fix_extent_one, register_points
from ..graph import Graph
from .base import Encoding, EncodingError, Layout2D, edge_obj, new_formula, vertex_obj

ROW, COL = 0, 1


def encode_bar_visibility(g: Graph, height: int, width: int, k: int = 0,
                          endpoints: bool = True, **formula_opts) -> Encoding:
    """Bar k-visibility on a ``height x width`` grid (``k = 0``: plain bar visibility).

    ``endpoints`` adds the optional clauses tying each incidence point to a
    row endpoint of the edge bar.
    """
    if g.n == 0:
        raise EncodingError("graph has no vertices")
    if height < 1 or width < 1:
        raise EncodingError("grid must be at least 1 x 1")
    if k < 0:
        raise EncodingError("crossing budget k must be >= 0")
    f = new_formula(**formula_opts)
    dims = GridDims.of(height, width)
    problem = "bar-vis" if k == 0 else "bar-k-vis"
    enc = Encoding(problem, g, {"H": height, "W": width, "k": k, "endpoints": endpoints}, f)
    points = list(dims.points())
    for v in range(g.n):
        bv = encode_box(f, dims, vertex_obj(v))
        fix_extent_one(f, bv, ROW, "horizontal-vertex")
        enc.boxes[vertex_obj(v)] = bv
    for e in g.edge_list:
        bv = encode_box(f, dims, edge_obj(e))
        fix_extent_one(f, bv, COL, "vertical-edge")
        enc.boxes[edge_obj(e)] = bv

    vx = [enc.boxes[vertex_obj(v)].x for v in range(g.n)]
    for pt in points:
        f.at_most([vx[v][pt] for v in range(g.n)], 1, "vertex-disjoint")

    incidence = enc.aux.setdefault("incidence", {})
    crossing = enc.aux.setdefault("crossing", {})
    for e in g.edge_list:
        eb = enc.boxes[edge_obj(e)]
        others = [v for v in range(g.n) if v not in e]
        if k == 0:
            for pt in points:
                for v in others:
                    f.add_clause([-eb.x[pt], -vx[v][pt]], "no-crossing")
        else:
            yv = register_points(f, dims, ("y", e), family="y")
            crossing[e] = yv.x
            for pt in points:
                for v in others:
                    f.add_clause([-eb.x[pt], -vx[v][pt], yv.x[pt]], "crossing-flag")
            f.at_most([yv.x[pt] for pt in points], k, "crossing-budget")
        for v in e:
            inc = register_points(f, dims, ("inc", e, v), family="xi")
            incidence[(e, v)] = inc.x
            f.add_clause(list(inc.x.values()), "incidence")
            for pt in points:
                iv = inc.x[pt]
                f.add_clause([-iv, eb.x[pt]], "incidence-edge")
                f.add_clause([-iv, vx[v][pt]], "incidence-vertex")
                if endpoints:
                    r = pt[ROW] - 1
                    f.add_clause([-iv, eb.begin[ROW][r], eb.end[ROW][r]], "edge-endpoint")

    if k > 0:
        edges = g.edge_list
        for e in edges:
            eb = enc.boxes[edge_obj(e)]
            for e2 in edges:
                if e2 == e:
                    continue
                ex2 = enc.boxes[edge_obj(e2)].x
                for pt in points:
                    r = pt[ROW] - 1
                    f.add_clause([-eb.x[pt], -ex2[pt], eb.begin[ROW][r], eb.end[ROW][r]],
                                 "edge-disjoint")
    return enc


def encode_bar_k_visibility(g: Graph, height: int, width: int, k: int,
                            endpoints: bool = True, **formula_opts) -> Encoding:
    if k < 1:
        raise EncodingError("bar k-visibility needs k >= 1; use encode_bar_visibility for k = 0")
    return encode_bar_visibility(g, height, width, k, endpoints, **formula_opts)


def decode_layout2d(enc: Encoding, assignment) -> Layout2D:
    """Read bars from a model.

    Without the endpoint clauses an edge bar may overshoot its vertex bars;
    it is then cut back to the rows of its two incidence points.
    """
    g = enc.graph
    height, width = enc.params["H"], enc.params["W"]
    vbars = {}
    for v in range(g.n):
        (r0, r1), (c0, c1) = decode_box(enc.boxes[vertex_obj(v)], assignment).bounds
        if r0 != r1:
            raise BoxConsistencyError(f"vertex {v} bar spans rows {r0}..{r1}")
        vbars[v] = (r0, c0, c1)
    ebars = {}
    for e in g.edge_list:
        (r0, r1), (c0, c1) = decode_box(enc.boxes[edge_obj(e)], assignment).bounds
        if c0 != c1:
            raise BoxConsistencyError(f"edge {e} bar spans columns {c0}..{c1}")
        if not enc.params.get("endpoints", True):
            rows = []
            for v in e:
                pts = true_points_of(enc.aux["incidence"][(e, v)], assignment)
                if not pts:
                    raise BoxConsistencyError(f"edge {e} has no incidence with {v}")
                rows.append(pts[0][ROW])
            r0, r1 = min(rows), max(rows)
        ebars[e] = (c0, r0, r1)
    return Layout2D(height, width, vbars, ebars)


def true_points_of(xmap, assignment):
    return sorted(p for p, var in xmap.items() if assignment[var])

