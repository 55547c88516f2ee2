"""One-dimensional problems: pathwidth, bandwidth and optimum st-orientation."""
from __future__ import annotations

from ..boxes import BoxConsistencyError, GridDims, decode_box, encode_box, register_points, true_points
from ..graph import Graph
from .base import Encoding, EncodingError, Layout1D, Orientation, edge_obj, new_formula, vertex_obj


def _require_vertices(g: Graph) -> None:
    if g.n == 0:
        raise EncodingError("graph has no vertices")


def encode_pathwidth(g: Graph, p: int, **formula_opts) -> Encoding:
    """SAT iff ``pw(g) <= p``: vertex intervals on ``[1, n]``, every edge
    realised at a common point, at most ``p + 1`` intervals per point."""
    _require_vertices(g)
    if p < 0:
        raise EncodingError("pathwidth candidate must be >= 0")
    f = new_formula(**formula_opts)
    dims = GridDims.of(g.n)
    enc = Encoding("pathwidth", g, {"p": p, "grid": g.n}, f)
    for v in range(g.n):
        enc.boxes[vertex_obj(v)] = encode_box(f, dims, vertex_obj(v))
    for e in g.edge_list:
        ev = register_points(f, dims, edge_obj(e))
        enc.boxes[edge_obj(e)] = ev
        f.add_clause(list(ev.x.values()), "edge-point")
        for endpoint in e:
            xv = enc.boxes[vertex_obj(endpoint)].x
            for pt, var in ev.x.items():
                f.add_clause([-var, xv[pt]], "edge-in-vertex")
    for pt in dims.points():
        f.at_most([enc.boxes[vertex_obj(v)].x[pt] for v in range(g.n)], p + 1, "width")
    return enc


def decode_pathwidth(enc: Encoding, assignment) -> Layout1D:
    intervals = {}
    for v in range(enc.graph.n):
        box = decode_box(enc.boxes[vertex_obj(v)], assignment)
        intervals[v] = box.bounds[0]
    return Layout1D(intervals)


def encode_bandwidth(g: Graph, k: int, **formula_opts) -> Encoding:
    """SAT iff ``bw(g) <= k``: one distinct position per vertex on ``[1, n]``
    and every edge stretched over at most ``k`` positions."""
    _require_vertices(g)
    if k < 0:
        raise EncodingError("bandwidth candidate must be >= 0")
    f = new_formula(**formula_opts)
    n = g.n
    dims = GridDims.of(n)
    enc = Encoding("bandwidth", g, {"k": k, "grid": n}, f)
    xs = []
    for v in range(n):
        bv = register_points(f, dims, vertex_obj(v))
        enc.boxes[vertex_obj(v)] = bv
        f.add_clause(list(bv.x.values()), "nonempty")
        xs.append([bv.x[(i,)] for i in range(1, n + 1)])
    for i in range(n):
        f.at_most([xs[v][i] for v in range(n)], 1, "one-per-point")
    for u, v in g.edge_list:
        for a, b in ((u, v), (v, u)):
            for i in range(n):
                window = xs[b][max(0, i - k): min(n, i + k + 1)]
                f.add_clause([-xs[a][i]] + window, "stretch")
    return enc


def _single_point(bv, assignment) -> int:
    pts = true_points(bv, assignment)
    if len(pts) != 1:
        raise BoxConsistencyError(f"{bv.obj!r} occupies {len(pts)} points, expected one")
    return pts[0][0]


def decode_bandwidth(enc: Encoding, assignment) -> dict[int, int]:
    return {v: _single_point(enc.boxes[vertex_obj(v)], assignment) for v in range(enc.graph.n)}


def encode_st_orientation(g: Graph, s: int, t: int, k: int, **formula_opts) -> Encoding:
    """SAT iff ``g`` has an st-orientation using at most ``k`` levels, i.e.
    whose longest directed path has at most ``k - 1`` edges."""
    _require_vertices(g)
    if s == t:
        raise EncodingError("s and t must differ")
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise EncodingError("s and t must be vertices of the graph")
    if not g.has_edge(s, t):
        raise EncodingError(f"edge {s}-{t} is missing; add it first (Graph.with_edge)")
    if k < 1:
        raise EncodingError("level count must be >= 1")
    f = new_formula(**formula_opts)
    dims = GridDims.of(k)
    enc = Encoding("st", g, {"s": s, "t": t, "k": k, "grid": k}, f)
    for v in range(g.n):
        bv = register_points(f, dims, vertex_obj(v))
        enc.boxes[vertex_obj(v)] = bv
        f.add_clause(list(bv.x.values()), "nonempty")
        f.at_most(list(bv.x.values()), 1, "vertex-point")
    for e in g.edge_list:
        bv = encode_box(f, dims, edge_obj(e))
        enc.boxes[edge_obj(e)] = bv
        f.at_least(list(bv.x.values()), 2, "edge-length")
        xu = enc.boxes[vertex_obj(e[0])].x
        xw = enc.boxes[vertex_obj(e[1])].x
        for i in range(1, k + 1):
            f.add_clause([-bv.begin[0][i - 1], xu[(i,)], xw[(i,)]], "edge-begin")
            f.add_clause([-bv.end[0][i - 1], xu[(i,)], xw[(i,)]], "edge-end")
    for v in range(g.n):
        incident = [edge_obj(e) for e in g.edge_list if v in e]
        xv = enc.boxes[vertex_obj(v)].x
        for i in range(1, k + 1):
            if v != t:
                f.add_clause([-xv[(i,)]] + [enc.boxes[o].begin[0][i - 1] for o in incident], "out-edge")
            if v != s:
                f.add_clause([-xv[(i,)]] + [enc.boxes[o].end[0][i - 1] for o in incident], "in-edge")
    return enc


def decode_orientation(enc: Encoding, assignment) -> Orientation:
    g = enc.graph
    levels = {v: _single_point(enc.boxes[vertex_obj(v)], assignment) for v in range(g.n)}
    arcs = {}
    for e in g.edge_list:
        (lo, hi), = decode_box(enc.boxes[edge_obj(e)], assignment).bounds
        u, w = e
        if levels[u] == lo and levels[w] == hi:
            arcs[e] = (u, w)
        elif levels[w] == lo and levels[u] == hi:
            arcs[e] = (w, u)
        else:
            raise BoxConsistencyError(
                f"edge {e} spans [{lo}, {hi}] but its endpoints sit at {levels[u]}, {levels[w]}")
    return Orientation(arcs, levels)
