"""Recognition of intersection graphs of d-dimensional boxes on ``[1, side]^d``."""
from __future__ import annotations

from ..boxes import GridDims, decode_box, encode_box, register_points
from ..graph import Graph
from .base import BoxLayout, Encoding, EncodingError, edge_obj, new_formula, vertex_obj


def encode_boxicity(g: Graph, d: int, side: int, **formula_opts) -> Encoding:
    if g.n == 0:
        raise EncodingError("graph has no vertices")
    if d < 1 or side < 1:
        raise EncodingError("dimension and side length must be >= 1")
    f = new_formula(**formula_opts)
    dims = GridDims((side,) * d)
    enc = Encoding("boxicity", g, {"d": d, "side": side}, f)
    for v in range(g.n):
        enc.boxes[vertex_obj(v)] = encode_box(f, dims, vertex_obj(v))
    vx = [enc.boxes[vertex_obj(v)].x for v in range(g.n)]
    for e in g.edge_list:
        ev = register_points(f, dims, edge_obj(e))
        enc.boxes[edge_obj(e)] = ev
        f.add_clause(list(ev.x.values()), "edge-meets")
        for pt, var in ev.x.items():
            f.add_clause([-var, vx[e[0]][pt]], "edge-in-vertex")
            f.add_clause([-var, vx[e[1]][pt]], "edge-in-vertex")
    points = list(dims.points())
    for u in range(g.n):
        for w in range(u + 1, g.n):
            if g.has_edge(u, w):
                continue
            for pt in points:
                f.add_clause([-vx[u][pt], -vx[w][pt]], "non-edge-disjoint")
    return enc


def decode_boxicity(enc: Encoding, assignment) -> BoxLayout:
    boxes = {v: decode_box(enc.boxes[vertex_obj(v)], assignment) for v in range(enc.graph.n)}
    return BoxLayout(enc.params["side"], boxes)
