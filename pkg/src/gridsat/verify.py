"""Independent checks of decoded layouts.

Nothing here looks at formulas or variables: each verifier takes the graph
and a plain layout and re-derives the defining property from geometry.
"""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from itertools import combinations

from .encoders.base import BoxLayout, Layout1D, Layout2D, Orientation
from .graph import Graph


@dataclass
class Verdict:
    ok: bool
    problems: list[str] = field(default_factory=list)

    def __bool__(self) -> bool:
        return self.ok


def _verdict(problems: list[str]) -> Verdict:
    return Verdict(not problems, problems)


def _missing(g: Graph, keys) -> list[str]:
    absent = sorted(set(range(g.n)) - set(keys))
    return [f"no placement for vertex {v}" for v in absent]


def verify_pathwidth(g: Graph, layout: Layout1D, p: int) -> Verdict:
    """Intervals of adjacent vertices meet and no point lies in more than p+1."""
    problems = _missing(g, layout.intervals)
    if problems:
        return _verdict(problems)
    for v, (lo, hi) in layout.intervals.items():
        if lo > hi:
            problems.append(f"vertex {v}: empty interval [{lo}, {hi}]")
    for u, w in g.edges:
        (a0, a1), (b0, b1) = layout.intervals[u], layout.intervals[w]
        if max(a0, b0) > min(a1, b1):
            problems.append(f"edge {u}-{w}: intervals [{a0},{a1}] and [{b0},{b1}] are disjoint")
    # sweep over interval endpoints
    events = []
    for lo, hi in layout.intervals.values():
        events.append((lo, 0))
        events.append((hi, 1))
    events.sort()
    depth = peak = 0
    for _, kind in events:
        if kind == 0:
            depth += 1
            peak = max(peak, depth)
        else:
            depth -= 1
    if peak > p + 1:
        problems.append(f"{peak} intervals share a point, more than p+1 = {p + 1}")
    return _verdict(problems)


def verify_bandwidth(g: Graph, positions: dict[int, int], k: int) -> Verdict:
    """Positions are a bijection onto 1..n and every edge has stretch <= k."""
    problems = _missing(g, positions)
    if problems:
        return _verdict(problems)
    if sorted(positions[v] for v in range(g.n)) != list(range(1, g.n + 1)):
        problems.append("positions are not a permutation of 1..n")
    for u, w in g.edges:
        stretch = abs(positions[u] - positions[w])
        if stretch > k:
            problems.append(f"edge {u}-{w} has stretch {stretch} > {k}")
    return _verdict(problems)


def longest_path_edges(n: int, arcs) -> int | None:
    """Longest directed path (in edges) of a DAG; None if there is a cycle."""
    out = [[] for _ in range(n)]
    indeg = [0] * n
    for a, b in arcs:
        out[a].append(b)
        indeg[b] += 1
    dist = [0] * n
    queue = deque(v for v in range(n) if indeg[v] == 0)
    done = 0
    while queue:
        v = queue.popleft()
        done += 1
        for w in out[v]:
            dist[w] = max(dist[w], dist[v] + 1)
            indeg[w] -= 1
            if indeg[w] == 0:
                queue.append(w)
    if done < n:
        return None
    return max(dist, default=0)


def verify_st_orientation(g: Graph, orientation: Orientation, s: int, t: int, k: int) -> Verdict:
    """Acyclic, s the only source, t the only sink, longest path <= k-1 edges."""
    problems = []
    arcs = []
    for u, w in g.edges:
        arc = orientation.arcs.get((u, w))
        if arc is None or set(arc) != {u, w}:
            problems.append(f"edge {u}-{w} is not oriented along itself")
        else:
            arcs.append(arc)
    extra = set(orientation.arcs) - set(g.edges)
    if extra:
        problems.append(f"arcs for non-edges: {sorted(extra)}")
    if problems:
        return _verdict(problems)
    indeg = [0] * g.n
    outdeg = [0] * g.n
    for a, b in arcs:
        outdeg[a] += 1
        indeg[b] += 1
    sources = [v for v in range(g.n) if indeg[v] == 0]
    sinks = [v for v in range(g.n) if outdeg[v] == 0]
    if sources != [s]:
        problems.append(f"sources are {sources}, expected only {s}")
    if sinks != [t]:
        problems.append(f"sinks are {sinks}, expected only {t}")
    longest = longest_path_edges(g.n, arcs)
    if longest is None:
        problems.append("orientation has a directed cycle")
    elif longest > k - 1:
        problems.append(f"longest path has {longest} edges, more than k-1 = {k - 1}")
    return _verdict(problems)


def verify_bar_visibility(g: Graph, layout: Layout2D, k: int = 0) -> Verdict:
    """Vertex bars (horizontal) and edge bars (vertical) form a bar k-visibility
    representation of ``g`` inside the layout's grid."""
    problems = _missing(g, layout.vertex_bars)
    missing_edges = sorted(set(g.edges) - set(layout.edge_bars))
    problems += [f"no bar for edge {e}" for e in missing_edges]
    extra = sorted(set(layout.edge_bars) - set(g.edges))
    problems += [f"bar for non-edge {e}" for e in extra]
    if problems:
        return _verdict(problems)
    H, W = layout.height, layout.width
    vb = layout.vertex_bars
    for v, (r, c0, c1) in vb.items():
        if not (1 <= r <= H and 1 <= c0 <= c1 <= W):
            problems.append(f"vertex {v} bar {(r, c0, c1)} is empty or outside the grid")
    for e, (c, r0, r1) in layout.edge_bars.items():
        if not (1 <= c <= W and 1 <= r0 <= r1 <= H):
            problems.append(f"edge {e} bar {(c, r0, r1)} is empty or outside the grid")
    for u, w in combinations(sorted(vb), 2):
        (ru, a0, a1), (rw, b0, b1) = vb[u], vb[w]
        if ru == rw and max(a0, b0) <= min(a1, b1):
            problems.append(f"vertex bars {u} and {w} overlap")

    def on_bar(v, row, col):
        r, c0, c1 = vb[v]
        return r == row and c0 <= col <= c1

    for e, (c, r0, r1) in layout.edge_bars.items():
        u, w = e
        ends_ok = ((on_bar(u, r0, c) and on_bar(w, r1, c))
                   or (on_bar(w, r0, c) and on_bar(u, r1, c)))
        if not ends_ok:
            problems.append(f"edge {e} bar does not run between its vertex bars")
        crossed = [v for v in vb if v not in e and r0 <= vb[v][0] <= r1
                   and vb[v][1] <= c <= vb[v][2]]
        if len(crossed) > k:
            problems.append(f"edge {e} crosses {len(crossed)} vertex bars {crossed}, allowed {k}")
    for e, f in combinations(sorted(layout.edge_bars), 2):
        (c, r0, r1), (c2, s0, s1) = layout.edge_bars[e], layout.edge_bars[f]
        if c != c2:
            continue
        lo, hi = max(r0, s0), min(r1, s1)
        if lo > hi:
            continue
        shared = set(e) & set(f)
        touch = (lo == hi and lo in (r0, r1) and lo in (s0, s1)
                 and any(on_bar(v, lo, c) for v in shared))
        if not touch:
            problems.append(f"edge bars {e} and {f} overlap")
    return _verdict(problems)


def _boxes_meet(a, b) -> bool:
    return all(max(lo1, lo2) <= min(hi1, hi2) for (lo1, hi1), (lo2, hi2) in zip(a, b))


def verify_boxicity(g: Graph, layout: BoxLayout, d: int | None = None) -> Verdict:
    """The intersection graph of the boxes is exactly ``g``."""
    problems = _missing(g, layout.boxes)
    if problems:
        return _verdict(problems)
    bounds = {v: tuple(layout.boxes[v].bounds) for v in range(g.n)}
    for v, bx in bounds.items():
        if d is not None and len(bx) != d:
            problems.append(f"vertex {v} box has dimension {len(bx)}, expected {d}")
        if not all(1 <= lo <= hi <= layout.side for lo, hi in bx):
            problems.append(f"vertex {v} box {bx} is empty or outside [1, {layout.side}]")
    for u, w in combinations(range(g.n), 2):
        meet = _boxes_meet(bounds[u], bounds[w])
        if meet and not g.has_edge(u, w):
            problems.append(f"boxes of non-adjacent {u} and {w} intersect")
        elif not meet and g.has_edge(u, w):
            problems.append(f"boxes of adjacent {u} and {w} are disjoint")
    return _verdict(problems)
