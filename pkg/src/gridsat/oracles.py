"""Brute-force ground truth for small graphs.

Each oracle refuses inputs above a size limit instead of degrading to
sampling; pass a larger ``limit`` explicitly if you are willing to wait.
"""
from __future__ import annotations

from itertools import combinations, permutations, product

import numpy as np

from .graph import Graph
from .verify import longest_path_edges


class OracleLimitError(ValueError):
    pass


def _check(name: str, size: int, limit: int, what: str) -> None:
    if size > limit:
        raise OracleLimitError(f"{name}: {what} = {size} exceeds limit {limit}")


def _neighbor_masks(g: Graph) -> list[int]:
    masks = [0] * g.n
    for u, w in g.edges:
        masks[u] |= 1 << w
        masks[w] |= 1 << u
    return masks


def oracle_pathwidth(g: Graph, limit: int = 9) -> int:
    """Vertex separation number (= pathwidth) by dynamic programming over
    placed-prefix subsets."""
    _check("oracle_pathwidth", g.n, limit, "n")
    n = g.n
    if n == 0:
        return 0
    nb = _neighbor_masks(g)
    full = (1 << n) - 1
    INF = n + 1
    best = [INF] * (1 << n)
    best[0] = 0
    for S in range(1, 1 << n):
        rest = full & ~S
        boundary = sum(1 for v in range(n) if S >> v & 1 and nb[v] & rest)
        inner = INF
        T = S
        while T:
            low = T & -T
            inner = min(inner, best[S & ~low])
            T &= T - 1
        best[S] = max(boundary, inner)
    return best[full]


def pathwidth_by_permutations(g: Graph, limit: int = 8) -> int:
    """Same value as :func:`oracle_pathwidth`, straight from the definition:
    min over orders of the max number of placed vertices with an unplaced
    neighbour."""
    _check("pathwidth_by_permutations", g.n, limit, "n")
    if g.n == 0:
        return 0
    adj = g.adjacency
    best = g.n
    for order in permutations(range(g.n)):
        placed = set()
        worst = 0
        for v in order:
            placed.add(v)
            worst = max(worst, sum(1 for u in placed if any(w not in placed for w in adj[u])))
            if worst >= best:
                break
        best = min(best, worst)
    return best


def oracle_bandwidth(g: Graph, limit: int = 9) -> int:
    """Minimum over orderings of the longest edge stretch (branch and bound)."""
    _check("oracle_bandwidth", g.n, limit, "n")
    n = g.n
    if g.m == 0:
        return 0
    adj = g.adjacency
    pos = [-1] * n

    def place(i: int, k: int) -> bool:
        if i == n:
            return True
        for v in range(n):
            if pos[v] >= 0:
                continue
            if any(pos[u] >= 0 and i - pos[u] > k for u in adj[v]):
                continue
            # an unplaced neighbour of an early vertex must still fit in range
            pos[v] = i
            if all(pos[u] < 0 or all(pos[w] >= 0 or pos[u] + k >= i + 1 for w in adj[u])
                   for u in range(n)) and place(i + 1, k):
                pos[v] = -1
                return True
            pos[v] = -1
        return False

    for k in range(1, n):
        if place(0, k):
            return k
    return n - 1


def bandwidth_by_permutations(g: Graph, limit: int = 8) -> int:
    _check("bandwidth_by_permutations", g.n, limit, "n")
    if g.m == 0:
        return 0
    best = g.n
    for order in permutations(range(g.n)):
        pos = {v: i for i, v in enumerate(order)}
        best = min(best, max(abs(pos[u] - pos[w]) for u, w in g.edges))
    return best


def oracle_st_levels(g: Graph, s: int, t: int, limit: int = 16) -> int | None:
    """Fewest levels (longest path in edges + 1) over all st-orientations;
    None when the graph has no st-orientation.

    All ``2**m`` orientations are scanned in vectorised chunks: degree
    filters first, then longest-path relaxation on the survivors.
    """
    _check("oracle_st_levels", g.m, limit, "m")
    n, m = g.n, g.m
    if m == 0:
        return None
    edges = np.array(g.edge_list, dtype=np.int64)
    verts = np.arange(n)
    best = None
    chunk = 1 << 16
    for start in range(0, 1 << m, chunk):
        codes = np.arange(start, min(start + chunk, 1 << m), dtype=np.int64)
        flip = ((codes[:, None] >> np.arange(m)) & 1).astype(bool)
        tail = np.where(flip, edges[:, 1], edges[:, 0])
        head = np.where(flip, edges[:, 0], edges[:, 1])
        indeg = (head[:, :, None] == verts).sum(axis=1)
        outdeg = (tail[:, :, None] == verts).sum(axis=1)
        src_ok = (indeg == 0) == (verts == s)
        snk_ok = (outdeg == 0) == (verts == t)
        keep = np.all(src_ok & snk_ok, axis=1)
        if not keep.any():
            continue
        tail, head = tail[keep], head[keep]
        rows = np.arange(tail.shape[0])
        dist = np.zeros((tail.shape[0], n), dtype=np.int64)
        for _ in range(n):
            before = dist.copy()
            for e in range(m):
                step = dist[rows, tail[:, e]] + 1
                dist[rows, head[:, e]] = np.maximum(dist[rows, head[:, e]], step)
        acyclic = np.all(dist == before, axis=1)
        if not acyclic.any():
            continue
        low = int(dist[acyclic].max(axis=1).min()) + 1
        best = low if best is None else min(best, low)
    return best


def st_levels_by_orientations(g: Graph, s: int, t: int, limit: int = 12) -> int | None:
    """Plain loop version of :func:`oracle_st_levels`, one orientation at a time."""
    _check("st_levels_by_orientations", g.m, limit, "m")
    edges = g.edge_list
    best = None
    for bits in product((0, 1), repeat=len(edges)):
        arcs = [(u, w) if b == 0 else (w, u) for (u, w), b in zip(edges, bits)]
        indeg = [0] * g.n
        outdeg = [0] * g.n
        for a, b in arcs:
            outdeg[a] += 1
            indeg[b] += 1
        if any(indeg[v] == 0 for v in range(g.n) if v != s) or indeg[s] != 0:
            continue
        if any(outdeg[v] == 0 for v in range(g.n) if v != t) or outdeg[t] != 0:
            continue
        longest = longest_path_edges(g.n, arcs)
        if longest is None:
            continue
        if best is None or longest + 1 < best:
            best = longest + 1
    return best


def _intervals(side: int) -> list[tuple[int, int]]:
    return [(lo, hi) for lo in range(1, side + 1) for hi in range(lo, side + 1)]


def oracle_boxicity_d(g: Graph, d: int, side: int,
                      limits: tuple[int, int, int] = (4, 4, 2)) -> bool:
    """Whether ``g`` is the intersection graph of boxes on ``[1, side]^d``,
    by trying every box per vertex and pruning on the first mismatch."""
    max_n, max_side, max_d = limits
    _check("oracle_boxicity_d", g.n, max_n, "n")
    _check("oracle_boxicity_d", side, max_side, "side")
    _check("oracle_boxicity_d", d, max_d, "d")
    boxes = list(product(_intervals(side), repeat=d))
    chosen: list[tuple] = []

    def meet(a, b) -> bool:
        return all(max(x0, y0) <= min(x1, y1) for (x0, x1), (y0, y1) in zip(a, b))

    def extend(v: int) -> bool:
        if v == g.n:
            return True
        for bx in boxes:
            if all(meet(bx, chosen[u]) == g.has_edge(u, v) for u in range(v)):
                chosen.append(bx)
                if extend(v + 1):
                    return True
                chosen.pop()
        return False

    return extend(0)


def intersection_edges(boxes) -> set[tuple[int, int]]:
    """Edge set of the intersection graph of integer boxes (list of bounds)."""
    out = set()
    for u, w in combinations(range(len(boxes)), 2):
        if all(max(a0, b0) <= min(a1, b1) for (a0, a1), (b0, b1) in zip(boxes[u], boxes[w])):
            out.add((u, w))
    return out
