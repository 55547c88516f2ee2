"""Undirected simple graphs, edge-list/GML I/O and block decomposition."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Hashable, Iterable, Sequence

Edge = tuple[int, int]


class GraphError(ValueError):
    """Raised when a graph would violate the simple-graph invariants."""


class ParseError(ValueError):
    def __init__(self, message: str, lineno: int | None = None):
        self.lineno = lineno
        if lineno is not None:
            message = f"line {lineno}: {message}"
        super().__init__(message)


def _norm(u: int, v: int) -> Edge:
    return (u, v) if u < v else (v, u)


@dataclass(frozen=True)
class Graph:
    """Immutable simple graph on vertices ``0..n-1``.

    ``labels`` keeps the original identifiers (file ids, parent-graph
    vertices of a block) so results can be reported in the caller's terms.
    """

    n: int
    edges: frozenset[Edge] = frozenset()
    name: str = ""
    labels: tuple[Hashable, ...] = field(default=(), compare=False)

    def __post_init__(self):
        if self.n < 0:
            raise GraphError("vertex count must be non-negative")
        normed = set()
        for u, v in self.edges:
            if u == v:
                raise GraphError(f"self-loop at vertex {u}")
            if not (0 <= u < self.n and 0 <= v < self.n):
                raise GraphError(f"edge ({u}, {v}) has an endpoint outside 0..{self.n - 1}")
            normed.add(_norm(u, v))
        object.__setattr__(self, "edges", frozenset(normed))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(range(self.n)))
        elif len(self.labels) != self.n:
            raise GraphError("labels must name every vertex")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[Sequence[int]], name: str = "",
                   labels: Sequence[Hashable] = ()) -> Graph:
        return cls(n, frozenset(_norm(int(u), int(v)) for u, v in edges), name, tuple(labels))

    @property
    def m(self) -> int:
        return len(self.edges)

    @cached_property
    def edge_list(self) -> list[Edge]:
        """Edges in sorted order; encoders index edges by position here."""
        return sorted(self.edges)

    @cached_property
    def adjacency(self) -> tuple[frozenset[int], ...]:
        adj: list[set[int]] = [set() for _ in range(self.n)]
        for u, v in self.edges:
            adj[u].add(v)
            adj[v].add(u)
        return tuple(frozenset(a) for a in adj)

    def neighbors(self, v: int) -> frozenset[int]:
        return self.adjacency[v]

    def has_edge(self, u: int, v: int) -> bool:
        return _norm(u, v) in self.edges

    def degree(self, v: int) -> int:
        return len(self.adjacency[v])

    def max_degree(self) -> int:
        return max((len(a) for a in self.adjacency), default=0)

    def with_edge(self, u: int, v: int) -> Graph:
        if self.has_edge(u, v):
            return self
        return Graph(self.n, self.edges | {_norm(u, v)}, self.name, self.labels)

    def is_connected(self) -> bool:
        if self.n == 0:
            return True
        seen = {0}
        stack = [0]
        while stack:
            for w in self.adjacency[stack.pop()]:
                if w not in seen:
                    seen.add(w)
                    stack.append(w)
        return len(seen) == self.n

    def __repr__(self) -> str:
        tag = f" {self.name!r}" if self.name else ""
        return f"<Graph{tag} n={self.n} m={self.m}>"


# --- named families used throughout tests and examples ---------------------

def path_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)], name=f"P{n}")


def cycle_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)], name=f"C{n}")


def complete_graph(n: int) -> Graph:
    return Graph.from_edges(n, [(i, j) for i in range(n) for j in range(i + 1, n)], name=f"K{n}")


# --- edge list -------------------------------------------------------------

def parse_edge_list(text: str, name: str = "") -> Graph:
    """Parse ``u v`` lines; ``#`` comments and an optional ``n <count>`` header."""
    declared_n = None
    edges: set[Edge] = set()
    max_id = -1
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if tokens[0] == "n":
            if len(tokens) != 2 or not tokens[1].isdigit():
                raise ParseError(f"malformed header {line!r}", lineno)
            declared_n = int(tokens[1])
            continue
        if len(tokens) != 2 or not all(t.isdigit() for t in tokens):
            raise ParseError(f"expected two non-negative integers, got {line!r}", lineno)
        u, v = int(tokens[0]), int(tokens[1])
        if u == v:
            raise GraphError(f"line {lineno}: self-loop at vertex {u}")
        edges.add(_norm(u, v))
        max_id = max(max_id, u, v)
    n = max_id + 1
    if declared_n is not None:
        if declared_n < n:
            raise ParseError(f"header declares n={declared_n} but vertex {max_id} appears")
        n = declared_n
    return Graph(n, frozenset(edges), name)


def to_edge_list(g: Graph) -> str:
    lines = [f"n {g.n}"] + [f"{u} {v}" for u, v in g.edge_list]
    return "\n".join(lines) + "\n"


# --- GML -------------------------------------------------------------------

_GML_TOKEN = re.compile(r'\[|\]|"[^"]*"|[^\s\[\]"]+')


def _gml_tokens(text: str):
    lineno, last = 1, 0
    for mt in _GML_TOKEN.finditer(text):
        lineno += text.count("\n", last, mt.start())
        last = mt.start()
        yield mt.group(0), lineno


def _gml_value(tok: str):
    if tok.startswith('"'):
        return tok[1:-1]
    try:
        return int(tok)
    except ValueError:
        try:
            return float(tok)
        except ValueError:
            return tok


def _parse_gml_list(tokens, closing: bool) -> list[tuple[str, object, int]]:
    items = []
    for tok, lineno in tokens:
        if tok == "]":
            if not closing:
                raise ParseError("unbalanced ']'", lineno)
            return items
        if tok == "[":
            raise ParseError("list without a key", lineno)
        key = tok
        try:
            val, vline = next(tokens)
        except StopIteration:
            raise ParseError(f"key {key!r} without value", lineno) from None
        if val == "[":
            items.append((key, _parse_gml_list(tokens, True), lineno))
        elif val == "]":
            raise ParseError(f"key {key!r} without value", vline)
        else:
            items.append((key, _gml_value(val), lineno))
    if closing:
        raise ParseError("unterminated list")
    return items


def parse_gml(text: str, name: str = "") -> Graph:
    """Parse the ``graph [ node [ id N ] edge [ source A target B ] ]`` subset."""
    top = _parse_gml_list(_gml_tokens(text), closing=False)
    graphs = [(val, ln) for key, val, ln in top if key == "graph"]
    if not graphs or not isinstance(graphs[0][0], list):
        raise ParseError("no 'graph [ ... ]' block")
    body, _ = graphs[0]
    ids: dict[object, int] = {}
    labels: list[object] = []
    raw_edges = []
    for key, val, lineno in body:
        if key == "node":
            if not isinstance(val, list):
                raise ParseError("node must be a list", lineno)
            fields = {k: v for k, v, _ in val}
            if "id" not in fields:
                raise ParseError("node without id", lineno)
            if fields["id"] in ids:
                raise ParseError(f"duplicate node id {fields['id']}", lineno)
            ids[fields["id"]] = len(labels)
            labels.append(fields.get("label", fields["id"]))
        elif key == "edge":
            if not isinstance(val, list):
                raise ParseError("edge must be a list", lineno)
            fields = {k: v for k, v, _ in val}
            for required in ("source", "target"):
                if required not in fields:
                    raise ParseError(f"edge without {required}", lineno)
            raw_edges.append((fields["source"], fields["target"], lineno))
    edges: set[Edge] = set()
    for a, b, lineno in raw_edges:
        if a not in ids or b not in ids:
            raise ParseError(f"edge ({a}, {b}) references an unknown node", lineno)
        if a == b:
            raise GraphError(f"line {lineno}: self-loop at node {a}")
        edges.add(_norm(ids[a], ids[b]))
    return Graph(len(labels), frozenset(edges), name, tuple(labels))


def to_gml(g: Graph) -> str:
    out = ["graph ["]
    for v in range(g.n):
        out.append(f"  node [ id {v} ]")
    for u, v in g.edge_list:
        out.append(f"  edge [ source {u} target {v} ]")
    out.append("]")
    return "\n".join(out) + "\n"


def read_graph(path: str, fmt: str | None = None, text: str | None = None) -> Graph:
    """Load a graph, choosing the dialect from ``fmt`` or the file extension."""
    import os

    if text is None:
        with open(path) as fh:
            text = fh.read()
    if fmt is None:
        fmt = "gml" if path.lower().endswith(".gml") else "edges"
    stem = os.path.splitext(os.path.basename(path))[0] if path != "-" else "stdin"
    if fmt == "gml":
        return parse_gml(text, name=stem)
    if fmt == "edges":
        return parse_edge_list(text, name=stem)
    raise ValueError(f"unknown graph format {fmt!r}")


# --- blocks ----------------------------------------------------------------

def biconnected_components(g: Graph) -> list[Graph]:
    """Blocks of ``g`` (cut vertices repeated; isolated vertices are 1-vertex blocks).

    Each block is relabelled to ``0..k-1`` in increasing order of the parent
    vertex id, and ``labels`` records those parent ids.
    """
    disc = [-1] * g.n
    low = [0] * g.n
    counter = 0
    edge_stack: list[Edge] = []
    blocks: list[set[Edge]] = []
    isolated: list[int] = []
    adj = [sorted(a) for a in g.adjacency]

    for root in range(g.n):
        if disc[root] != -1:
            continue
        if not adj[root]:
            disc[root] = counter
            counter += 1
            isolated.append(root)
            continue
        disc[root] = low[root] = counter
        counter += 1
        # frames: (vertex, parent, next-neighbour index)
        stack = [(root, -1, 0)]
        while stack:
            v, parent, idx = stack[-1]
            if idx < len(adj[v]):
                stack[-1] = (v, parent, idx + 1)
                w = adj[v][idx]
                if disc[w] == -1:
                    edge_stack.append((v, w))
                    disc[w] = low[w] = counter
                    counter += 1
                    stack.append((w, v, 0))
                elif w != parent and disc[w] < disc[v]:
                    edge_stack.append((v, w))
                    low[v] = min(low[v], disc[w])
            else:
                stack.pop()
                if parent == -1:
                    continue
                low[parent] = min(low[parent], low[v])
                if low[v] >= disc[parent]:
                    block = set()
                    while True:
                        a, b = edge_stack.pop()
                        block.add(_norm(a, b))
                        if (a, b) == (parent, v):
                            break
                    blocks.append(block)

    result = []
    for i, block in enumerate(blocks):
        verts = sorted({x for e in block for x in e})
        index = {x: j for j, x in enumerate(verts)}
        result.append(Graph(len(verts), frozenset((index[a], index[b]) for a, b in block),
                            f"{g.name}#b{i}", tuple(verts)))
    for v in isolated:
        result.append(Graph(1, frozenset(), f"{g.name}#v{v}", (v,)))
    return result
