"""Undirected simple graphs, edge-list parsing and connectivity helpers.

Nodes carry an external label (the token read from the input) and a dense
internal index ``0..n-1`` assigned in order of first appearance. Every
algorithm in the package works on internal indices; labels only come back
into play when results are reported.
"""

from __future__ import annotations

import random
import re
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from typing import TextIO

__all__ = [
    "Graph",
    "GraphError",
    "ParseError",
    "is_connected_subset",
    "random_spanning_tree",
    "leaves",
    "shortest_path_distance",
    "bfs_distances",
    "parse_edge_list",
    "read_edge_list",
]

_INT_LABEL = re.compile(r"-?(0|[1-9][0-9]*)")


class GraphError(ValueError):
    """Invalid graph or invalid node set for the requested operation."""


class ParseError(GraphError):
    def __init__(self, lineno: int, message: str):
        super().__init__(f"line {lineno}: {message}")
        self.lineno = lineno


@dataclass(frozen=True, eq=False)
class Graph:
    """Immutable simple undirected graph.

    ``adj[i]`` is the sorted tuple of neighbours of internal node ``i``.
    """

    labels: tuple[str, ...]
    adj: tuple[tuple[int, ...], ...]
    _nbr: tuple[frozenset[int], ...] = field(init=False, repr=False)
    _index: dict[str, int] = field(init=False, repr=False)
    edge_count: int = field(init=False)

    def __post_init__(self):
        if len(self.labels) != len(self.adj):
            raise GraphError("labels and adjacency differ in length")
        nbr = tuple(frozenset(a) for a in self.adj)
        half = 0
        for i, a in enumerate(self.adj):
            if len(nbr[i]) != len(a):
                raise GraphError(f"parallel edge at node {self.labels[i]!r}")
            if i in nbr[i]:
                raise GraphError(f"self-loop at node {self.labels[i]!r}")
            for j in a:
                if i not in nbr[j]:
                    raise GraphError("adjacency is not symmetric")
            half += len(a)
        index = {lab: i for i, lab in enumerate(self.labels)}
        if len(index) != len(self.labels):
            raise GraphError("duplicate node labels")
        object.__setattr__(self, "_nbr", nbr)
        object.__setattr__(self, "_index", index)
        object.__setattr__(self, "edge_count", half // 2)

    @classmethod
    def from_edges(cls, edges: Iterable[tuple[int, int]], n: int | None = None,
                   labels: Iterable[str] | None = None) -> "Graph":
        """Build from integer edges on nodes ``0..n-1``.

        Labels default to the 1-based node number as a string.
        """
        edges = list(edges)
        if n is None:
            n = 1 + max((max(e) for e in edges), default=-1)
        sets: list[set[int]] = [set() for _ in range(n)]
        for u, v in edges:
            if u == v:
                raise GraphError(f"self-loop at node {u}")
            if v in sets[u]:
                raise GraphError(f"duplicate edge {u}-{v}")
            sets[u].add(v)
            sets[v].add(u)
        labs = tuple(str(i + 1) for i in range(n)) if labels is None else tuple(map(str, labels))
        return cls(labs, tuple(tuple(sorted(s)) for s in sets))

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.labels == other.labels and self.adj == other.adj

    def __hash__(self) -> int:
        return hash((self.labels, self.adj))

    @property
    def n(self) -> int:
        return len(self.labels)

    @property
    def m(self) -> int:
        return self.edge_count

    def degree(self, i: int) -> int:
        return len(self.adj[i])

    def neighbors(self, i: int) -> frozenset[int]:
        return self._nbr[i]

    def has_edge(self, i: int, j: int) -> bool:
        return j in self._nbr[i]

    def edges(self) -> list[tuple[int, int]]:
        """All edges as ``(i, j)`` with ``i < j``, in index order."""
        return [(i, j) for i, a in enumerate(self.adj) for j in a if i < j]

    def index(self, label) -> int:
        try:
            return self._index[str(label)]
        except KeyError:
            raise GraphError(f"unknown node label {label!r}") from None

    def indices(self, labels: Iterable) -> frozenset[int]:
        return frozenset(self.index(lab) for lab in labels)

    def label_values(self, members: Iterable[int]) -> list:
        """Labels of ``members`` sorted naturally; integer-like labels become ints."""
        labs = [self.labels[i] for i in members]
        if all(_INT_LABEL.fullmatch(s) for s in labs):
            return sorted(int(s) for s in labs)
        return sorted(labs)

    def is_connected(self) -> bool:
        return self.n > 0 and is_connected_subset(self, range(self.n))


def parse_edge_list(text: str | TextIO, require_connected: bool = True) -> Graph:
    """Parse whitespace-separated ``u v`` lines; ``#`` starts a comment line.

    Raises :class:`ParseError` on malformed lines and :class:`GraphError` on
    self-loops, duplicate edges or (by default) a disconnected result.
    """
    lines = text.splitlines() if isinstance(text, str) else text
    index: dict[str, int] = {}
    labels: list[str] = []
    adj: list[set[int]] = []

    def node(tok: str) -> int:
        if tok not in index:
            index[tok] = len(labels)
            labels.append(tok)
            adj.append(set())
        return index[tok]

    for lineno, raw in enumerate(lines, start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(lineno, f"expected two node labels, got {line!r}")
        a, b = parts
        if a == b:
            raise GraphError(f"line {lineno}: self-loop at node {a!r}")
        u, v = node(a), node(b)
        if v in adj[u]:
            raise GraphError(f"line {lineno}: duplicate edge {a}-{b}")
        adj[u].add(v)
        adj[v].add(u)

    g = Graph(tuple(labels), tuple(tuple(sorted(s)) for s in adj))
    if require_connected and not g.is_connected():
        raise GraphError("graph is empty or not connected")
    return g


def read_edge_list(path, require_connected: bool = True) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_edge_list(fh.read(), require_connected=require_connected)


def _check_members(g: Graph, s: Iterable[int]) -> frozenset[int]:
    s = frozenset(s)
    if not s:
        raise GraphError("node set is empty")
    for v in s:
        if not 0 <= v < g.n:
            raise GraphError(f"node index {v} out of range")
    return s


def is_connected_subset(g: Graph, s: Iterable[int]) -> bool:
    """True iff the subgraph induced by ``s`` is connected."""
    s = _check_members(g, s)
    start = next(iter(s))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for v in g.adj[u]:
            if v in s and v not in seen:
                seen.add(v)
                stack.append(v)
    return len(seen) == len(s)


def random_spanning_tree(g: Graph, s: Iterable[int], root: int,
                         rng: random.Random) -> dict[int, int | None]:
    """Random spanning tree of ``G[s]`` as a parent map (``root -> None``).

    Grows from ``root`` by repeatedly attaching the far end of a uniformly
    drawn frontier edge, so every spanning tree has positive probability.
    """
    s = _check_members(g, s)
    if root not in s:
        raise GraphError("root is not a member of the set")
    parent: dict[int, int | None] = {root: None}
    frontier = [(root, v) for v in g.adj[root] if v in s]
    while frontier:
        i = rng.randrange(len(frontier))
        frontier[i], frontier[-1] = frontier[-1], frontier[i]
        u, v = frontier.pop()
        if v in parent:
            continue
        parent[v] = u
        frontier.extend((v, w) for w in g.adj[v] if w in s and w not in parent)
    if len(parent) != len(s):
        raise GraphError("induced subgraph is not connected")
    return parent


def leaves(tree: dict[int, int | None]) -> frozenset[int]:
    """Non-root nodes without children."""
    if len(tree) < 2:
        raise GraphError("tree has fewer than two nodes")
    has_child = {p for p in tree.values() if p is not None}
    return frozenset(v for v, p in tree.items() if p is not None and v not in has_child)


def bfs_distances(g: Graph, sources: Iterable[int]) -> list[int]:
    """Hop distance from the nearest source; ``-1`` marks unreachable nodes."""
    dist = [-1] * g.n
    queue = deque()
    for s in sources:
        if dist[s] != 0:
            dist[s] = 0
            queue.append(s)
    while queue:
        u = queue.popleft()
        du = dist[u] + 1
        for v in g.adj[u]:
            if dist[v] < 0:
                dist[v] = du
                queue.append(v)
    return dist


def shortest_path_distance(g: Graph, a: int, b: int) -> int:
    _check_members(g, (a, b))
    d = bfs_distances(g, (a,))[b]
    if d < 0:
        raise GraphError(f"no path between {g.labels[a]!r} and {g.labels[b]!r}")
    return d
