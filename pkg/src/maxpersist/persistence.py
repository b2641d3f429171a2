"""Persistence probability of node sets and merge bookkeeping.

The persistence of a set ``S`` is ``internal / (internal + external)``,
where ``internal`` counts edges with both ends in ``S`` (once each) and
``external`` counts edges with exactly one end in ``S``. Values are kept as
:class:`fractions.Fraction` so that comparisons are exact.
"""

from __future__ import annotations

from collections.abc import Iterable
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, GraphError, is_connected_subset

__all__ = [
    "CommunitySolution",
    "DisconnectedSetError",
    "InfeasibleMergeError",
    "MergePartition",
    "alpha_of",
    "edge_counts",
    "interchange_delta",
    "is_better",
    "best_of",
]


class DisconnectedSetError(GraphError):
    def __init__(self, members: Iterable[int]):
        self.members = frozenset(members)
        super().__init__(f"induced subgraph on {sorted(self.members)} is not connected")


class InfeasibleMergeError(GraphError):
    pass


@dataclass(frozen=True)
class CommunitySolution:
    members: frozenset[int]
    internal_edges: int
    external_edges: int

    @property
    def size(self) -> int:
        return len(self.members)

    @property
    def alpha(self) -> Fraction:
        den = self.internal_edges + self.external_edges
        return Fraction(self.internal_edges, den) if den else Fraction(0)

    def sorted_members(self) -> tuple[int, ...]:
        return tuple(sorted(self.members))


def is_better(a: CommunitySolution, b: CommunitySolution | None) -> bool:
    """Strictly higher alpha, ties broken by the lexicographically smaller member list."""
    if b is None:
        return True
    # cross-multiplication avoids building Fractions
    lhs = a.internal_edges * (b.internal_edges + b.external_edges)
    rhs = b.internal_edges * (a.internal_edges + a.external_edges)
    if lhs != rhs:
        return lhs > rhs
    return a.sorted_members() < b.sorted_members()


def best_of(solutions: Iterable[CommunitySolution]) -> CommunitySolution | None:
    best = None
    for sol in solutions:
        if is_better(sol, best):
            best = sol
    return best


def edge_counts(g: Graph, s: Iterable[int]) -> tuple[int, int]:
    """(internal, external) edge counts of ``s``; no connectivity check."""
    s = s if isinstance(s, (set, frozenset)) else frozenset(s)
    twice_in = 0
    deg = 0
    for u in s:
        a = g.adj[u]
        deg += len(a)
        twice_in += sum(1 for v in a if v in s)
    return twice_in // 2, deg - twice_in


def alpha_of(g: Graph, s: Iterable[int]) -> CommunitySolution:
    s = frozenset(s)
    if not is_connected_subset(g, s):
        raise DisconnectedSetError(s)
    i, e = edge_counts(g, s)
    return CommunitySolution(s, i, e)


def interchange_delta(g: Graph, sol: CommunitySolution, out_node: int,
                      in_node: int) -> CommunitySolution | None:
    """Solution for ``members - {out_node} + {in_node}``, or None if disconnected.

    Counts are updated from ``sol`` by scanning only the adjacency lists of
    the two swapped nodes.
    """
    s = sol.members
    if out_node not in s:
        raise GraphError(f"node {out_node} is not a member")
    if in_node in s or not 0 <= in_node < g.n:
        raise GraphError(f"node {in_node} cannot enter the set")
    nbr_out = g.neighbors(out_node)
    in_out = sum(1 for v in nbr_out if v in s)
    in_in = sum(1 for v in g.adj[in_node] if v in s)
    link = 1 if in_node in nbr_out else 0
    internal = sol.internal_edges - in_out + in_in - link
    degsum = 2 * sol.internal_edges + sol.external_edges - len(nbr_out) + g.degree(in_node)
    new = (s - {out_node}) | {in_node}
    if in_in - link < 1 and len(new) > 1:
        return None
    if not is_connected_subset(g, new):
        return None
    return CommunitySolution(new, internal, degsum - 2 * internal)


class MergePartition:
    """Disjoint clusters covering V with edge counts for O(1) merge scores.

    Cluster ids are the internal index of a founding node; after a merge the
    surviving id is the one of the larger cluster.
    """

    def __init__(self, g: Graph):
        self.graph = g
        self.members: dict[int, list[int]] = {i: [i] for i in range(g.n)}
        self.e_in: dict[int, int] = {i: 0 for i in range(g.n)}
        self.e_out: dict[int, int] = {i: g.degree(i) for i in range(g.n)}
        self.links: dict[int, dict[int, int]] = {i: {j: 1 for j in g.adj[i]} for i in range(g.n)}
        self.owner: list[int] = list(range(g.n))

    def __len__(self) -> int:
        return len(self.members)

    def cluster_of(self, v: int) -> int:
        return self.owner[v]

    def size(self, q: int) -> int:
        return len(self.members[q])

    def merge_counts(self, q: int, l: int) -> tuple[int, int]:
        """(internal, external) counts of ``C_q | C_l``."""
        a = self.links[q].get(l, 0)
        if a == 0 or q == l:
            raise InfeasibleMergeError(f"clusters {q} and {l} are not adjacent")
        internal = self.e_in[q] + self.e_in[l] + a
        return internal, self.e_out[q] + self.e_out[l] - 2 * a

    def merge_alpha(self, q: int, l: int) -> Fraction:
        internal, external = self.merge_counts(q, l)
        return Fraction(internal, internal + external)

    def apply_merge(self, q: int, l: int) -> int:
        """Merge clusters ``q`` and ``l``; returns the id of the union."""
        internal, external = self.merge_counts(q, l)
        if len(self.members[q]) < len(self.members[l]):
            q, l = l, q
        links_q = self.links[q]
        del links_q[l]
        for r, a in self.links.pop(l).items():
            if r == q:
                continue
            links_q[r] = links_q.get(r, 0) + a
            links_r = self.links[r]
            del links_r[l]
            links_r[q] = links_q[r]
        moved = self.members.pop(l)
        for v in moved:
            self.owner[v] = q
        self.members[q].extend(moved)
        self.e_in[q] = internal
        self.e_out[q] = external
        del self.e_in[l], self.e_out[l]
        return q

    def solution(self, q: int) -> CommunitySolution:
        return CommunitySolution(frozenset(self.members[q]), self.e_in[q], self.e_out[q])
