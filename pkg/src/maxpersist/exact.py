"""Brute-force ground truth for small graphs."""

from __future__ import annotations

from collections.abc import Iterator

from .graph import Graph, GraphError
from .persistence import CommunitySolution, edge_counts, is_better

__all__ = ["enumerate_connected_subsets", "exact_max_persistence", "exact_search"]


def enumerate_connected_subsets(g: Graph, k: int) -> Iterator[frozenset[int]]:
    """Every connected ``k``-subset exactly once.

    Each subset is grown from its minimum-index node; a node joins the
    extension set only through its first discoverer (the exclusive
    neighbourhood rule), which rules out duplicates.
    """
    if k < 1 or k > g.n:
        return
    adj = g.adj
    for anchor in range(g.n):
        ext = [u for u in adj[anchor] if u > anchor]
        closed = {anchor, *adj[anchor]}
        yield from _extend(adj, [anchor], ext, closed, anchor, k)


def _extend(adj, sub: list[int], ext: list[int], closed: set[int], anchor: int,
            k: int) -> Iterator[frozenset[int]]:
    if len(sub) == k:
        yield frozenset(sub)
        return
    ext = list(ext)
    while ext:
        w = ext.pop()
        fresh = [u for u in adj[w] if u > anchor and u not in closed]
        sub.append(w)
        yield from _extend(adj, sub, ext + fresh, closed.union(adj[w]), anchor, k)
        sub.pop()


def exact_search(g: Graph, k: int) -> tuple[CommunitySolution, int]:
    """Best connected ``k``-subset and the number of subsets enumerated."""
    best = None
    count = 0
    for s in enumerate_connected_subsets(g, k):
        count += 1
        i, e = edge_counts(g, s)
        cand = CommunitySolution(s, i, e)
        if is_better(cand, best):
            best = cand
    if best is None:
        raise GraphError(f"no connected subset of size {k}")
    return best, count


def exact_max_persistence(g: Graph, k: int) -> CommunitySolution:
    return exact_search(g, k)[0]
