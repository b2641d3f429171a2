"""Swap-based local search and its two diversification wrappers.

``interchange`` is best-improvement 1-swap ascent. ``tree_vns`` perturbs the
incumbent by cutting random leaves of a random spanning tree and regrowing,
``crr`` restarts from random connected sets whose seed nodes keep a minimum
hop distance from earlier seeds.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .graph import Graph, GraphError, bfs_distances, is_connected_subset, leaves, random_spanning_tree
from .persistence import CommunitySolution, alpha_of, is_better
from .shrink import PersistenceCurve, random_shrink

__all__ = [
    "SearchParams",
    "interchange",
    "tree_vns",
    "crr",
    "rsi",
    "rsvns",
    "random_connected_subset",
    "vns_stream",
]


@dataclass(frozen=True)
class SearchParams:
    max_start_vns: int = 100
    max_start_crr: int = 100
    min_distance: int = 2
    seed: int = 0

    def __post_init__(self):
        if self.max_start_vns < 1 or self.max_start_crr < 1:
            raise ValueError("max_start values must be at least 1")
        if self.min_distance < 0:
            raise ValueError("min_distance must be non-negative")


def _stream(seed: int, tag: str) -> random.Random:
    return random.Random(f"{seed}:{tag}")


def vns_stream(seed: int) -> random.Random:
    """RNG stream used by ``rsvns`` for its tree VNS phase."""
    return _stream(seed, "vns")


def _check_start(g: Graph, sol: CommunitySolution) -> None:
    k = sol.size
    if not 2 <= k <= g.n - 1:
        raise GraphError(f"set size {k} outside 2..{g.n - 1}")
    if not is_connected_subset(g, sol.members):
        raise GraphError("start set is not connected")


def _best_swap(g: Graph, sol: CommunitySolution) -> CommunitySolution | None:
    """Best strictly improving connected swap, or None at a local optimum."""
    s = sol.members
    cur_num = sol.internal_edges
    cur_den = sol.internal_edges + sol.external_edges
    degsum = 2 * sol.internal_edges + sol.external_edges
    din: dict[int, int] = {}
    for u in s:
        for v in g.adj[u]:
            din[v] = din.get(v, 0) + 1
    members = sorted(s)
    inner = [(u, din.get(u, 0), g.degree(u)) for u in members]
    outer = sorted(v for v in din if v not in s)

    improving = []
    for v in outer:
        dv = g.degree(v)
        dinv = din[v]
        nbr_v = g.neighbors(v)
        for u, dinu, du in inner:
            link = 1 if u in nbr_v else 0
            if dinv - link < 1:
                continue
            num = sol.internal_edges - dinu + dinv - link
            den = degsum - du + dv - num
            if num * cur_den > cur_num * den:
                improving.append((num / den, num, den, u, v))
    if not improving:
        return None
    # alpha values are ratios of small integers, so equal floats mean equal fractions
    improving.sort(key=lambda c: -c[0])
    i = 0
    while i < len(improving):
        j = i
        while j < len(improving) and improving[j][0] == improving[i][0]:
            j += 1
        best = None
        for _, num, den, u, v in improving[i:j]:
            new = (s - {u}) | {v}
            if is_connected_subset(g, new):
                cand = CommunitySolution(new, num, den - num)
                if is_better(cand, best):
                    best = cand
        if best is not None:
            return best
        i = j
    return None


def interchange(g: Graph, start: CommunitySolution,
                trace: list[CommunitySolution] | None = None) -> CommunitySolution:
    """Apply the best improving single swap until none exists."""
    _check_start(g, start)
    sol = start
    while True:
        nxt = _best_swap(g, sol)
        if nxt is None:
            return sol
        sol = nxt
        if trace is not None:
            trace.append(sol)


def random_connected_subset(g: Graph, c: int, k: int, rng: random.Random) -> frozenset[int]:
    """Grow ``{c}`` by uniformly random neighbours of the current set up to size ``k``."""
    if not 1 <= k <= g.n:
        raise GraphError(f"size {k} outside 1..{g.n}")
    return _grow(g, {c}, k, rng, frozenset())


def _grow(g: Graph, core: set[int], k: int, rng: random.Random, avoid: frozenset[int]) -> frozenset[int]:
    s = set(core)
    frontier: list[int] = []
    in_frontier: set[int] = set()
    for u in sorted(s):
        for v in g.adj[u]:
            if v not in s and v not in in_frontier:
                in_frontier.add(v)
                frontier.append(v)
    while len(s) < k:
        pool = [v for v in frontier if v not in avoid] or frontier
        if not pool:
            raise GraphError("cannot grow a connected set of the requested size")
        v = pool[rng.randrange(len(pool))]
        frontier.remove(v)
        in_frontier.discard(v)
        s.add(v)
        for w in g.adj[v]:
            if w not in s and w not in in_frontier:
                in_frontier.add(w)
                frontier.append(w)
    return frozenset(s)


def _perturb(g: Graph, members: frozenset[int], rng: random.Random) -> frozenset[int] | None:
    """Drop ``h`` random tree leaves and regrow ``h`` random neighbours."""
    k = len(members)
    if k < 3:
        return None
    order = sorted(members)
    for _ in range(g.n):
        root = order[rng.randrange(k)]
        tree = random_spanning_tree(g, members, root, rng)
        lv = sorted(leaves(tree))
        top = min(len(lv), k - 1)
        if top >= 2:
            break
    else:
        return None
    h = rng.randint(2, top)
    removed = frozenset(rng.sample(lv, h))
    return _grow(g, set(members - removed), k, rng, removed)


def tree_vns(g: Graph, sol: CommunitySolution, max_start: int = 100,
             rng: random.Random | None = None,
             trace: list[CommunitySolution] | None = None) -> CommunitySolution:
    """Variable neighbourhood search over spanning-tree leaf perturbations."""
    _check_start(g, sol)
    if max_start < 1:
        raise ValueError("max_start must be at least 1")
    rng = rng or random.Random(0)
    best = sol
    for _ in range(max_start):
        start = _perturb(g, best.members, rng)
        if start is None:
            continue
        cand = interchange(g, alpha_of(g, start))
        if cand.alpha > best.alpha:
            best = cand
            if trace is not None:
                trace.append(best)
    return best


def crr(g: Graph, k: int, params: SearchParams = SearchParams(),
        trace: list[CommunitySolution] | None = None) -> CommunitySolution:
    """Constrained random restart.

    Seeds are drawn among nodes at hop distance ``>= min_distance`` from all
    earlier seeds of the current round; when none is left the round resets.
    Only interchange launches count against ``max_start_crr``.
    """
    if not 2 <= k <= g.n - 1:
        raise GraphError(f"k must lie in 2..{g.n - 1}")
    rng = _stream(params.seed, "crr")
    best = None
    launches = 0

    def launch(c: int) -> None:
        nonlocal best, launches
        start = random_connected_subset(g, c, k, rng)
        local = interchange(g, alpha_of(g, start))
        launches += 1
        if is_better(local, best):
            best = local
            if trace is not None:
                trace.append(best)

    while launches < params.max_start_crr:
        c = rng.randrange(g.n)
        dist = bfs_distances(g, (c,))
        launch(c)
        while launches < params.max_start_crr:
            admissible = [v for v in range(g.n) if dist[v] >= params.min_distance]
            if not admissible:
                break
            c = admissible[rng.randrange(len(admissible))]
            dc = bfs_distances(g, (c,))
            dist = [min(a, b) for a, b in zip(dist, dc)]
            launch(c)
    return best


def rsi(g: Graph, k: int, max_start: int = 100, max_random_step: int | None = None,
        seed: int = 0, curve: PersistenceCurve | None = None, threads: int = 1) -> CommunitySolution:
    """Random Shrink witness for size ``k`` improved by interchange."""
    if not 2 <= k <= g.n - 1:
        raise GraphError(f"k must lie in 2..{g.n - 1}")
    if curve is None:
        curve = random_shrink(g, max_start, max_random_step, seed, threads)
    return interchange(g, curve.witness(k))


def rsvns(g: Graph, k: int, max_start: int = 100, max_random_step: int | None = None,
          params: SearchParams = SearchParams(), curve: PersistenceCurve | None = None,
          threads: int = 1) -> CommunitySolution:
    """RSI followed by tree VNS."""
    start = rsi(g, k, max_start, max_random_step, params.seed, curve, threads)
    return tree_vns(g, start, params.max_start_vns, vns_stream(params.seed))
