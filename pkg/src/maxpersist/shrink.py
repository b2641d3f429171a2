"""Random Shrink: randomized-then-greedy agglomerative merging.

Each pass starts from singletons, performs ``max_random_step`` random merges
(a uniformly drawn boundary edge joins its two clusters), then greedily
merges the adjacent pair with the highest merged persistence until a single
cluster remains. Every cluster produced along the way is a connected
candidate for its size; the best per size across passes forms the
persistence curve.
"""

from __future__ import annotations

import csv
import heapq
import io
import json
import random
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction

from .graph import Graph, GraphError
from .persistence import CommunitySolution, MergePartition, is_better

__all__ = ["CurveEntry", "PersistenceCurve", "random_shrink", "shrink_pass", "default_random_steps"]


@dataclass(frozen=True)
class CurveEntry:
    solution: CommunitySolution
    restart: int
    filled: bool = False

    @property
    def alpha(self) -> Fraction:
        return self.solution.alpha


class PersistenceCurve:
    """Best persistence and witness set per size ``k`` in ``2..n-1``."""

    def __init__(self, n: int, entries: dict[int, CurveEntry] | None = None):
        self.n = n
        self.entries: dict[int, CurveEntry] = dict(entries or {})

    def __contains__(self, k: int) -> bool:
        return k in self.entries

    def __getitem__(self, k: int) -> CurveEntry:
        return self.entries[k]

    def ks(self) -> list[int]:
        return sorted(self.entries)

    def alpha(self, k: int) -> Fraction:
        return self.entries[k].alpha

    def witness(self, k: int) -> CommunitySolution:
        return self.entries[k].solution

    def alphas(self) -> dict[int, Fraction]:
        return {k: self.entries[k].alpha for k in self.ks()}

    def offer(self, entry: CurveEntry) -> bool:
        k = entry.solution.size
        cur = self.entries.get(k)
        if cur is None or is_better(entry.solution, cur.solution):
            self.entries[k] = entry
            return True
        return False

    def update(self, other: "PersistenceCurve") -> None:
        """Pointwise best with ``other``; existing entries win exact ties."""
        for k in other.ks():
            self.offer(other.entries[k])

    def total(self) -> Fraction:
        """Sum of alpha over all sizes (``f_n`` in benchmark reports)."""
        return sum(self.alphas().values(), Fraction(0))

    def rows(self, g: Graph) -> list[tuple[int, float, str]]:
        return [(k, float(e.alpha), "|".join(map(str, g.label_values(e.solution.members))))
                for k, e in sorted(self.entries.items())]

    def to_csv(self, g: Graph) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "alpha", "members"])
        w.writerows(self.rows(g))
        return buf.getvalue()

    def to_json(self, g: Graph) -> dict:
        return {
            "n": self.n,
            "points": [
                {
                    "k": k,
                    "alpha": float(e.alpha),
                    "internal_edges": e.solution.internal_edges,
                    "external_edges": e.solution.external_edges,
                    "members": g.label_values(e.solution.members),
                    "restart": e.restart,
                    "filled": e.filled,
                }
                for k, e in sorted(self.entries.items())
            ],
        }

    @classmethod
    def from_json(cls, g: Graph, data: dict) -> "PersistenceCurve":
        curve = cls(data["n"])
        for p in data["points"]:
            members = g.indices(p["members"])
            sol = CommunitySolution(members, p["internal_edges"], p["external_edges"])
            curve.entries[p["k"]] = CurveEntry(sol, p["restart"], p.get("filled", False))
        return curve


def default_random_steps(n: int) -> int:
    # at least one random merge, otherwise every pass repeats the same greedy run
    return min(max(1, n // 10), max(n - 2, 0))


class _UnionKey:
    """Lexicographic order of the sorted union of two member tuples, built on demand."""

    __slots__ = ("mq", "ml", "_key")

    def __init__(self, mq: tuple[int, ...], ml: tuple[int, ...]):
        self.mq, self.ml = mq, ml
        self._key = None

    def key(self) -> tuple[int, ...]:
        if self._key is None:
            self._key = tuple(sorted(self.mq + self.ml))
        return self._key

    def __lt__(self, other: "_UnionKey") -> bool:
        return self.key() < other.key()

    def __eq__(self, other) -> bool:
        return self.key() == other.key()


def shrink_pass(g: Graph, max_random_step: int, rng: random.Random) -> dict[int, CommunitySolution]:
    """One merge pass; returns the best cluster seen for each size ``2..n-1``."""
    n = g.n
    p = MergePartition(g)
    edges = g.edges()
    best_counts: dict[int, tuple[int, int, tuple[int, ...]]] = {}
    # members as sorted tuples; stale heap items keep the tuples they saw
    members: dict[int, tuple[int, ...]] = {i: (i,) for i in range(n)}
    version = [0] * n

    def record(c: int) -> None:
        mem = members[c]
        k = len(mem)
        if not 2 <= k <= n - 1:
            return
        i, e = p.e_in[c], p.e_out[c]
        cur = best_counts.get(k)
        if cur is not None:
            x, y = i * (cur[0] + cur[1]), cur[0] * (i + e)
            if x < y or (x == y and mem >= cur[2]):
                return
        best_counts[k] = (i, e, mem)

    def merge(q: int, l: int) -> int:
        c = p.apply_merge(q, l)
        other = l if c == q else q
        members[c] = tuple(sorted(members[q] + members[l]))
        del members[other]
        version[c] += 1
        record(c)
        return c

    it = 0
    while len(p) > 1 and it < max_random_step:
        while True:
            u, v = edges[rng.randrange(len(edges))]
            q, l = p.owner[u], p.owner[v]
            if q != l:
                break
        merge(q, l)
        it += 1

    def entry(q, l):
        num, ext = p.merge_counts(q, l)
        # ratios of integers below 2**26 order exactly as floats
        return (-num / (num + ext), _UnionKey(members[q], members[l]), q, l, version[q], version[l])

    heap = [entry(q, l) for q in p.members for l in p.links[q] if q < l]
    heapq.heapify(heap)

    e_in, e_out, push, pop = p.e_in, p.e_out, heapq.heappush, heapq.heappop
    while len(p) > 1:
        _, _, q, l, vq, vl = pop(heap)
        if vq != version[q] or vl != version[l] or q not in members or l not in members:
            continue
        c = merge(q, l)
        ic, oc, mc, vc = e_in[c], e_out[c], members[c], version[c]
        for r, a in p.links[c].items():
            num = ic + e_in[r] + a
            push(heap, (-num / (ic + oc + e_in[r] + e_out[r] - a), _UnionKey(mc, members[r]),
                        c, r, vc, version[r]))

    return {k: CommunitySolution(frozenset(mem), i, e) for k, (i, e, mem) in best_counts.items()}


def _fill_gaps(g: Graph, found: dict[int, CommunitySolution]) -> dict[int, tuple[CommunitySolution, bool]]:
    """Complete a pass table to every size ``2..n-1``.

    A merge can jump over sizes; a missing size ``k`` is filled by adding to
    the size ``k-1`` set the neighbour that maximizes persistence.
    """
    out: dict[int, tuple[CommunitySolution, bool]] = {}
    prev = None
    for k in range(2, g.n):
        sol = found.get(k)
        if sol is not None:
            out[k] = (sol, False)
        else:
            if prev is None:
                raise GraphError("no size-2 cluster to grow from")
            sol = _grow_best(g, prev)
            out[k] = (sol, True)
        prev = sol
    return out


def _grow_best(g: Graph, sol: CommunitySolution) -> CommunitySolution:
    s = sol.members
    din: dict[int, int] = {}
    for u in s:
        for v in g.adj[u]:
            if v not in s:
                din[v] = din.get(v, 0) + 1
    best = None
    for v in sorted(din):
        internal = sol.internal_edges + din[v]
        external = sol.external_edges - din[v] + (g.degree(v) - din[v])
        cand = CommunitySolution(s | {v}, internal, external)
        if is_better(cand, best):
            best = cand
    return best


def _run_passes(g: Graph, max_random_step: int, seed: int, starts: range) -> PersistenceCurve:
    curve = PersistenceCurve(g.n)
    for s in starts:
        rng = random.Random(seed ^ s)
        table = _fill_gaps(g, shrink_pass(g, max_random_step, rng))
        for sol, filled in table.values():
            curve.offer(CurveEntry(sol, s, filled))
    return curve


def random_shrink(g: Graph, max_start: int = 100, max_random_step: int | None = None,
                  seed: int = 0, threads: int = 1) -> PersistenceCurve:
    """Persistence curve from ``max_start`` independent merge passes.

    Pass ``s`` draws from ``random.Random(seed ^ s)``, so results do not
    depend on ``threads``.
    """
    if max_start < 1:
        raise ValueError("max_start must be at least 1")
    if g.n < 3:
        raise ValueError("graph needs at least 3 nodes")
    if max_random_step is None:
        max_random_step = default_random_steps(g.n)
    if not 0 <= max_random_step <= g.n - 2:
        raise ValueError(f"max_random_step must lie in 0..{g.n - 2}")
    if threads <= 1 or max_start == 1:
        return _run_passes(g, max_random_step, seed, range(max_start))

    chunks = _chunks(max_start, threads)
    curve = PersistenceCurve(g.n)
    with ProcessPoolExecutor(max_workers=threads) as pool:
        parts = pool.map(_run_passes, [g] * len(chunks), [max_random_step] * len(chunks),
                         [seed] * len(chunks), chunks)
        for part in parts:
            curve.update(part)
    return curve


def _chunks(total: int, parts: int) -> list[range]:
    step = -(-total // parts)
    return [range(a, min(a + step, total)) for a in range(0, total, step)]


def curve_to_json_text(curve: PersistenceCurve, g: Graph) -> str:
    return json.dumps(curve.to_json(g), indent=2) + "\n"
