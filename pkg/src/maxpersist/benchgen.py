"""LFR-style benchmark graphs with planted communities.

Degrees follow a truncated discrete power law, community sizes another one;
each node splits its degree into internal and external stubs according to
the mixing parameter, stubs are paired by a configuration model inside each
block, and leftover multi-edges are resolved by edge swaps. The result is
made connected by degree-preserving swaps between components.
"""

from __future__ import annotations

import json
import math
import os
import random
from collections.abc import Sequence
from dataclasses import asdict, dataclass

from .graph import Graph

__all__ = [
    "GenerationError",
    "LfrParams",
    "PlantedGraph",
    "generate_lfr",
    "realized_mixing",
    "write_instance",
]

_ATTEMPTS = 50


class GenerationError(RuntimeError):
    pass


@dataclass(frozen=True)
class LfrParams:
    n: int
    gamma: float = 2.0
    beta: float = 1.0
    mu: float = 0.1
    avg_degree_frac: float = 0.3
    k_min: int = 2
    k_max: int | None = None
    s_min_frac: float = 0.2
    s_max_frac: float = 0.5
    seed: int = 0

    def __post_init__(self):
        if self.n < 4:
            raise ValueError("n must be at least 4")
        if not 0 < self.mu <= 1:
            raise ValueError("mu must lie in (0, 1]")
        if not 0 < self.s_min_frac <= self.s_max_frac <= 1:
            raise ValueError("need 0 < s_min_frac <= s_max_frac <= 1")
        if self.k_min < 1 or self.k_min > self.degree_cap:
            raise ValueError("need 1 <= k_min <= k_max")
        if self.avg_degree_frac <= 0:
            raise ValueError("avg_degree_frac must be positive")

    @property
    def degree_cap(self) -> int:
        return self.n - 1 if self.k_max is None else self.k_max

    @property
    def target_degree(self) -> float:
        return self.avg_degree_frac * self.n

    @property
    def size_bounds(self) -> tuple[int, int]:
        lo = max(1, math.ceil(self.s_min_frac * self.n - 1e-9))
        hi = min(self.n, math.floor(self.s_max_frac * self.n + 1e-9))
        return lo, hi


@dataclass(frozen=True)
class PlantedGraph:
    graph: Graph
    communities: tuple[tuple[int, ...], ...]
    params: LfrParams | None = None

    @property
    def sizes(self) -> list[int]:
        return [len(c) for c in self.communities]

    def membership(self) -> list[int]:
        comm = [-1] * self.graph.n
        for c, nodes in enumerate(self.communities):
            for v in nodes:
                comm[v] = c
        return comm


def realized_mixing(pg: PlantedGraph) -> float:
    """Fraction of edge endpoints whose edge leaves the endpoint's community."""
    comm = pg.membership()
    g = pg.graph
    if g.m == 0:
        return 0.0
    between = sum(1 for i, j in g.edges() if comm[i] != comm[j])
    return 2 * between / (2 * g.m)


def _power_law_weights(lo: int, hi: int, exponent: float) -> list[float]:
    return [x ** -exponent for x in range(lo, hi + 1)]


def _mean(lo: int, hi: int, exponent: float) -> float:
    w = _power_law_weights(lo, hi, exponent)
    return sum(x * p for x, p in zip(range(lo, hi + 1), w)) / sum(w)


def _degree_sampler(lo: int, hi: int, gamma: float, target: float):
    """Power law on ``[a, hi]`` plus extra mass at ``a`` so the mean hits ``target``."""
    if target > hi:
        raise GenerationError(f"degree feasibility: target mean {target:.2f} exceeds maximum degree {hi}")
    if target < lo:
        raise GenerationError(f"degree feasibility: target mean {target:.2f} below minimum degree {lo}")
    a = lo
    while a < hi and _mean(a + 1, hi, gamma) <= target:
        a += 1
    values = list(range(a, hi + 1))
    weights = _power_law_weights(a, hi, gamma)
    if a < hi:
        # mix the law on [a, hi] with the law on [a+1, hi] to land on target
        m0, m1 = _mean(a, hi, gamma), _mean(a + 1, hi, gamma)
        p = 1.0 if m1 == m0 else min(1.0, max(0.0, (m1 - target) / (m1 - m0)))
        w0 = sum(weights)
        w1 = w0 - weights[0]
        weights = [p * wt / w0 + (1 - p) * (wt / w1 if x > a else 0.0)
                   for x, wt in zip(values, weights)]
    return values, weights


def _sample_sizes(p: LfrParams, rng: random.Random) -> list[int]:
    lo, hi = p.size_bounds
    if lo > p.n:
        raise GenerationError("community sizes: minimum size exceeds n")
    values = list(range(lo, hi + 1))
    weights = _power_law_weights(lo, hi, p.beta)
    for _ in range(100 * _ATTEMPTS):
        sizes: list[int] = []
        while sum(sizes) < p.n:
            sizes.append(rng.choices(values, weights)[0])
        excess = sum(sizes) - p.n
        order = list(range(len(sizes)))
        rng.shuffle(order)
        for i in order:
            cut = min(excess, sizes[i] - lo)
            sizes[i] -= cut
            excess -= cut
        if excess == 0:
            return sizes
    raise GenerationError(f"community sizes: cannot partition n={p.n} into sizes in [{lo}, {hi}]")


def _split_stub(d: int, mu: float, rng: random.Random) -> int:
    exact = (1 - mu) * d
    base = math.floor(exact)
    return base + (1 if rng.random() < exact - base else 0)


def _balance(nodes: list[int], internal: list[int], degrees: list[int], mu: float,
             rng: random.Random) -> None:
    """Move nodes between floor and ceil of ``(1 - mu) * d`` so the community
    total is the nearest integer to its exact share, where capacity allows."""
    cap = len(nodes) - 1
    target = round(sum((1 - mu) * degrees[v] for v in nodes))
    gap = target - sum(internal[v] for v in nodes)
    order = list(nodes)
    rng.shuffle(order)
    for v in order:
        if gap == 0:
            break
        lo = math.floor((1 - mu) * degrees[v])
        if gap > 0 and internal[v] == lo and lo + 1 <= min(cap, degrees[v]) and lo < (1 - mu) * degrees[v]:
            internal[v] += 1
            gap -= 1
        elif gap < 0 and internal[v] > lo:
            internal[v] -= 1
            gap += 1


def _assign(internal: list[int], sizes: list[int], rng: random.Random,
            clamp: bool = False) -> list[int] | None:
    """Community of each node, largest internal demand first; None if stuck.

    With ``clamp`` a node that fits nowhere goes to the largest community
    with room and ``internal`` is lowered in place to that size minus one.
    """
    free = list(sizes)
    comm = [-1] * len(internal)
    order = list(range(len(internal)))
    rng.shuffle(order)
    order.sort(key=lambda v: -internal[v])
    for v in order:
        options = [c for c in range(len(sizes)) if free[c] > 0 and sizes[c] > internal[v]]
        if not options:
            if not clamp:
                return None
            c = max((c for c in range(len(sizes)) if free[c] > 0), key=lambda c: (sizes[c], -c))
            internal[v] = sizes[c] - 1
            options = [c]
        c = rng.choices(options, [free[c] for c in options])[0]
        comm[v] = c
        free[c] -= 1
    return comm


def _match(stubs: list[int], ok, edges: set[tuple[int, int]], block: list[tuple[int, int]],
           rng: random.Random) -> None:
    """Pair stubs into new edges; ``block`` collects the edges created here."""
    pool = list(stubs)
    for _ in range(20):
        if len(pool) < 2:
            break
        rng.shuffle(pool)
        rest = []
        for a, b in zip(pool[::2], pool[1::2]):
            e = (min(a, b), max(a, b))
            if ok(a, b) and e not in edges:
                edges.add(e)
                block.append(e)
            else:
                rest += [a, b]
        if len(pool) % 2:
            rest.append(pool[-1])
        pool = rest
    # swap leftovers into existing edges of the same block
    for a, b in zip(pool[::2], pool[1::2]):
        for _ in range(200):
            if not block:
                break
            idx = rng.randrange(len(block))
            c, d = block[idx]
            if rng.random() < 0.5:
                c, d = d, c
            e1, e2 = (min(a, c), max(a, c)), (min(b, d), max(b, d))
            if (ok(a, c) and ok(b, d) and e1 != e2 and e1 not in edges and e2 not in edges):
                edges.discard(block[idx])
                block[idx] = e1
                block.append(e2)
                edges.update((e1, e2))
                break


def _components(n: int, edges: set[tuple[int, int]]) -> list[list[int]]:
    adj: list[list[int]] = [[] for _ in range(n)]
    for a, b in edges:
        adj[a].append(b)
        adj[b].append(a)
    seen = [False] * n
    comps = []
    for s in range(n):
        if seen[s]:
            continue
        seen[s] = True
        comp, stack = [s], [s]
        while stack:
            u = stack.pop()
            for v in adj[u]:
                if not seen[v]:
                    seen[v] = True
                    comp.append(v)
                    stack.append(v)
        comps.append(sorted(comp))
    comps.sort(key=lambda c: (-len(c), c[0]))
    return comps


def _connect(n: int, edges: set[tuple[int, int]], rng: random.Random) -> bool:
    """Join components to the largest one with degree-preserving swaps."""
    for _ in range(10 * n):
        comps = _components(n, edges)
        if len(comps) == 1:
            return True
        giant, small = comps[0], comps[-1]
        small_set = set(small)
        giant_set = set(giant)
        e_small = sorted(e for e in edges if e[0] in small_set)
        e_giant = sorted(e for e in edges if e[0] in giant_set)
        if not e_giant:
            return False
        c, d = e_giant[rng.randrange(len(e_giant))]
        if not e_small:
            # isolated node: splice it into a giant edge
            v = small[0]
            edges.discard((c, d))
            edges.update({(min(v, c), max(v, c)), (min(v, d), max(v, d))})
            continue
        a, b = e_small[rng.randrange(len(e_small))]
        edges.discard((a, b))
        edges.discard((c, d))
        edges.update({(min(a, c), max(a, c)), (min(b, d), max(b, d))})
    return len(_components(n, edges)) == 1


def _attempt(p: LfrParams, rng: random.Random, clamp: bool) -> PlantedGraph | None:
    n = p.n
    sizes = _sample_sizes(p, rng)
    cap = min(p.degree_cap, math.floor((max(sizes) - 1) / (1 - p.mu)) if p.mu < 1 else p.degree_cap)
    if cap < p.k_min or p.target_degree > cap:
        return None
    values, weights = _degree_sampler(p.k_min, cap, p.gamma, p.target_degree)
    for _ in range(100):
        degrees = rng.choices(values, weights, k=n)
        if abs(sum(degrees) / n - p.target_degree) <= 0.05 * p.target_degree:
            break
    else:
        return None
    internal = [_split_stub(d, p.mu, rng) for d in degrees]
    comm = _assign(internal, sizes, rng, clamp)
    if comm is None:
        return None
    groups: list[list[int]] = [[] for _ in sizes]
    for v, c in enumerate(comm):
        groups[c].append(v)
    for nodes in groups:
        _balance(nodes, internal, degrees, p.mu, rng)
    external = [d - i for d, i in zip(degrees, internal)]
    for nodes in groups:
        if sum(internal[v] for v in nodes) % 2:
            # flip one stub between internal and external to fix parity
            v = max(nodes, key=lambda x: (internal[x], -x))
            internal[v] -= 1
            external[v] += 1
    if sum(external) % 2:
        v = max(range(n), key=lambda x: (external[x], -x))
        external[v] -= 1

    edges: set[tuple[int, int]] = set()
    for nodes in groups:
        stubs = [v for v in nodes for _ in range(internal[v])]
        _match(stubs, lambda a, b: a != b, edges, [], rng)
    stubs = [v for v in range(n) for _ in range(external[v])]
    _match(stubs, lambda a, b: comm[a] != comm[b], edges, [], rng)
    if not _connect(n, edges, rng):
        return None
    # stubs lost in matching must not drag the mean degree off target
    if abs(2 * len(edges) / n - p.target_degree) > 0.1 * p.target_degree:
        return None
    g = Graph.from_edges(sorted(edges), n)
    return PlantedGraph(g, tuple(tuple(sorted(nodes)) for nodes in groups), p)


def generate_lfr(p: LfrParams) -> PlantedGraph:
    """Connected planted-partition graph; raises GenerationError when infeasible."""
    lo, hi = p.size_bounds
    cap = min(p.degree_cap, math.floor((hi - 1) / (1 - p.mu)) if p.mu < 1 else p.degree_cap)
    if p.target_degree > cap:
        raise GenerationError(
            f"internal degree feasibility: target mean degree {p.target_degree:.2f} needs "
            f"communities larger than s_max={hi} at mu={p.mu}")
    if p.target_degree < p.k_min:
        raise GenerationError(f"degree feasibility: target mean {p.target_degree:.2f} below k_min={p.k_min}")
    rng = random.Random(p.seed)
    for attempt in range(_ATTEMPTS):
        # second half of the budget tolerates clamped internal degrees
        pg = _attempt(p, rng, clamp=attempt >= _ATTEMPTS // 2)
        if pg is not None:
            return pg
    raise GenerationError(f"community assignment: no feasible instance after {_ATTEMPTS} attempts")


def write_instance(pg: PlantedGraph, edge_path: str, truth_path: str | None = None) -> None:
    g = pg.graph
    with open(edge_path, "w", encoding="utf-8") as fh:
        for i, j in g.edges():
            fh.write(f"{g.labels[i]} {g.labels[j]}\n")
    if truth_path is not None:
        with open(truth_path, "w", encoding="utf-8") as fh:
            for nodes in pg.communities:
                fh.write(" ".join(g.labels[v] for v in nodes) + "\n")


def read_truth(path: str, g: Graph) -> list[frozenset[int]]:
    with open(path, encoding="utf-8") as fh:
        return [g.indices(line.split()) for line in fh if line.strip()]


def generate_batch(base: LfrParams, count: int, out_dir: str, emit_truth: bool = True,
                   threads: int = 1) -> dict:
    """Instances with seeds ``base.seed + i`` plus a manifest; returns the manifest."""
    from concurrent.futures import ProcessPoolExecutor

    os.makedirs(out_dir, exist_ok=True)
    params = [_with_seed(base, base.seed + i) for i in range(count)]
    if threads > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            graphs = list(pool.map(generate_lfr, params))
    else:
        graphs = [generate_lfr(q) for q in params]
    instances = []
    for i, (q, pg) in enumerate(zip(params, graphs)):
        stem = f"lfr_n{q.n}_s{q.seed}"
        edge_file = stem + ".txt"
        truth_file = stem + ".truth" if emit_truth else None
        write_instance(pg, os.path.join(out_dir, edge_file),
                       os.path.join(out_dir, truth_file) if truth_file else None)
        instances.append({
            "index": i,
            "seed": q.seed,
            "edges_file": edge_file,
            "truth_file": truth_file,
            "n": pg.graph.n,
            "m": pg.graph.m,
            "sizes": pg.sizes,
            "realized_mixing": round(realized_mixing(pg), 6),
        })
    manifest = {"params": _params_dict(base), "count": count, "instances": instances}
    with open(os.path.join(out_dir, "manifest.json"), "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")
    return manifest


def _with_seed(p: LfrParams, seed: int) -> LfrParams:
    d = asdict(p)
    d["seed"] = seed
    return LfrParams(**d)


def _params_dict(p: LfrParams) -> dict:
    d = asdict(p)
    d["k_max"] = p.degree_cap
    return d


def planted_batch(base: LfrParams, seeds: Sequence[int]) -> list[PlantedGraph]:
    return [generate_lfr(_with_seed(base, s)) for s in seeds]
