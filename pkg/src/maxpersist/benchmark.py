"""Scaled benchmark runs over generated LFR instances.

Each instance yields persistence sums per restart budget, the probability
that a larger budget improves some size, size-selection hits against the
planted communities, and how often each improver beats the plain Random
Shrink witness at the selected size.
"""

from __future__ import annotations

import csv
import io
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from fractions import Fraction

from .benchgen import LfrParams, generate_lfr
from .curve import find_peaks, score_against_truth, select_k
from .localsearch import SearchParams, crr, interchange, rsvns
from .shrink import PersistenceCurve, _run_passes, default_random_steps

METHODS = ("rsi", "rsvns", "crr")


@dataclass(frozen=True)
class BenchmarkConfig:
    sizes: tuple[int, ...] = (20,)
    instances: int = 20
    maxits: tuple[int, ...] = (100, 1000)
    methods: tuple[str, ...] = METHODS
    lfr: LfrParams = field(default_factory=lambda: LfrParams(n=20))
    max_random_step: int | None = None
    search: SearchParams = SearchParams()
    seed: int = 0
    timings: bool = False
    threads: int = 1

    def __post_init__(self):
        if not self.sizes or not self.maxits:
            raise ValueError("sizes and maxits must be non-empty")
        if any(m < 1 for m in self.maxits):
            raise ValueError("maxit values must be positive")
        if self.instances < 1:
            raise ValueError("instances must be positive")
        bad = set(self.methods) - set(METHODS)
        if bad:
            raise ValueError(f"unknown methods: {sorted(bad)}")


@dataclass(frozen=True)
class InstanceResult:
    n: int
    seed: int
    sizes: tuple[int, ...]
    f_n: dict[int, Fraction]
    p_improve: dict[int, float]
    peaks: tuple[int, ...]
    k_star: int
    shrink_alpha: Fraction
    method_alpha: dict[str, Fraction]
    times: dict[str, float]


def evaluate_instance(n: int, seed: int, cfg: BenchmarkConfig) -> InstanceResult:
    pg = generate_lfr(replace(cfg.lfr, n=n, seed=seed))
    g = pg.graph
    steps = cfg.max_random_step if cfg.max_random_step is not None else default_random_steps(n)
    steps = min(steps, n - 2)
    times: dict[str, float] = {}

    # budgets share passes: the curve for a larger budget extends the smaller one
    curves: dict[int, PersistenceCurve] = {}
    cur = PersistenceCurve(n)
    done = 0
    t0 = time.perf_counter()
    for m in sorted(set(cfg.maxits)):
        cur = _copy(cur)
        cur.update(_run_passes(g, steps, seed, range(done, m)))
        done = m
        curves[m] = cur
        times[f"shrink_{m}"] = time.perf_counter() - t0

    base_m = min(cfg.maxits)
    base = curves[base_m]
    f_n = {m: c.total() for m, c in curves.items()}
    p_improve = {}
    for m, c in curves.items():
        if m != base_m:
            ks = base.ks()
            p_improve[m] = sum(c.alpha(k) > base.alpha(k) for k in ks) / len(ks)

    peaks = tuple(find_peaks(base))
    k_star = select_k(peaks, "first") or min(pg.sizes)
    k_star = min(max(k_star, 2), n - 1)
    witness = base.witness(k_star)
    params = replace(cfg.search, seed=seed)

    method_alpha: dict[str, Fraction] = {}
    rsi_sol = None
    for name in cfg.methods:
        t0 = time.perf_counter()
        if name == "rsi":
            rsi_sol = interchange(g, witness)
            sol = rsi_sol
        elif name == "rsvns":
            sol = rsvns(g, k_star, params=params, curve=base)
        else:
            sol = crr(g, k_star, params)
        times[name] = time.perf_counter() - t0
        method_alpha[name] = sol.alpha

    return InstanceResult(n, seed, tuple(pg.sizes), f_n, p_improve, peaks, k_star,
                          witness.alpha, method_alpha, times)


def _copy(curve: PersistenceCurve) -> PersistenceCurve:
    return PersistenceCurve(curve.n, curve.entries)


def _evaluate(args) -> InstanceResult:
    return evaluate_instance(*args)


def run_instances(cfg: BenchmarkConfig) -> list[InstanceResult]:
    jobs = [(n, cfg.seed + i, cfg) for n in cfg.sizes for i in range(cfg.instances)]
    if cfg.threads > 1:
        with ProcessPoolExecutor(max_workers=cfg.threads) as pool:
            return list(pool.map(_evaluate, jobs))
    return [_evaluate(j) for j in jobs]


def improvement_stats(results: list[InstanceResult], method: str) -> tuple[float, float | None]:
    """(P.BtRS, M.diff): improvement frequency and mean relative gain on improved cases."""
    gains = [float((r.method_alpha[method] - r.shrink_alpha) / r.shrink_alpha)
             for r in results if r.method_alpha[method] > r.shrink_alpha]
    p = len(gains) / len(results)
    return p, (sum(gains) / len(gains) if gains else None)


def columns(cfg: BenchmarkConfig) -> list[str]:
    maxits = sorted(set(cfg.maxits))
    cols = ["n", "instances"]
    cols += [f"f_n_{m}" for m in maxits]
    cols += [f"p_improve_{m}" for m in maxits[1:]]
    cols += ["p_k_first", "p_k_median", "p_k_atleast", "p_k_all"]
    for name in cfg.methods:
        cols += [f"{name}_p_btrs", f"{name}_m_diff"]
    if cfg.timings:
        cols += [f"time_shrink_{m}" for m in maxits]
        cols += [f"{name}_time" for name in cfg.methods]
    return cols


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, int):
        return str(v)
    return f"{float(v):.6f}"


def summarize(cfg: BenchmarkConfig, results: list[InstanceResult]) -> list[dict[str, str]]:
    rows = []
    maxits = sorted(set(cfg.maxits))
    for n in cfg.sizes:
        rs = [r for r in results if r.n == n]
        cnt = len(rs)
        row: dict[str, object] = {"n": n, "instances": cnt}
        for m in maxits:
            row[f"f_n_{m}"] = sum(float(r.f_n[m]) for r in rs) / cnt
        for m in maxits[1:]:
            row[f"p_improve_{m}"] = sum(r.p_improve[m] for r in rs) / cnt
        scores = [score_against_truth(r.peaks, r.sizes) for r in rs]
        for key, attr in (("p_k_first", "first_hit"), ("p_k_median", "median_hit"),
                          ("p_k_atleast", "at_least_one"), ("p_k_all", "all_covered")):
            row[key] = sum(getattr(s, attr) for s in scores) / cnt
        for name in cfg.methods:
            p, d = improvement_stats(rs, name)
            row[f"{name}_p_btrs"], row[f"{name}_m_diff"] = p, d
        if cfg.timings:
            for m in maxits:
                row[f"time_shrink_{m}"] = sum(r.times[f"shrink_{m}"] for r in rs) / cnt
            for name in cfg.methods:
                row[f"{name}_time"] = sum(r.times[name] for r in rs) / cnt
        rows.append({k: _fmt(v) for k, v in row.items()})
    return rows


def report_csv(cfg: BenchmarkConfig, results: list[InstanceResult]) -> str:
    buf = io.StringIO()
    w = csv.DictWriter(buf, fieldnames=columns(cfg), lineterminator="\n")
    w.writeheader()
    w.writerows(summarize(cfg, results))
    return buf.getvalue()
