import json
import statistics
from fractions import Fraction

import pytest

from maxpersist.benchgen import (
    GenerationError,
    LfrParams,
    PlantedGraph,
    generate_batch,
    generate_lfr,
    read_truth,
    realized_mixing,
)
from maxpersist.graph import Graph, read_edge_list
from maxpersist.persistence import edge_counts


def _check_instance(pg: PlantedGraph):
    g = pg.graph
    p = pg.params
    lo, hi = p.size_bounds
    assert g.is_connected()
    assert sum(pg.sizes) == g.n
    assert all(lo <= s <= hi for s in pg.sizes)
    assert sorted(v for c in pg.communities for v in c) == list(range(g.n))
    degs = [g.degree(v) for v in range(g.n)]
    assert min(degs) >= 1 and max(degs) <= p.degree_cap
    assert abs(statistics.mean(degs) - p.target_degree) <= 0.1 * p.target_degree


@pytest.mark.parametrize("n", [20, 30, 50, 100])
def test_instances_valid(n):
    for seed in range(10):
        _check_instance(generate_lfr(LfrParams(n=n, seed=seed)))


def test_default_protocol_instance():
    pg = generate_lfr(LfrParams(n=200, mu=0.1, seed=0))
    _check_instance(pg)
    assert 2 <= len(pg.communities) <= 5
    assert statistics.mean(pg.graph.degree(v) for v in range(200)) == pytest.approx(60, rel=0.1)


def test_deterministic():
    a = generate_lfr(LfrParams(n=50, seed=7))
    b = generate_lfr(LfrParams(n=50, seed=7))
    assert a.graph == b.graph and a.communities == b.communities


@pytest.mark.parametrize("mu", [0.05, 0.1, 0.3, 0.5])
def test_mixing_within_tolerance(mu):
    vals = [realized_mixing(generate_lfr(LfrParams(n=50, mu=mu, seed=s))) for s in range(50)]
    assert abs(statistics.mean(vals) - mu) <= 0.03


def test_mixing_hand_counts():
    g = Graph.from_edges([(0, 1)], 2)
    assert realized_mixing(PlantedGraph(g, ((0, 1),))) == 0
    k4 = [(i, j) for i in range(4) for j in range(i + 1, 4)]
    g = Graph.from_edges(k4 + [(a + 4, b + 4) for a, b in k4] + [(0, 4)], 8)
    pg = PlantedGraph(g, ((0, 1, 2, 3), (4, 5, 6, 7)))
    assert Fraction(realized_mixing(pg)).limit_denominator(100) == Fraction(2, 26)


def test_community_persistence_identity_and_low_mixing_bound():
    mu = 0.1
    ok = total = 0
    for seed in range(50):
        pg = generate_lfr(LfrParams(n=50, mu=mu, seed=seed))
        for c in pg.communities:
            i, e = edge_counts(pg.graph, c)
            alpha = Fraction(i, i + e)
            mix = Fraction(e, 2 * i + e)
            assert alpha == (1 - mix) / (1 + mix)
            total += 1
            ok += alpha >= Fraction(1) - Fraction(mu).limit_denominator() - Fraction(1, 10)
    # expected community alpha at mu=0.1 is (1-mu)/(1+mu) ~ 0.818, so the bound
    # holds for the bulk of communities rather than every single one
    assert ok / total >= 0.95


def test_invalid_params():
    with pytest.raises(ValueError):
        LfrParams(n=50, mu=0)
    with pytest.raises(ValueError):
        LfrParams(n=50, mu=1.5)
    with pytest.raises(ValueError):
        LfrParams(n=50, s_min_frac=0.6, s_max_frac=0.5)
    with pytest.raises(ValueError):
        LfrParams(n=50, k_min=10, k_max=5)


def test_infeasible_params_named():
    with pytest.raises(GenerationError, match="feasibility"):
        generate_lfr(LfrParams(n=50, avg_degree_frac=0.9, s_max_frac=0.2))


def test_batch_files_and_manifest(tmp_path):
    base = LfrParams(n=30, seed=5)
    man = generate_batch(base, 3, str(tmp_path), emit_truth=True)
    assert [i["seed"] for i in man["instances"]] == [5, 6, 7]
    on_disk = json.loads((tmp_path / "manifest.json").read_text())
    assert on_disk == man
    for inst in man["instances"]:
        g = read_edge_list(tmp_path / inst["edges_file"])
        truth = read_truth(str(tmp_path / inst["truth_file"]), g)
        assert sorted(len(c) for c in truth) == sorted(inst["sizes"])
        pg = PlantedGraph(g, tuple(tuple(sorted(c)) for c in truth))
        assert realized_mixing(pg) == pytest.approx(inst["realized_mixing"], abs=1e-6)


def test_batch_thread_independent(tmp_path):
    base = LfrParams(n=30, seed=1)
    generate_batch(base, 4, str(tmp_path / "a"), threads=1)
    generate_batch(base, 4, str(tmp_path / "b"), threads=3)
    for f in sorted((tmp_path / "a").iterdir()):
        assert f.read_bytes() == (tmp_path / "b" / f.name).read_bytes()
