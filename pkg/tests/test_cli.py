import csv
import json
import os
import re
import subprocess
import sys
from importlib.resources import files

import jsonschema
import pytest

from maxpersist import karate_path
from maxpersist.benchgen import LfrParams, generate_lfr, write_instance
from maxpersist.cli import main

from conftest import KARATE_5

SCHEMAS = files("maxpersist") / "schemas"
SOLVER = f"{sys.executable} {os.path.join(os.path.dirname(__file__), 'highs_solve.py')} {{lp}} {{sol}}"


def schema(name):
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def run(*argv):
    return main([str(a) for a in argv])


@pytest.fixture
def lfr_file(tmp_path):
    def make(n, seed=0):
        path = tmp_path / f"lfr{n}_{seed}.txt"
        write_instance(generate_lfr(LfrParams(n=n, seed=seed)), str(path))
        return path
    return make


def test_curve_outputs(tmp_path):
    out = tmp_path / "k" / "karate"
    assert run("curve", "--graph", karate_path(), "--out", out) == 0
    peaks = json.loads(out.with_suffix(".peaks.json").read_text())
    jsonschema.validate(peaks, schema("peaks"))
    assert {5, 19} <= set(peaks["peaks"])
    data = json.loads(out.with_suffix(".json").read_text())
    jsonschema.validate(data, schema("curve"))
    rows = list(csv.reader(out.with_suffix(".csv").read_text().splitlines()))
    assert rows[0] == ["k", "alpha", "members"]
    assert [int(r[0]) for r in rows[1:]] == list(range(2, 34))
    svg = out.with_suffix(".svg").read_text()
    assert svg.startswith("<svg") and "<polyline" in svg
    marked = {int(k) for k in re.findall(r'class="peak" data-k="(\d+)"', svg)}
    assert {5, 19} <= marked == set(peaks["peaks"])


def test_curve_restart_monotone(tmp_path):
    run("curve", "--graph", karate_path(), "--max-start", 1, "--seed", 3, "--out", tmp_path / "a")
    run("curve", "--graph", karate_path(), "--max-start", 100, "--seed", 3, "--out", tmp_path / "b")
    a = json.loads((tmp_path / "a.peaks.json").read_text())["alphas"]
    b = json.loads((tmp_path / "b.peaks.json").read_text())["alphas"]
    assert all(b[k] >= a[k] for k in a)


def test_missing_file_exit_two(tmp_path, capsys):
    missing = tmp_path / "nope.txt"
    assert run("curve", "--graph", missing, "--out", tmp_path / "x") == 2
    assert str(missing) in capsys.readouterr().err


def test_malformed_graph_exit_two(tmp_path, capsys):
    bad = tmp_path / "bad.txt"
    bad.write_text("1 2\n2\n")
    assert run("optimize", "--graph", bad, "--k", 2) == 2
    assert "line 2" in capsys.readouterr().err


@pytest.mark.parametrize("method", ["rsi", "rsvns", "crr"])
def test_optimize_karate_five(tmp_path, method):
    out = tmp_path / "o.json"
    assert run("optimize", "--graph", karate_path(), "--k", 5, "--method", method, "--out", out) == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("optimize"))
    assert data["alpha"] == 0.6 and data["members"] == KARATE_5 and data["method"] == method


def test_optimize_deterministic(tmp_path):
    for name in ("a", "b"):
        run("optimize", "--graph", karate_path(), "--k", 9, "--method", "rsvns", "--seed", 4,
            "--out", tmp_path / f"{name}.json")
    assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()


@pytest.mark.parametrize("k", [1, 34, 100])
def test_optimize_k_out_of_range(k, capsys):
    assert run("optimize", "--graph", karate_path(), "--k", k) == 2
    assert "--k" in capsys.readouterr().err


def test_usage_errors_exit_two():
    assert run("optimize", "--graph", karate_path()) == 2
    assert run("optimize", "--graph", karate_path(), "--k", 5, "--method", "tabu") == 2
    assert run("nonsense") == 2
    assert run("curve", "--graph", karate_path(), "--max-random-step", 40) == 2


def test_exact_karate(tmp_path):
    out = tmp_path / "e.json"
    assert run("exact", "--graph", karate_path(), "--k", 5, "--out", out) == 0
    data = json.loads(out.read_text())
    jsonschema.validate(data, schema("exact"))
    assert data["alpha"] == 0.6 and data["members"] == KARATE_5
    assert data["subsets_enumerated"] > 0


def test_exact_refuses_large_graph(lfr_file, capsys):
    path = lfr_file(100)
    assert run("exact", "--graph", path, "--k", 3) == 2
    assert "--force" in capsys.readouterr().err


def test_exact_force_runs(lfr_file, tmp_path):
    path = lfr_file(45)
    assert run("exact", "--graph", path, "--k", 2, "--force", "--out", tmp_path / "f.json") == 0


def test_export_milp(tmp_path, lfr_file):
    path = lfr_file(12, seed=2)
    lp = tmp_path / "m.lp"
    assert run("export-milp", "--graph", path, "--k", 5, "--out", lp) == 0
    text = lp.read_text()
    assert text.splitlines()[1] == "Maximize" and text.rstrip().endswith("End")


def test_export_milp_with_solver_matches_exact(tmp_path, lfr_file, capsys):
    pytest.importorskip("highspy")
    path = lfr_file(12, seed=4)
    run("exact", "--graph", path, "--k", 6, "--out", tmp_path / "e.json")
    capsys.readouterr()
    assert run("export-milp", "--graph", path, "--k", 6, "--out", tmp_path / "m.lp",
               "--solver-cmd", SOLVER) == 0
    solved = json.loads(capsys.readouterr().out)
    jsonschema.validate(solved, schema("milp_solution"))
    exact = json.loads((tmp_path / "e.json").read_text())
    assert solved["alpha_exact"] == exact["alpha_exact"]
    assert solved["objective"] == pytest.approx(exact["alpha"], abs=1e-6)


def test_export_milp_solver_failure_is_domain_error(tmp_path, lfr_file):
    path = lfr_file(12)
    cmd = f"{sys.executable} -c \"import sys; sys.exit(3)\""
    assert run("export-milp", "--graph", path, "--k", 4, "--out", tmp_path / "m.lp", "--solver-cmd", cmd) == 1


def test_generate(tmp_path):
    out = tmp_path / "g"
    assert run("generate", "--n", 50, "--count", 5, "--out", out, "--emit-truth") == 0
    names = sorted(os.listdir(out))
    assert len([f for f in names if f.endswith(".txt")]) == 5
    assert len([f for f in names if f.endswith(".truth")]) == 5
    man = json.loads((out / "manifest.json").read_text())
    jsonschema.validate(man, schema("manifest"))
    assert man["params"]["mu"] == 0.1 and man["count"] == 5


def test_generate_repeatable(tmp_path):
    for d in ("a", "b"):
        run("generate", "--n", 40, "--count", 2, "--seed", 9, "--out", tmp_path / d, "--emit-truth")
    for f in sorted(os.listdir(tmp_path / "a")):
        assert (tmp_path / "a" / f).read_bytes() == (tmp_path / "b" / f).read_bytes()


def test_generate_rejects_zero_mu(tmp_path, capsys):
    assert run("generate", "--n", 50, "--mu", 0, "--out", tmp_path) == 2
    assert "mu" in capsys.readouterr().err


def test_generate_infeasible_is_domain_error(tmp_path, capsys):
    assert run("generate", "--n", 50, "--avg-degree-frac", 0.9, "--s-max-frac", 0.2,
               "--out", tmp_path) == 1
    assert "feasibility" in capsys.readouterr().err


def test_benchmark_report(tmp_path):
    out = tmp_path / "b.csv"
    assert run("benchmark", "--sizes", 20, "--instances", 20, "--maxit", "100,1000", "--out", out) == 0
    rows = list(csv.DictReader(out.read_text().splitlines()))
    assert len(rows) == 1
    row = rows[0]
    assert 0 <= float(row["p_improve_1000"]) <= 0.3
    assert float(row["f_n_100"]) > 0 and float(row["f_n_1000"]) >= float(row["f_n_100"])
    assert list(row) == ["n", "instances", "f_n_100", "f_n_1000", "p_improve_1000",
                         "p_k_first", "p_k_median", "p_k_atleast", "p_k_all",
                         "rsi_p_btrs", "rsi_m_diff", "rsvns_p_btrs", "rsvns_m_diff",
                         "crr_p_btrs", "crr_m_diff"]


def test_benchmark_schema_stable_and_timings_flag(tmp_path):
    args = ["benchmark", "--sizes", "20,25", "--instances", 2, "--maxit", "10,20", "--methods", "rsi,crr",
            "--max-start", 5]
    run(*args, "--out", tmp_path / "a.csv")
    run(*args, "--out", tmp_path / "b.csv")
    assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()
    run(*args, "--timings", "--out", tmp_path / "t.csv")
    head = (tmp_path / "t.csv").read_text().splitlines()[0].split(",")
    assert head[-3:] == ["time_shrink_20", "rsi_time", "crr_time"]
    assert run("benchmark", "--methods", "louvain") == 2


def test_config_file_and_flag_precedence(tmp_path):
    cfg = tmp_path / "run.cfg"
    cfg.write_text(f"# experiment\ngraph = {karate_path()}\nk = 19\nmethod = rsi\nmax-start = 20\n")
    assert run("optimize", "--config", cfg, "--out", tmp_path / "a.json") == 0
    a = json.loads((tmp_path / "a.json").read_text())
    assert a["k"] == 19 and a["method"] == "rsi"
    assert run("optimize", "--config", cfg, "--k", 5, "--out", tmp_path / "b.json") == 0
    assert json.loads((tmp_path / "b.json").read_text())["k"] == 5


def test_config_errors(tmp_path):
    cfg = tmp_path / "bad.cfg"
    cfg.write_text("colour = blue\n")
    assert run("optimize", "--config", cfg, "--graph", karate_path(), "--k", 5) == 2
    assert run("optimize", "--config", tmp_path / "missing.cfg", "--graph", karate_path(), "--k", 5) == 2


def test_console_script_entry_point(tmp_path):
    proc = subprocess.run([sys.executable, "-m", "maxpersist.cli", "optimize", "--graph", karate_path(),
                           "--k", "5"], capture_output=True, text=True)
    assert proc.returncode == 0
    assert json.loads(proc.stdout)["members"] == KARATE_5
