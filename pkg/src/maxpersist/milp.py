"""Mixed-integer linear model of the maximum persistence problem.

The fractional objective ``internal / touching`` is linearized with the
Charnes-Cooper substitution ``u = 1 / touching``; products of binaries use
the clique-partitioning triplets and products with ``u`` use big-M triplets.
Connectivity is imposed by a single-commodity flow from the selected node
with the highest index. Variable names use 1-based node numbers
(``x_3`` is internal node 2), not the graph's labels.
"""

from __future__ import annotations

import math
import os
import shlex
import subprocess
import tempfile
from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from fractions import Fraction
from typing import TextIO

from .graph import Graph, GraphError, is_connected_subset
from .persistence import edge_counts

__all__ = [
    "Variable",
    "Constraint",
    "MilpModel",
    "build_p1",
    "write_lp",
    "witness_assignment",
    "parse_solution",
    "decode_members",
    "solve_external",
]

INF = math.inf


@dataclass(frozen=True)
class Variable:
    name: str
    kind: str  # "binary" or "continuous"
    lower: float = 0
    upper: float = INF


@dataclass(frozen=True)
class Constraint:
    name: str
    terms: tuple[tuple[str, int], ...]
    sense: str  # "<=", ">=" or "="
    rhs: int


@dataclass
class MilpModel:
    name: str = "model"
    variables: list[Variable] = field(default_factory=list)
    objective: list[tuple[str, int]] = field(default_factory=list)
    constraints: list[Constraint] = field(default_factory=list)
    _declared: dict[str, Variable] = field(default_factory=dict, repr=False)

    def add_var(self, name: str, kind: str = "continuous", lower: float = 0, upper: float = INF) -> str:
        if name in self._declared:
            raise ValueError(f"duplicate variable {name}")
        if kind not in ("binary", "continuous"):
            raise ValueError(f"unknown variable kind {kind}")
        var = Variable(name, kind, 0 if kind == "binary" else lower, 1 if kind == "binary" else upper)
        self.variables.append(var)
        self._declared[name] = var
        return name

    def add_constraint(self, name: str, terms: Iterable[tuple[str, int]], sense: str, rhs: int) -> None:
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown relation {sense}")
        merged: dict[str, int] = {}
        for var, coef in terms:
            if var not in self._declared:
                raise ValueError(f"constraint {name} uses undeclared variable {var}")
            merged[var] = merged.get(var, 0) + coef
        self.constraints.append(Constraint(name, tuple(merged.items()), sense, rhs))

    def variable(self, name: str) -> Variable:
        return self._declared[name]

    def census(self) -> dict[str, int]:
        """Number of variables and constraints per name prefix."""
        out: dict[str, int] = {}
        for v in self.variables:
            key = "var:" + v.name.split("_")[0]
            out[key] = out.get(key, 0) + 1
        for c in self.constraints:
            key = "con:" + c.name.split("_")[0]
            out[key] = out.get(key, 0) + 1
        return out

    def objective_value(self, values: dict[str, Fraction]) -> Fraction:
        return sum((coef * values.get(v, 0) for v, coef in self.objective), Fraction(0))

    def violations(self, values: dict[str, Fraction]) -> list[str]:
        """Names of violated constraints and bounds (exact arithmetic)."""
        bad = []
        for v in self.variables:
            x = values.get(v.name, 0)
            if x < v.lower or x > v.upper or (v.kind == "binary" and x not in (0, 1)):
                bad.append(f"bound:{v.name}")
        for c in self.constraints:
            lhs = sum((coef * values.get(v, 0) for v, coef in c.terms), Fraction(0))
            ok = lhs <= c.rhs if c.sense == "<=" else lhs >= c.rhs if c.sense == ">=" else lhs == c.rhs
            if not ok:
                bad.append(c.name)
        return bad


def _pair(i: int, j: int) -> str:
    return f"{min(i, j) + 1}_{max(i, j) + 1}"


def build_p1(g: Graph, k: int, big_m: int = 1, flow_m: int | None = None) -> MilpModel:
    """Linearized model for connected ``k``-subsets of maximum persistence.

    ``big_m`` bounds ``u``; since the touching-edge count of a connected set
    with ``k >= 2`` is at least 1, ``u <= 1`` and the default is tight.
    ``flow_m`` is the coefficient of the flow-demand switch. It defaults to
    ``max(n - 2, k)``: the source ships ``k - 1`` units, so with ``k = n - 1``
    and an unselected higher-index node a coefficient of ``n - 2`` would cut
    off feasible sets.
    """
    n = g.n
    if k < 2:
        raise GraphError("k must be at least 2")
    if k > n:
        raise GraphError(f"k exceeds the number of nodes ({n})")
    flow_m = max(n - 2, k) if flow_m is None else flow_m
    model = MilpModel(name=f"persistence_k{k}")
    x = [model.add_var(f"x_{i + 1}", "binary") for i in range(n)]
    pairs = [(i, j) for i in range(n) for j in range(i + 1, n)]
    ordered = [(i, j) for i in range(n) for j in range(n) if i != j]
    arcs = [(i, j) for i in range(n) for j in g.adj[i]]
    z = {p: model.add_var(f"z_{_pair(*p)}", upper=1) for p in pairs}
    w = {p: model.add_var(f"w_{_pair(*p)}", upper=1) for p in pairs}
    h = {p: model.add_var(f"h_{p[0] + 1}_{p[1] + 1}") for p in ordered}
    l = {p: model.add_var(f"l_{p[0] + 1}_{p[1] + 1}") for p in ordered}
    u = model.add_var("u", upper=big_m)
    f = {a: model.add_var(f"f_{a[0] + 1}_{a[1] + 1}") for a in arcs}

    def zz(i, j):
        return z[(min(i, j), max(i, j))]

    def ww(i, j):
        return w[(min(i, j), max(i, j))]

    edges = g.edges()
    model.objective = [(h[e], 1) for e in edges]

    model.add_constraint("card", [(xi, 1) for xi in x], "=", k)
    for i, j in pairs:
        tag = _pair(i, j)
        model.add_constraint(f"zi_{tag}", [(z[(i, j)], 1), (x[i], -1)], "<=", 0)
        model.add_constraint(f"zj_{tag}", [(z[(i, j)], 1), (x[j], -1)], "<=", 0)
        model.add_constraint(f"zij_{tag}", [(z[(i, j)], 1), (x[i], -1), (x[j], -1)], ">=", -1)
    for i, j in pairs:
        tag = _pair(i, j)
        model.add_constraint(f"wi_{tag}", [(w[(i, j)], 1), (x[i], 1)], "<=", 1)
        model.add_constraint(f"wj_{tag}", [(w[(i, j)], 1), (x[j], 1)], "<=", 1)
        model.add_constraint(f"wij_{tag}", [(w[(i, j)], 1), (x[i], 1), (x[j], 1)], ">=", 1)
    for i, j in ordered:
        tag = f"{i + 1}_{j + 1}"
        model.add_constraint(f"hu_{tag}", [(h[(i, j)], 1), (u, -1)], "<=", 0)
        model.add_constraint(f"hz_{tag}", [(h[(i, j)], 1), (zz(i, j), -big_m)], "<=", 0)
        model.add_constraint(f"huz_{tag}", [(h[(i, j)], 1), (u, -1), (zz(i, j), -big_m)], ">=", -big_m)
    for i, j in ordered:
        tag = f"{i + 1}_{j + 1}"
        model.add_constraint(f"lu_{tag}", [(l[(i, j)], 1), (u, -1)], "<=", 0)
        model.add_constraint(f"lw_{tag}", [(l[(i, j)], 1), (ww(i, j), -big_m)], "<=", 0)
        model.add_constraint(f"luw_{tag}", [(l[(i, j)], 1), (u, -1), (ww(i, j), -big_m)], ">=", -big_m)
    model.add_constraint("norm", [(u, len(edges))] + [(l[e], -1) for e in edges], "=", 1)
    for i in range(n):
        terms = [(f[(i, j)], 1) for j in g.adj[i]]
        terms += [(zz(i, j), -1) for j in range(n) if j != i]
        model.add_constraint(f"cap_{i + 1}", terms, "<=", 0)
    for p, j in pairs:
        terms = [(f[(i, p)], 1) for i in g.adj[p]] + [(f[(p, i)], -1) for i in g.adj[p]]
        terms += [(x[p], -1), (x[j], -flow_m)]
        model.add_constraint(f"flow_{p + 1}_{j + 1}", terms, ">=", -flow_m)
    return model


def witness_assignment(g: Graph, members: Iterable[int], big_m: int = 1) -> dict[str, Fraction]:
    """Values of every model variable that encode the connected set ``members``.

    The flow ships one unit from the highest-index member to every other
    member along a BFS tree of the induced subgraph.
    """
    s = frozenset(members)
    if not is_connected_subset(g, s):
        raise GraphError("witness needs a connected set")
    n = g.n
    internal, external = edge_counts(g, s)
    touching = internal + external
    if touching == 0:
        raise GraphError("set touches no edge")
    u = Fraction(1, touching)
    if u > big_m:
        raise GraphError("big-M too small for this set")
    vals: dict[str, Fraction] = {"u": u}
    for i in range(n):
        vals[f"x_{i + 1}"] = Fraction(int(i in s))
    for i in range(n):
        for j in range(n):
            if i == j:
                continue
            both_in = int(i in s and j in s)
            both_out = int(i not in s and j not in s)
            if i < j:
                vals[f"z_{i + 1}_{j + 1}"] = Fraction(both_in)
                vals[f"w_{i + 1}_{j + 1}"] = Fraction(both_out)
            vals[f"h_{i + 1}_{j + 1}"] = u * both_in
            vals[f"l_{i + 1}_{j + 1}"] = u * both_out
    for i in range(n):
        for j in g.adj[i]:
            vals[f"f_{i + 1}_{j + 1}"] = Fraction(0)
    source = max(s)
    parent = {source: None}
    order = [source]
    queue = deque([source])
    while queue:
        a = queue.popleft()
        for b in g.adj[a]:
            if b in s and b not in parent:
                parent[b] = a
                order.append(b)
                queue.append(b)
    subtree = {v: 1 for v in s}
    for v in reversed(order):
        p = parent[v]
        if p is not None:
            subtree[p] += subtree[v]
            vals[f"f_{p + 1}_{v + 1}"] = Fraction(subtree[v])
    return vals


def _fmt_num(v: float) -> str:
    if isinstance(v, int) or (isinstance(v, float) and v.is_integer()):
        return str(int(v))
    return repr(float(v))


def _write_expr(out: TextIO, head: str, terms, tail: str = "") -> None:
    line = head
    if not terms:
        line += " 0"
    for var, coef in terms:
        tok = f" {'+' if coef >= 0 else '-'} {abs(coef)} {var}"
        if len(line) + len(tok) > 200:
            out.write(line + "\n")
            line = "   "
        line += tok
    if len(line) + len(tail) > 200:
        out.write(line + "\n")
        line = "   "
    out.write(line + tail + "\n")


def write_lp(model: MilpModel, sink: TextIO) -> None:
    """CPLEX-style LP text; output depends only on the model."""
    sink.write(f"\\ {model.name}\n")
    sink.write("Maximize\n")
    if model.objective:
        _write_expr(sink, " obj:", model.objective)
    elif model.variables:
        _write_expr(sink, " obj:", [(model.variables[0].name, 0)])
    else:
        sink.write(" obj:\n")
    sink.write("Subject To\n")
    for c in model.constraints:
        _write_expr(sink, f" {c.name}:", c.terms, f" {c.sense} {c.rhs}")
    bounds = [v for v in model.variables if v.kind == "continuous"]
    if bounds:
        sink.write("Bounds\n")
        for v in bounds:
            if v.upper == INF:
                sink.write(f" {v.name} >= {_fmt_num(v.lower)}\n")
            else:
                sink.write(f" {_fmt_num(v.lower)} <= {v.name} <= {_fmt_num(v.upper)}\n")
    binaries = [v.name for v in model.variables if v.kind == "binary"]
    if binaries:
        sink.write("Binaries\n")
        for name in binaries:
            sink.write(f" {name}\n")
    sink.write("End\n")


def parse_solution(text: str) -> dict[str, float]:
    """Read ``name value`` lines; anything else is ignored."""
    values: dict[str, float] = {}
    for line in text.splitlines():
        parts = line.split()
        if len(parts) != 2:
            continue
        try:
            values[parts[0]] = float(parts[1])
        except ValueError:
            continue
    return values


def decode_members(g: Graph, values: dict[str, float]) -> frozenset[int]:
    return frozenset(i for i in range(g.n) if values.get(f"x_{i + 1}", 0.0) > 0.5)


def solve_external(model: MilpModel, command: str, timeout: float | None = None) -> dict[str, float]:
    """Run a solver command on the exported model and read its solution.

    ``command`` may use ``{lp}`` and ``{sol}`` placeholders for the model and
    solution paths; the solver must write ``name value`` lines to ``{sol}``.
    """
    with tempfile.TemporaryDirectory(prefix="maxpersist-") as tmp:
        lp_path = os.path.join(tmp, "model.lp")
        sol_path = os.path.join(tmp, "model.sol")
        with open(lp_path, "w", encoding="ascii") as fh:
            write_lp(model, fh)
        argv = [a.format(lp=lp_path, sol=sol_path) for a in shlex.split(command)]
        subprocess.run(argv, check=True, timeout=timeout, capture_output=True)
        with open(sol_path, encoding="utf-8") as fh:
            return parse_solution(fh.read())
