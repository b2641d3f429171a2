import random
import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from maxpersist import karate_path, read_edge_list  # noqa: E402
from maxpersist.graph import Graph  # noqa: E402
from oracles import random_connected_edges  # noqa: E402

KARATE_19 = [3, 9, 10, 15, 16, 19, 21, 23, 24, 25, 26, 27, 28, 29, 30, 31, 32, 33, 34]
KARATE_5 = [5, 6, 7, 11, 17]


@pytest.fixture(scope="session")
def karate() -> Graph:
    return read_edge_list(karate_path())


def random_graph(n: int, p: float, seed: int) -> Graph:
    return Graph.from_edges(random_connected_edges(n, p, random.Random(seed)), n)


@pytest.fixture
def small_graphs():
    return [random_graph(random.Random(s).randint(4, 10), 0.3, s) for s in range(30)]


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per criterion and assert on it."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(number: int, ok: bool, detail: str) -> None:
        line = f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}"
        lines.append(line)
        print(line)
        assert ok, line

    return report


def pytest_terminal_summary(terminalreporter, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines):
            terminalreporter.write_line(line)
