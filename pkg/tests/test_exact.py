import random
from fractions import Fraction
from math import comb

from hypothesis import given, settings
from hypothesis import strategies as st

from maxpersist.exact import enumerate_connected_subsets, exact_max_persistence, exact_search
from maxpersist.graph import Graph, parse_edge_list

from conftest import KARATE_5, random_graph
from oracles import bitmask_connected_subsets, brute_force_best, complete_graph_alpha


def _all(g, k):
    out = list(enumerate_connected_subsets(g, k))
    assert len(out) == len(set(out)), "duplicate subset"
    return set(out)


def test_path_pairs():
    g = parse_edge_list("1 2\n2 3\n3 4")
    assert {frozenset(g.label_values(s)) for s in _all(g, 2)} == {
        frozenset({1, 2}), frozenset({2, 3}), frozenset({3, 4})}


def test_k4_triples():
    g = Graph.from_edges([(i, j) for i in range(4) for j in range(i + 1, 4)])
    assert len(_all(g, 3)) == 4


def test_karate_five_matches_bitmask_oracle(karate):
    ours = _all(karate, 5)
    assert ours == set(bitmask_connected_subsets(karate.n, karate.edges(), 5))


def test_karate_exact_five(karate):
    sol, count = exact_search(karate, 5)
    assert sol.alpha == Fraction(3, 5)
    assert karate.label_values(sol.members) == KARATE_5
    assert count == len(_all(karate, 5))


@settings(max_examples=60, deadline=None)
@given(st.integers(2, 11), st.floats(0, 0.6), st.integers(0, 10**6))
def test_enumeration_matches_bitmask(n, p, seed):
    g = random_graph(n, p, seed)
    for k in range(1, n + 1):
        assert _all(g, k) == set(bitmask_connected_subsets(n, g.edges(), k))


def test_complete_graph_closed_form():
    for n in range(3, 9):
        g = Graph.from_edges([(i, j) for i in range(n) for j in range(i + 1, n)], n)
        for k in range(2, n):
            assert exact_max_persistence(g, k).alpha == complete_graph_alpha(n, k)
            assert len(_all(g, k)) == comb(n, k)


def test_star_pairs():
    for n in range(3, 9):
        g = Graph.from_edges([(0, i) for i in range(1, n)], n)
        assert exact_max_persistence(g, 2).alpha == Fraction(1, n - 1)


def test_exact_equals_bruteforce_on_random_graphs():
    rng = random.Random(1)
    for _ in range(40):
        n = rng.randint(4, 10)
        g = random_graph(n, 0.3, rng.randrange(10**6))
        for k in range(2, n):
            assert exact_max_persistence(g, k).alpha == brute_force_best(n, g.edges(), k)


def test_tie_break_smallest_sorted_members():
    g = Graph.from_edges([(i, (i + 1) % 6) for i in range(6)], 6)
    assert exact_max_persistence(g, 3).sorted_members() == (0, 1, 2)
