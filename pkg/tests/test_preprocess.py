import pytest

from expander_routing.errors import CallerError
from expander_routing.expanders import gen_random_regular_digraph, gen_random_regular_graph
from expander_routing.graph import Digraph, UndirectedGraph, format_graph
from expander_routing.matching import maximum_matching, perfect_matching_edges
from expander_routing.preprocess import (
    eulerian_orient,
    extract_perfect_matching,
    pre_process,
    split_regular,
)
from expander_routing.profiles import derive_profile


def relaxed_profile(n, d):
    return derive_profile(n, d, "1/10", "1/50", relaxed=True)


# --- Eulerian orientation -------------------------------------------------


def test_orient_four_cycle():
    g = UndirectedGraph(4, [(0, 1), (1, 2), (2, 3), (3, 0)])
    d = eulerian_orient(g)
    assert d.regularity() == 1
    assert sorted(abs(t - h) % 2 for t, h in d.edges()) == [1, 1, 1, 1]


def test_orient_k5_balances():
    edges = [(i, j) for i in range(5) for j in range(i + 1, 5)]
    d = eulerian_orient(UndirectedGraph(5, edges))
    assert d.regularity() == 2
    assert d.m == 10


def test_orient_rejects_odd_degree():
    with pytest.raises(CallerError):
        eulerian_orient(UndirectedGraph(3, [(0, 1), (1, 2)]))


def test_orient_rejects_disconnected():
    two_triangles = UndirectedGraph(
        6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]
    )
    with pytest.raises(CallerError):
        eulerian_orient(two_triangles)


def test_orient_preserves_edge_ids():
    g = gen_random_regular_graph(30, 6, seed=1)
    d = eulerian_orient(g)
    assert d.m == g.m
    for e in range(g.m):
        assert set(d.endpoints(e)) == set(g.endpoints(e))
    assert d.regularity() == 3


# --- matchings --------------------------------------------------------------


def test_matching_single_edge():
    g = UndirectedGraph(2, [(0, 1)])
    matched, rest = extract_perfect_matching(g)
    assert matched == [0]
    assert rest.m == 0


def test_matching_k4(k4):
    matched, rest = extract_perfect_matching(k4)
    assert len(matched) == 2
    assert rest.regularity() == 2
    assert rest.m == 4


def test_matching_odd_cycle_is_not_perfect():
    c5 = UndirectedGraph(5, [(i, (i + 1) % 5) for i in range(5)])
    match = maximum_matching(5, [[(i + 1) % 5, (i - 1) % 5] for i in range(5)])
    assert sum(1 for v in range(5) if match[v] != -1) == 4
    with pytest.raises(CallerError):
        perfect_matching_edges(c5)


def test_matching_blossom_structure():
    # triangle with a tail forces contraction before the augmenting path shows
    g = UndirectedGraph(4, [(0, 1), (1, 2), (2, 0), (2, 3)])
    matched = perfect_matching_edges(g)
    assert len(matched) == 2
    covered = sorted(v for e in matched for v in g.endpoints(e))
    assert covered == [0, 1, 2, 3]


def test_matching_random_regular():
    g = gen_random_regular_graph(50, 5, seed=7)
    matched, rest = extract_perfect_matching(g)
    assert len(matched) == 25
    covered = sorted(v for e in matched for v in g.endpoints(e))
    assert covered == list(range(50))
    assert rest.regularity() == 4


# --- regular splitting -------------------------------------------------------


def test_split_triangle_identity(triangle):
    ((sub, ids),) = split_regular(triangle, 1, [1])
    assert sub.edges() == triangle.edges()
    assert ids == (0, 1, 2)


def test_split_two_hamilton_cycles():
    edges = [(i, (i + 1) % 6) for i in range(6)] + [(i, (i + 2) % 6) for i in range(6)]
    d = Digraph(6, edges)
    assert d.regularity() == 2
    (s1, ids1), (s2, ids2) = split_regular(d, 2, [1, 1])
    assert s1.regularity() == 1
    assert s2.regularity() == 1
    assert sorted(ids1 + ids2) == list(range(12))


def test_split_ten_regular_with_remainder():
    d = gen_random_regular_digraph(40, 10, seed=11)
    (s1, ids1), (s2, ids2), (rest, ids3) = split_regular(d, 10, [1, 1])
    assert s1.regularity() == 1
    assert s2.regularity() == 1
    assert rest.regularity() == 8
    assert sorted(ids1 + ids2 + ids3) == list(range(d.m))


def test_split_rejects_oversubscription(triangle):
    with pytest.raises(CallerError):
        split_regular(triangle, 1, [1, 1])


# --- full preprocessing -------------------------------------------------------


def test_preprocess_even_degree():
    g = gen_random_regular_graph(100, 20, seed=2)
    split = pre_process(g, relaxed_profile(100, 20))
    assert split.k == 10
    assert split.d_prime == 1
    assert split.g1.regularity() == 1
    assert split.g2.regularity() == 1
    assert split.g3.regularity() == 8
    assert split.host.regularity() == 10


def test_preprocess_odd_degree():
    g = gen_random_regular_graph(100, 21, seed=3)
    split = pre_process(g, relaxed_profile(100, 21))
    assert split.k == 10
    assert split.g1.regularity() == 1
    assert split.g3.regularity() == 8


def test_preprocess_edge_conservation():
    g = gen_random_regular_graph(60, 20, seed=5)
    split = pre_process(g, relaxed_profile(60, 20))
    ids = sorted(split.g1_host + split.g2_host + split.g3_host)
    assert ids == list(range(split.host.m))


def test_preprocess_rejects_small_degree():
    g = gen_random_regular_graph(20, 8, seed=1)
    with pytest.raises(CallerError):
        pre_process(g)


def test_preprocess_deterministic():
    def run():
        g = gen_random_regular_graph(60, 20, seed=9)
        split = pre_process(g, relaxed_profile(60, 20))
        return "".join(
            format_graph(x) for x in (split.host, split.g1, split.g2, split.g3)
        )

    assert run() == run()
