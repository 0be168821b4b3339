import json
import math
import random
from itertools import combinations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import all_graphs, brute_cherries, brute_triangles
from sparsetri.graph import (
    EdgeListError,
    ErParams,
    Graph,
    edge_index,
    format_edgelist,
    parse_edgelist,
    sample_er,
    stats_json,
    subgraph_counts,
    toggle_edge,
    triangle_stats,
)


def test_er_params_validation():
    with pytest.raises(ValueError):
        ErParams(5, 5.0)
    with pytest.raises(ValueError):
        ErParams(5, -1.0)
    with pytest.raises(ValueError):
        ErParams.from_p(5, 1.5)
    assert ErParams(10, 2.0).p == pytest.approx(0.2)
    assert ErParams.eps(8) == pytest.approx(0.25)


def test_sample_er_zero_probability():
    assert sample_er(ErParams(5, 0.0), seed=1).num_edges == 0


def test_sample_er_forced_edges():
    assert sample_er(ErParams.from_p(3, 1.0), seed=1) == Graph.complete(3)


def test_sample_er_edge_count_binomial():
    params = ErParams(1000, 2.0)
    g = sample_er(params, seed=7)
    total = math.comb(1000, 2)
    mean = total * params.p
    sd = math.sqrt(total * params.p * (1 - params.p))
    assert abs(g.num_edges - mean) <= 4 * sd


def test_sample_er_deterministic_and_streams_differ():
    params = ErParams(200, 3.0)
    assert sample_er(params, 5) == sample_er(params, 5)
    assert sample_er(params, 5, stream=1) != sample_er(params, 5, stream=2)


def test_sample_er_pair_decoding_covers_all_pairs():
    g = sample_er(ErParams.from_p(9, 1.0), seed=0)
    assert g == Graph.complete(9)


def test_edge_index_is_lexicographic():
    pairs = list(combinations(range(7), 2))
    assert [edge_index(7, u, v) for u, v in pairs] == list(range(len(pairs)))
    assert edge_index(7, 5, 2) == edge_index(7, 2, 5)


@pytest.mark.parametrize(
    "g, t, vt",
    [
        (Graph.complete(3), 1, 3),
        (Graph(5, [(i, (i + 1) % 5) for i in range(5)]), 0, 0),
        (Graph(5, [e for e in combinations(range(5), 2) if e != (0, 1)]), 7, 5),
    ],
)
def test_triangle_stats_examples(g, t, vt):
    s = triangle_stats(g)
    assert (s.total, s.vt) == (t, vt)


def test_subgraph_counts_examples():
    assert subgraph_counts(Graph.complete(4)) == subgraph_counts(Graph(4, combinations(range(4), 2)))
    c = subgraph_counts(Graph.complete(4))
    assert (c.edges, c.cherries, c.triangles) == (6, 12, 4)
    c = subgraph_counts(Graph(5, [(0, i) for i in range(1, 5)]))
    assert (c.edges, c.cherries, c.triangles) == (4, 6, 0)


def test_subgraph_counts_against_brute_force_sample():
    g = sample_er(ErParams(50, 3.0), seed=1)
    c = subgraph_counts(g)
    t, _ = brute_triangles(g)
    assert c.triangles == t
    assert c.cherries == brute_cherries(g)
    assert c.edges == len(g.edges())


@pytest.mark.parametrize("n", [0, 1, 2, 3, 4, 5])
def test_all_small_graphs_against_brute_force(n):
    for g in all_graphs(n):
        s = triangle_stats(g)
        t, per = brute_triangles(g)
        assert s.total == t and s.per_vertex == per
        assert sum(s.per_vertex) == 3 * s.total
        assert s.vt == sum(1 for c in per if c)
        assert 6 * s.total <= (2 * g.num_edges) ** 1.5 + 1e-9
        assert g.num_edges >= s.vt
        assert 2 * g.num_edges == sum(g.degrees())


def test_toggle_twice_restores():
    g = sample_er(ErParams(30, 4.0), seed=3)
    before = triangle_stats(g)
    s = before.copy()
    toggle_edge(g, s, 0, 1)
    toggle_edge(g, s, 0, 1)
    assert s == before


def test_toggle_on_empty_graph():
    g = Graph(4)
    _, s = toggle_edge(g, triangle_stats(g), 0, 1)
    assert s.total == 0 and s.vt == 0 and g.has_edge(0, 1)


def test_toggle_random_walk_matches_recount():
    rnd = random.Random(11)
    g = sample_er(ErParams(30, 6.0), seed=2)
    s = triangle_stats(g)
    for _ in range(200):
        u, v = rnd.sample(range(30), 2)
        toggle_edge(g, s, u, v)
    assert s == triangle_stats(g)


def test_toggle_rejects_self_loop():
    g = Graph(3)
    with pytest.raises(ValueError):
        toggle_edge(g, triangle_stats(g), 1, 1)


def test_degenerate_graphs():
    for n in (0, 1):
        s = triangle_stats(Graph(n))
        assert (s.total, s.vt) == (0, 0)


def test_edgelist_round_trip():
    g = sample_er(ErParams(40, 3.0), seed=9)
    assert parse_edgelist(format_edgelist(g)) == g


@given(st.integers(2, 12).flatmap(lambda n: st.tuples(st.just(n), st.sets(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1))))))
@settings(max_examples=60, deadline=None)
def test_edgelist_round_trip_property(data):
    n, pairs = data
    g = Graph(n, {(min(a, b), max(a, b)) for a, b in pairs if a != b})
    text = format_edgelist(g)
    assert parse_edgelist(text) == g
    lines = text.splitlines()[1:]
    assert lines == sorted(lines, key=lambda ln: tuple(map(int, ln.split())))


@pytest.mark.parametrize(
    "text, line",
    [
        ("3 1\n0 0\n", 2),
        ("3 2\n0 1\n1 0\n", 3),
        ("3 1\n0 a\n", 2),
        ("3 1\n-1 2\n", 2),
        ("3 1\n0 1 2\n", 2),
        ("x 1\n0 1\n", 1),
    ],
)
def test_edgelist_errors_carry_line(text, line):
    with pytest.raises(EdgeListError) as exc:
        parse_edgelist(text)
    assert exc.value.line == line


def test_edgelist_count_mismatch():
    with pytest.raises(EdgeListError):
        parse_edgelist("3 2\n0 1\n")


def test_edgelist_relabels_sparse_labels():
    g = parse_edgelist("3 2\n10 20\n20 30\n")
    assert g.edges() == [(0, 1), (1, 2)]


def test_stats_json():
    d = json.loads(stats_json(Graph.complete(4)))
    assert d == {"n": 4, "edges": 6, "triangles": 4, "vt": 4}
