import math
from itertools import combinations

import numpy as np
import pytest

from conftest import all_graphs
from sparsetri.graph import ErParams, Graph, sample_er, triangle_stats
from sparsetri.tails import (
    ConditioningFailure,
    clique_lower_bound,
    conditioned_sample,
    conditioned_samples,
    count_cliques,
    disjoint_triangles_lower_bound,
    exact_tail,
    is_clique_tail,
    mc_tail,
    smallest_clique_order,
    vt_implied_constant,
)


def brute_tail(n, p, stat, k):
    m = n * (n - 1) // 2
    total = 0.0
    for g in all_graphs(n):
        s = triangle_stats(g)
        if (s.total if stat == "T" else s.vt) >= k:
            total += p**g.num_edges * (1 - p) ** (m - g.num_edges)
    return total


def test_exact_k_zero():
    assert exact_tail(6, 0.2, "T", 0).log_value == 0.0


def test_exact_single_triangle():
    p = 0.3
    assert exact_tail(3, p, "T", 1).value == pytest.approx(p**3, rel=1e-14)


def test_exact_inclusion_exclusion_n4():
    p = 0.5
    tris = [frozenset(combinations(t, 2)) for t in combinations(range(4), 3)]
    total = 0.0
    for r in range(1, 5):
        for sub in combinations(tris, r):
            total += (-1) ** (r + 1) * p ** len(frozenset().union(*sub))
    assert exact_tail(4, p, "T", 1).value == pytest.approx(total, rel=1e-14)


@pytest.mark.parametrize("stat", ["T", "VT"])
@pytest.mark.parametrize("k", [1, 2, 3, 4, 5])
def test_exact_against_brute_force_n5(stat, k):
    assert exact_tail(5, 0.35, stat, k).value == pytest.approx(brute_tail(5, 0.35, stat, k), rel=1e-12)


def test_exact_beyond_range_is_zero():
    assert exact_tail(5, 0.3, "VT", 6).log_value == -math.inf


def test_exact_monotone_in_k_and_p():
    ps = np.linspace(0.05, 0.95, 10)
    for stat, top in (("T", 35), ("VT", 7)):
        prev_k = None
        for k in range(top + 1):
            vals = [exact_tail(7, p, stat, k).log_value for p in ps]
            assert all(b >= a - 1e-12 for a, b in zip(vals, vals[1:]))
            if prev_k is not None:
                assert all(v <= w + 1e-12 for v, w in zip(vals, prev_k))
            prev_k = vals


def test_exact_cap():
    with pytest.raises(ValueError):
        exact_tail(9, 0.1, "T", 1)
    with pytest.raises(ValueError):
        exact_tail(8, 0.1, "T", 1)


def test_mc_certain_event():
    assert mc_tail(5, 1.0, "T", 1, 200, 0).log_value == 0.0


def test_mc_deterministic():
    a = mc_tail(7, 1.5 / 7, "T", 2, 20_000, seed=3)
    b = mc_tail(7, 1.5 / 7, "T", 2, 20_000, seed=3)
    assert a == b


@pytest.mark.parametrize("stat, k", [("T", 1), ("T", 2), ("VT", 3)])
def test_mc_matches_exact(stat, k):
    p = 1.5 / 7
    est = mc_tail(7, p, stat, k, 100_000, seed=11)
    assert abs(est.value - exact_tail(7, p, stat, k).value) <= 3 * est.stderr


def test_mc_graph_path():
    p = 0.3
    est = mc_tail(12, p, "T", 1, 400, seed=1)
    assert 0 < est.value <= 1 and est.stderr > 0


def test_mc_zero_hits_flagged():
    est = mc_tail(7, 0.01, "T", 20, 1000, seed=0)
    assert est.flags
    assert est.log_value == pytest.approx(math.log1p(-(0.05 ** (1 / 1000))))


def test_mc_needs_samples():
    with pytest.raises(ValueError):
        mc_tail(7, 0.1, "T", 1, 10, 0)


def test_count_cliques_brute_force():
    g = sample_er(ErParams(12, 7.0), seed=5)
    for r in (1, 2, 3, 4, 5):
        brute = sum(1 for s in combinations(range(12), r) if all(g.has_edge(u, v) for u, v in combinations(s, 2)))
        assert count_cliques(g, r) == brute


def test_is_clique_below_exact():
    p = 1.5 / 7
    for k in (1, 4, 10, 20, 25):
        r = min(6, smallest_clique_order(k))
        est = is_clique_tail(7, p, k, r, 50_000, seed=2)
        assert est.is_lower_bound
        assert est.value <= exact_tail(7, p, "T", k).value + 3 * est.stderr


def test_is_clique_r3_weight_identity():
    # With r = 3 and k = 1 the weight is C(n,3) p^3 / T(g), and E[weight] = P(T >= 1).
    p = 0.25
    est = is_clique_tail(6, p, 1, 3, 100_000, seed=4)
    assert abs(est.value - exact_tail(6, p, "T", 1).value) <= 3 * est.stderr


def test_is_clique_graph_path_runs():
    est = is_clique_tail(12, 0.2, 4, 4, 300, seed=1)
    assert est.is_lower_bound and est.value > 0


def test_is_clique_rejects_large_r():
    with pytest.raises(ValueError):
        is_clique_tail(10, 0.2, 40, 7, 10, 0)
    with pytest.raises(ValueError):
        is_clique_tail(5, 0.2, 1, 6, 10, 0)


def test_clique_lower_bound_examples():
    p = 0.1
    assert clique_lower_bound(10, p, 1).log_value == pytest.approx(3 * math.log(p))
    assert clique_lower_bound(10, p, 4).log_value == pytest.approx(6 * math.log(p))
    with pytest.raises(ValueError):
        clique_lower_bound(5, p, 11)


def test_clique_lower_bound_below_exact():
    p = 1.5 / 7
    for k in range(36):
        assert clique_lower_bound(7, p, k).log_value <= exact_tail(7, p, "T", k).log_value


def test_disjoint_triangles_k3_simplifies():
    n, lam = 20, 1.0
    p = lam / n
    got = disjoint_triangles_lower_bound(n, p, 3, lam).log_value
    want = math.log(math.comb(n, 3)) + 3 * math.log(p) + 3 * (n - 3) * math.log1p(-p) + math.log(0.9) - lam**3 / 6
    assert got == pytest.approx(want)


@pytest.mark.parametrize("n,lam", [(60, 1.5), (200, 1.0), (200, 3.0)])
def test_disjoint_triangles_monotone_in_k(n, lam):
    vals = [disjoint_triangles_lower_bound(n, lam / n, k, lam).log_value for k in range(3, n + 1, 3)]
    assert all(b < a for a, b in zip(vals, vals[1:]))


def test_disjoint_triangles_report_only_at_n7():
    lam = 1.5
    lb = disjoint_triangles_lower_bound(7, lam / 7, 3, lam)
    assert lb.flags and lb.is_lower_bound and lb.log_value <= 0
    assert math.isfinite(exact_tail(7, lam / 7, "VT", 3).log_value)


def test_disjoint_triangles_validation():
    with pytest.raises(ValueError):
        disjoint_triangles_lower_bound(10, 0.1, 4, 1.0)


def test_vt_implied_constant():
    c = vt_implied_constant(7, 1.5 / 7, 6)
    assert math.isfinite(c) and c >= 0


def test_conditioned_k_zero_first_try():
    s = conditioned_sample(50, 0.04, "T", 0, seed=3)
    assert s.tries == 1


def test_conditioned_samples_satisfy_event():
    graphs, tries = conditioned_samples(60, 2 / 60, "T", 2, 5, seed=1)
    assert len(graphs) == 5 and tries >= 5
    assert all(triangle_stats(g).total >= 2 for g in graphs)
    graphs, _ = conditioned_samples(60, 2 / 60, "VT", 3, 3, seed=1)
    assert all(triangle_stats(g).vt >= 3 for g in graphs)


def test_conditioned_failure_reports_tries():
    with pytest.raises(ConditioningFailure) as exc:
        conditioned_sample(30, 0.01, "T", 50, seed=0, max_tries=20)
    assert exc.value.tries == 20
