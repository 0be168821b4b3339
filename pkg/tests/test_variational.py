import math

import pytest

from sparsetri.conditional import expected_triangles_conditional
from sparsetri.graph import ErParams, subgraph_counts
from sparsetri.variational import (
    PhiQuery,
    clique_upper_bound,
    core_threshold,
    correction_terms,
    edge_lower_bound,
    phi_exact,
    rate_triangles,
    rate_vt,
)


def test_query_validation():
    with pytest.raises(ValueError):
        PhiQuery(10, 1.0, 5, 1)
    with pytest.raises(ValueError):
        PhiQuery(10, 0.1, 0.5, 1)
    with pytest.raises(ValueError):
        PhiQuery(10, 0.1, 5, 0)


def test_clique_upper_arithmetic():
    res = clique_upper_bound(PhiQuery(100, 0.01, 36, 1))
    assert res.value == pytest.approx(0.5 * 36 * math.log(100))
    assert res.value == pytest.approx(82.89306334778566)


def test_clique_witness_enlarged_when_rounded_clique_falls_short():
    q = PhiQuery(10, 0.2, 4.5, 1)
    res = clique_upper_bound(q)
    assert res.witness is not None and res.witness.num_edges == 6
    assert any("enlarged" in f for f in res.flags)
    assert expected_triangles_conditional(res.witness, ErParams.from_p(10, 0.2)) >= 4.5


def test_clique_witness_absent_when_it_does_not_fit():
    res = clique_upper_bound(PhiQuery(4, 0.5, 4.5, 1))
    assert res.witness is None and res.flags


def test_perturbation_homogeneity():
    a = clique_upper_bound(PhiQuery(100, 0.01, 36, 1, 0.0)).value
    b = clique_upper_bound(PhiQuery(100, 0.01, 36, 1, 0.1)).value
    assert b / a == pytest.approx(1.1 ** (2 / 3))


def test_edge_lower_examples():
    q = PhiQuery(100, 0.01, 36, 1)
    assert edge_lower_bound(q).value == pytest.approx(clique_upper_bound(q).value)
    assert edge_lower_bound(PhiQuery(100, 0.01, 36, 1, 1.0)).value == 0.0
    got = edge_lower_bound(PhiQuery(100, 0.02, 100, 2, 0.1)).value
    assert got == pytest.approx(0.5 * (6 * 2 * 0.9 * 100) ** (2 / 3) * math.log(50))
    with pytest.raises(ValueError):
        edge_lower_bound(PhiQuery(100, 0.02, 100, 2, 1.5))


def test_scaling_k_by_cube_scales_bounds_by_square():
    c = 2.0
    for f in (clique_upper_bound, edge_lower_bound):
        v1 = f(PhiQuery(1000, 0.01, 10, 1, 0.05)).value
        v2 = f(PhiQuery(1000, 0.01, 10 * c**3, 1, 0.05)).value
        assert v2 / v1 == pytest.approx(c**2)


def test_phi_exact_trivial_target():
    res = phi_exact(5, 0.5, 1, 1.0)  # E of the empty graph is 10/8 >= 1
    assert res.value == 0.0 and res.witness.num_edges == 0


def test_phi_exact_k4():
    res = phi_exact(4, 0.5, 4, 1.0)
    assert res.value == pytest.approx(6 * math.log(2))
    assert res.witness.num_edges == 6


def test_phi_exact_infeasible():
    res = phi_exact(4, 0.5, 5, 1.0)
    assert not res.feasible and math.isinf(res.value)


def test_phi_exact_cap():
    with pytest.raises(ValueError):
        phi_exact(7, 0.5, 1, 1.0)


@pytest.mark.parametrize("n, p, k", [(5, 0.2, 2), (6, 0.1, 4), (6, 0.3, 6), (6, 0.05, 10)])
def test_phi_exact_vs_clique_and_witness(n, p, k):
    res = phi_exact(n, p, k, 1.0)
    assert res.feasible
    ex = expected_triangles_conditional(res.witness, ErParams.from_p(n, p))
    assert ex >= k
    assert res.value == pytest.approx(res.witness.num_edges * -math.log(p))
    up = clique_upper_bound(PhiQuery(n, p, k, 1.0))
    if up.witness is not None:
        assert res.value <= up.witness.num_edges * -math.log(p) + 1e-9
        assert res.value <= up.value + 1e-9 or up.flags


def test_phi_exact_witness_edge_count_bound():
    # Witness triangles T satisfy e >= (6T)^(2/3) / 2.
    for k in (1.5, 3, 5, 8):
        res = phi_exact(6, 0.1, k, 1.0)
        c = subgraph_counts(res.witness)
        assert c.edges >= 0.5 * (6 * c.triangles) ** (2 / 3) - 1e-9


def test_correction_terms():
    assert correction_terms(100, 0.01, 8, 1, 0.1).eps_n == pytest.approx(0.25)
    assert core_threshold(1e-3, 1e6, 1, 0.1, C=1) == pytest.approx(1 / math.log(1000))
    assert core_threshold(1e-3, 1e6, 1, 0.1, C=1) == pytest.approx(0.14476482730108395)
    with pytest.raises(ValueError):
        correction_terms(100, 0.01, 8, 1, 0.0)


def test_psi_limit_large_k():
    p, w, Cp = 1e-3, 0.1, 6.0
    lp = -math.log(p)
    limit = math.log(Cp * w**-5 * lp**3) / lp
    psi = correction_terms(10**4, p, 1e30, 1, w, C_prime=Cp).psi_n
    assert psi == pytest.approx(limit, rel=1e-6)


def test_xi_and_core_exponent():
    ct = correction_terms(1000, 0.001, 27, 1, 0.2, C=6, C_prime=6, m=50)
    lp = math.log(1000)
    assert ct.log_xi_n == pytest.approx((0.5 * 6 ** (2 / 3) - 2) * 9 * lp)
    t = 0.04 * 3 / (6 * lp)
    assert ct.t_n == pytest.approx(t)
    assert ct.Psi_n == pytest.approx((6 / t * math.log(1000) + math.log(6 * 50 / t**2)) / lp)


def test_rates():
    assert rate_triangles(36, 0.01) == pytest.approx(82.89306334778566)
    assert rate_vt(3) == 0.0
    assert rate_vt(3 * math.e) == pytest.approx(math.e)
