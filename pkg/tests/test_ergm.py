import math

import numpy as np
import pytest

from sparsetri.enumeration import graph_table
from sparsetri.ergm import (
    ErgmConfig,
    batch_means_stderr,
    ergm_exact_log_partition,
    ergm_exact_mean_vt,
    ergm_exact_vt_distribution,
    ergm_mcmc,
    ergm_sweep,
    partition_scaling,
)
from sparsetri.graph import triangle_stats


def test_partition_beta_zero():
    assert ergm_exact_log_partition(6, 1.0, 0.0) == 0.0


def test_partition_n3():
    assert math.exp(ergm_exact_log_partition(3, 1.0, 1.0)) == pytest.approx(53 / 27, rel=1e-14)


@pytest.mark.parametrize("n", [4, 5, 6])
def test_partition_convex_nondecreasing_and_jensen(n):
    grid = np.linspace(0, 1, 11)
    vals = np.array([ergm_exact_log_partition(n, 1.0, b) for b in grid])
    assert np.all(np.diff(vals) >= -1e-12)
    assert np.all(np.diff(vals, 2) >= -1e-12)
    mean0 = ergm_exact_mean_vt(n, 1.0, 0.0)
    for b, v in zip(grid, vals):
        assert v >= b * math.log(n) * mean0 - 1e-12


def test_distribution_normalised():
    d = ergm_exact_vt_distribution(6, 1.0, 0.7)
    assert d.sum() == pytest.approx(1.0) and d[1] == 0 and d[2] == 0


@pytest.mark.parametrize("beta, want", [(1 / 3, 0.0), (0.0, 0.0), (1.0, 2 / 3), (0.2, 0.0)])
def test_partition_scaling(beta, want):
    assert partition_scaling(beta) == pytest.approx(want)


def test_partition_scaling_rejects_negative():
    with pytest.raises(ValueError):
        partition_scaling(-0.1)


def test_config_validation():
    with pytest.raises(ValueError):
        ErgmConfig(10, 10.0, 0.5, 100)
    with pytest.raises(ValueError):
        ErgmConfig(10, 1.0, 0.5, 100, burn_in=100)
    with pytest.raises(ValueError):
        ErgmConfig(10, 1.0, 0.5, 100, thin=0)
    with pytest.raises(ValueError):
        ErgmConfig(20, 1.0, 0.5, 100, record_states=True)


def test_beta_zero_edge_density():
    n, lam = 12, 3.0
    cfg = ErgmConfig(n, lam, 0.0, 2_000_000, 100_000, 50, seed=2)
    tr = ergm_mcmc(cfg)
    m = n * (n - 1) // 2
    dens = tr.edges / m
    assert abs(dens.mean() - lam / n) <= 3 * batch_means_stderr(dens)
    assert np.all((tr.vt >= 0) & (tr.vt <= n))


def test_final_graph_consistent():
    tr = ergm_mcmc(ErgmConfig(15, 2.0, 0.6, 300_000, 0, 10, seed=5, check_every=1000))
    s = triangle_stats(tr.final_graph)
    assert s.vt <= 15
    assert tr.checks == 300


def test_deterministic():
    cfg = ErgmConfig(20, 1.0, 0.5, 200_000, 1000, 10, seed=9)
    a, b = ergm_mcmc(cfg), ergm_mcmc(cfg)
    assert np.array_equal(a.vt, b.vt) and a.acceptance == b.acceptance


def test_detailed_balance_n4():
    n, lam, beta = 4, 1.5, 0.8
    steps = 2_000_000
    tr = ergm_mcmc(ErgmConfig(n, lam, beta, steps, 0, 1, seed=1, record_states=True))
    tab = graph_table(n)
    p = lam / n
    m = 6
    logw = tab.edges * math.log(p) + (m - tab.edges) * math.log1p(-p) + beta * math.log(n) * tab.vt
    pi = np.exp(logw - logw.max())
    pi /= pi.sum()
    s = tr.states
    freq = np.bincount(s, minlength=64) / s.size
    # Generous effective sample size for correlated draws.
    neff = s.size / 20
    assert np.all(np.abs(freq - pi) <= 5 * np.sqrt(pi * (1 - pi) / neff) + 1e-4)
    flows = np.zeros((64, 64), dtype=np.int64)
    np.add.at(flows, (s[:-1], s[1:]), 1)
    sym = flows + flows.T
    diff = np.abs(flows - flows.T)
    assert np.all(diff <= 5 * np.sqrt(sym) + 5)


def test_mcmc_matches_exact_mean_small():
    n, lam, beta = 6, 1.0, 0.5
    tr = ergm_mcmc(ErgmConfig(n, lam, beta, 2_000_000, 100_000, 10, seed=3))
    exact = ergm_exact_mean_vt(n, lam, beta)
    assert abs(tr.mean_vt - exact) <= 3 * tr.stderr_vt()


def test_batch_means_iid():
    x = np.random.default_rng(0).normal(size=100_000)
    assert batch_means_stderr(x) == pytest.approx(1 / math.sqrt(x.size), rel=0.3)
    with pytest.raises(ValueError):
        batch_means_stderr(np.ones(10))


def test_sweep_rows_and_warning():
    rows = ergm_sweep(20, 1.0, [0.1, 0.9], 100_000, thin=10, seed=1, tolerance=-1.0)
    assert len(rows) == 2
    assert all(r.mixing_warning for r in rows)
    rows = ergm_sweep(20, 1.0, [0.1], 100_000, thin=10, seed=1)
    assert len(rows) == 1 and 0 <= rows[0].mean <= 1
    with pytest.raises(ValueError):
        ergm_sweep(20, 1.0, [], 1000)
