"""Expected triangle count of G(n, p) conditioned on containing a planted graph G.

A triple of [n] that already carries j edges of G is a triangle with
probability p^(3-j), so E_G(T) = a3 + a2 p + a1 p^2 + a0 p^3 where a_j counts
triples with exactly j planted edges.  The a_j follow from edge, cherry and
triangle counts of G alone.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .enumeration import mask_stats, sample_masks
from .graph import ErParams, Graph, sample_er, subgraph_counts, triangle_stats
from .rng import make_rng


@dataclass(frozen=True)
class TripleProfile:
    a0: int
    a1: int
    a2: int
    a3: int

    def expectation(self, p: float) -> float:
        return self.a3 + p * (self.a2 + p * (self.a1 + p * self.a0))


def _check_fits(g: Graph, n: int) -> None:
    active = g.active_vertices()
    if active and active[-1] >= n:
        raise ValueError(f"planted graph uses vertex {active[-1]} but ambient n={n}")


def triple_profile(g: Graph, n: int) -> TripleProfile:
    _check_fits(g, n)
    c = subgraph_counts(g)
    a3 = c.triangles
    a2 = c.cherries - 3 * c.triangles
    a1 = c.edges * (n - 2) - 2 * c.cherries + 3 * c.triangles
    a0 = math.comb(n, 3) - a1 - a2 - a3
    return TripleProfile(a0, a1, a2, a3)


def expected_triangles_conditional(g: Graph, params: ErParams) -> float:
    """E_G(T) for G(n, p) conditioned on containing ``g``."""
    return triple_profile(g, params.n).expectation(params.p)


def expectation_upper_bound(g: Graph, params: ErParams) -> float:
    """N(K_{1,2},G) p + e_G n p^2 + N(K_3,G) + lambda^3/6, an upper bound on E_G(T)."""
    c = subgraph_counts(g)
    n, p = params.n, params.p
    lam = n * p
    return c.cherries * p + c.edges * n * p * p + c.triangles + lam**3 / 6.0


def edge_drop(g: Graph, n: int, p: float, u: int, v: int) -> float:
    """E_G(T) - E_{G - uv}(T) for an edge uv of g.

    Only triples {u, v, w} change: with j = [uw] + [vw] such a triple moves
    from profile class j+1 to j, contributing p^(2-j) (1 - p).
    """
    au, av = g.adj[u], g.adj[v]
    both = len(au & av)
    one = len(au) + len(av) - 2 - 2 * both
    none = n - 2 - both - one
    return (1.0 - p) * (both + p * (one + p * none))


def mc_conditional_expectation(
    g: Graph, params: ErParams, samples: int, seed: int
) -> tuple[float, float]:
    """Monte Carlo mean and standard error of T(G(n,p) + g)."""
    if samples < 1:
        raise ValueError("samples must be >= 1")
    n, p = params.n, params.p
    _check_fits(g, n)
    rng = make_rng(seed, "conditional-mc")
    if n * (n - 1) // 2 <= 64:
        planted = np.uint64(Graph(n, g.edges()).to_mask())
        t = np.empty(samples, dtype=np.int64)
        chunk = 1 << 16
        for start in range(0, samples, chunk):
            size = min(chunk, samples - start)
            masks = sample_masks(n, p, size, rng) | planted
            t[start : start + size] = mask_stats(masks, n)[1]
    else:
        t = np.empty(samples, dtype=np.int64)
        sub_seed = int(rng.integers(2**63))
        for i in range(samples):
            h = sample_er(params, sub_seed, stream=i)
            for a, b in g.edges():
                h.add_edge(a, b)
            t[i] = triangle_stats(h).total
    mean = float(t.mean())
    if samples == 1:
        return mean, float("nan")
    return mean, float(t.std(ddof=1) / math.sqrt(samples))
