"""The triangle variational problem

    Phi_{n,p,k}(a) = min { e_G log(1/p) : G subset of K_n, E_G(T) >= a k },

its clique upper bound and edge-count lower bound, an exact solver by edge
subset enumeration for n <= 6 (7 on request), and the closed-form rate and
correction terms that appear in the upper-tail bounds.

All values are in natural-log units.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np

from .conditional import expected_triangles_conditional
from .enumeration import graph_table
from .graph import ErParams, Graph

PHI_EXACT_CAP = 6

# Free constants of the upper-tail argument; the defaults carry no meaning.
DEFAULT_C = 6.0
DEFAULT_C_PRIME = 6.0


@dataclass(frozen=True)
class PhiQuery:
    n: int
    p: float
    k: float
    a: float
    w: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.p < 1.0):
            raise ValueError(f"p must lie in (0, 1), got {self.p}")
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")
        if self.a <= 0:
            raise ValueError(f"a must be positive, got {self.a}")
        if self.w < 0:
            raise ValueError(f"w must be non-negative, got {self.w}")
        if self.n < 1:
            raise ValueError("n must be positive")

    @property
    def target(self) -> float:
        return self.a * self.k

    @property
    def log_inv_p(self) -> float:
        return -math.log(self.p)

    def er(self) -> ErParams:
        return ErParams.from_p(self.n, self.p)


@dataclass
class PhiResult:
    value: float
    method: str
    witness: Graph | None = None
    feasible: bool = True
    flags: list[str] = field(default_factory=list)

    @property
    def edges(self) -> int | None:
        return None if self.witness is None else self.witness.num_edges


def _clique_on(r: int, n: int) -> Graph:
    return Graph(n, combinations(range(r), 2))


def clique_upper_bound(q: PhiQuery) -> PhiResult:
    """Upper bound 1/2 (6a(1+w)k)^(2/3) log(1/p) with an explicit clique witness.

    The witness starts at r = ceil((6a(1+w)k)^(1/3)) and is enlarged until
    E_{K_r}(T) >= a k, since at finite n the rounded clique may fall short.
    """
    base = 6.0 * q.a * (1.0 + q.w) * q.k
    value = 0.5 * base ** (2.0 / 3.0) * q.log_inv_p
    res = PhiResult(value, "clique_upper")
    r = max(3, math.ceil(base ** (1.0 / 3.0) - 1e-12))
    er = q.er()
    start = r
    while r <= q.n:
        g = _clique_on(r, q.n)
        if expected_triangles_conditional(g, er) >= q.target:
            res.witness = g
            if r > start:
                res.flags.append(f"witness enlarged from K_{start} to K_{r}")
            return res
        r += 1
    res.flags.append("clique witness does not fit in n")
    return res


def edge_lower_bound(q: PhiQuery) -> PhiResult:
    """1/2 (6a(1-w)k)^(2/3) log(1/p); meaningful for 0 <= w <= 1."""
    if q.w > 1:
        raise ValueError("edge lower bound needs w <= 1")
    value = 0.5 * (6.0 * q.a * (1.0 - q.w) * q.k) ** (2.0 / 3.0) * q.log_inv_p
    return PhiResult(value, "edge_lower")


def _all_subgraph_expectations(n: int, p: float) -> tuple[np.ndarray, np.ndarray]:
    """(edge count, E_G(T)) for every G subset of K_n, indexed by edge bitmask."""
    tab = graph_table(n)
    masks = np.arange(1 << tab.num_pairs, dtype=np.uint32)
    cherries = np.zeros(masks.shape, dtype=np.int64)
    pairs = list(combinations(range(n), 2))
    for v in range(n):
        inc = 0
        for b, (x, y) in enumerate(pairs):
            if v in (x, y):
                inc |= 1 << b
        d = np.bitwise_count(masks & np.uint32(inc)).astype(np.int64)
        cherries += d * (d - 1) // 2
    e = tab.edges.astype(np.int64)
    t = tab.triangles.astype(np.int64)
    a3 = t
    a2 = cherries - 3 * t
    a1 = e * (n - 2) - 2 * cherries + 3 * t
    a0 = math.comb(n, 3) - a1 - a2 - a3
    return e, a3 + p * (a2 + p * (a1 + p * a0))


def phi_exact(n: int, p: float, k: float, a: float, cap: int = PHI_EXACT_CAP) -> PhiResult:
    """Exact Phi by enumerating edge subsets of K_n level by level in edge count.

    The witness is the feasible graph of minimum edge count with the largest
    E_G(T), ties broken by smallest bitmask.
    """
    if n > cap:
        raise ValueError(f"phi_exact enumerates 2^C(n,2) graphs; n={n} exceeds cap {cap}")
    q = PhiQuery(n, p, k, a)
    if n < 3:
        if q.target <= 0:
            return PhiResult(0.0, "exact", Graph(n))
        return PhiResult(math.inf, "exact", None, feasible=False, flags=["infeasible: no triples"])
    e, ex = _all_subgraph_expectations(n, p)
    feasible = ex >= q.target
    if not feasible.any():
        return PhiResult(math.inf, "exact", None, feasible=False, flags=["infeasible: even K_n falls short"])
    m = n * (n - 1) // 2
    for level in range(m + 1):
        hit = np.flatnonzero(feasible & (e == level))
        if hit.size:
            best = hit[np.argmax(ex[hit])]
            return PhiResult(level * q.log_inv_p, "exact", Graph.from_mask(n, int(best)))
    raise AssertionError("unreachable")


@dataclass(frozen=True)
class CorrectionTerms:
    t_n: float
    psi_n: float
    log_xi_n: float
    eps_n: float
    Psi_n: float | None = None

    @property
    def xi_n(self) -> float:
        try:
            return math.exp(self.log_xi_n)
        except OverflowError:
            return math.inf


def core_threshold(p: float, k: float, a: float, w: float, C: float = DEFAULT_C) -> float:
    """t_n = w^2 k^(1/3) / (C a log(1/p))."""
    if w <= 0:
        raise ValueError("w must be positive")
    if C <= 0 or a <= 0:
        raise ValueError("C and a must be positive")
    return w * w * k ** (1.0 / 3.0) / (C * a * -math.log(p))


def core_entropy_exponent(m: int, n: int, p: float, t_n: float, C_prime: float = DEFAULT_C_PRIME) -> float:
    """Psi_n = (C'/t_n log n + log(C' m / t_n^2)) / log(1/p)."""
    return (C_prime / t_n * math.log(n) + math.log(C_prime * m / t_n**2)) / -math.log(p)


def correction_terms(
    n: int,
    p: float,
    k: float,
    a: float,
    w: float,
    C: float = DEFAULT_C,
    C_prime: float = DEFAULT_C_PRIME,
    m: int | None = None,
) -> CorrectionTerms:
    if w <= 0:
        raise ValueError("correction terms need w > 0")
    if not (0 < p < 1):
        raise ValueError("p must lie in (0, 1)")
    lp = -math.log(p)
    t_n = core_threshold(p, k, a, w, C)
    psi = C_prime * math.log(n) / (w * w * k ** (1.0 / 3.0)) + math.log(C_prime * w**-5 * lp**3) / lp
    log_xi = (0.5 * (6.0 * a) ** (2.0 / 3.0) - C / 3.0) * k ** (2.0 / 3.0) * lp
    Psi = core_entropy_exponent(m, n, p, t_n, C_prime) if m is not None else None
    return CorrectionTerms(t_n=t_n, psi_n=psi, log_xi_n=log_xi, eps_n=k ** (-2.0 / 3.0), Psi_n=Psi)


def rate_triangles(k: float, p: float) -> float:
    """1/2 (6k)^(2/3) log(1/p): leading order of -log P(T >= k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return 0.5 * (6.0 * k) ** (2.0 / 3.0) * -math.log(p)


def rate_vt(k: float) -> float:
    """(k/3) log(k/3): leading order of -log P(V_T >= k)."""
    if k < 1:
        raise ValueError("k must be >= 1")
    return k / 3.0 * math.log(k / 3.0)
