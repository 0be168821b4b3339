"""Seeds, cores and near-cliques.

A seed is a planted graph G with E_G(T) >= (a-w)k and at most
C a w^-1 k^(2/3) log(1/p) edges.  Greedily deleting edges whose removal costs
less than t_n = w^2 k^(1/3) / (C a log(1/p)) in E_G(T) turns a seed into a
core: a graph where every edge carries at least t_n, still with
E(T) >= (a-2w)k.
"""

from __future__ import annotations

import heapq
import logging
import math
from dataclasses import dataclass, field

from .conditional import edge_drop, expected_triangles_conditional
from .graph import ErParams, Graph, triangle_stats
from .variational import DEFAULT_C, DEFAULT_C_PRIME, core_entropy_exponent, core_threshold

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class CoreParams:
    a: float
    k: float
    w: float
    C: float
    er: ErParams

    def __post_init__(self):
        if min(self.a, self.k, self.w, self.C) <= 0:
            raise ValueError("a, k, w and C must all be positive")
        if not (0 < self.er.p < 1):
            raise ValueError("edge probability must lie in (0, 1)")

    @property
    def log_inv_p(self) -> float:
        return self.er.log_inv_p

    @property
    def t_n(self) -> float:
        return core_threshold(self.er.p, self.k, self.a, self.w, self.C)

    @property
    def edge_budget(self) -> float:
        """C a w^-1 k^(2/3) log(1/p), shared by (S2) and (C2)."""
        return self.C * self.a / self.w * self.k ** (2.0 / 3.0) * self.log_inv_p


@dataclass
class CoreCertificate:
    graph: Graph
    expectation: float
    m: int
    min_drop: float
    t_n: float
    s1: bool
    s2: bool
    c1: bool
    c2: bool
    c3: bool
    deleted: list[tuple[int, int]] = field(default_factory=list)
    drops: list[float] = field(default_factory=list)
    start_expectation: float | None = None

    @property
    def is_seed(self) -> bool:
        return self.s1 and self.s2

    @property
    def is_core(self) -> bool:
        return self.c1 and self.c2 and self.c3

    @property
    def steps(self) -> int:
        return len(self.deleted)

    def to_dict(self) -> dict:
        return {
            "n": self.graph.n,
            "m": self.m,
            "edges": [list(e) for e in self.graph.edges()],
            "expectation": self.expectation,
            "min_drop": None if math.isinf(self.min_drop) else self.min_drop,
            "t_n": self.t_n,
            "s1": self.s1,
            "s2": self.s2,
            "c1": self.c1,
            "c2": self.c2,
            "c3": self.c3,
            "steps": self.steps,
            "deleted": [list(e) for e in self.deleted],
            "start_expectation": self.start_expectation,
        }


def _min_drop(g: Graph, n: int, p: float) -> float:
    return min((edge_drop(g, n, p, u, v) for u, v in g.edges()), default=math.inf)


def certify(g: Graph, params: CoreParams) -> CoreCertificate:
    """Evaluate (S1), (S2), (C1), (C2), (C3) on ``g`` exactly."""
    er = params.er
    ex = expected_triangles_conditional(g, er)
    m = g.num_edges
    md = _min_drop(g, er.n, er.p)
    t_n = params.t_n
    ak = params.a * params.k
    return CoreCertificate(
        graph=g,
        expectation=ex,
        m=m,
        min_drop=md,
        t_n=t_n,
        s1=ex >= ak - params.w * params.k,
        s2=m <= params.edge_budget,
        c1=ex >= ak - 2 * params.w * params.k,
        c2=m <= params.edge_budget,
        c3=md >= t_n,
    )


def is_seed(g: Graph, params: CoreParams) -> CoreCertificate:
    return certify(g, params)


def extract_core(g: Graph, params: CoreParams) -> CoreCertificate:
    """Delete low-value edges until every edge is worth at least t_n.

    Each round removes the lexicographically smallest edge whose drop in
    E(T) is below t_n.  Drops only shrink as edges disappear, so an edge that
    once qualifies keeps qualifying and a heap keyed by (u, v) yields exactly
    that order.  Only edges at the endpoints of a deleted edge change value.
    """
    er = params.er
    n, p, t_n = er.n, er.p, params.t_n
    h = g.copy()
    start = expected_triangles_conditional(h, er)
    heap = [(u, v) for u, v in h.edges() if edge_drop(h, n, p, u, v) < t_n]
    heapq.heapify(heap)
    queued = set(heap)
    deleted, drops = [], []
    while heap:
        u, v = heapq.heappop(heap)
        drops.append(edge_drop(h, n, p, u, v))
        h.remove_edge(u, v)
        deleted.append((u, v))
        for x in (u, v):
            for y in h.adj[x]:
                e = (x, y) if x < y else (y, x)
                if e not in queued and edge_drop(h, n, p, *e) < t_n:
                    queued.add(e)
                    heapq.heappush(heap, e)
    cert = certify(h, params)
    cert.deleted, cert.drops, cert.start_expectation = deleted, drops, start
    return cert


@dataclass(frozen=True)
class LogBound:
    """A bound reported as a natural log, with notes on its validity."""

    log_value: float
    notes: tuple[str, ...] = ()

    @property
    def valid(self) -> bool:
        return not any(n.startswith("invalid") for n in self.notes)


def core_count_bound(m: int, n: int, t_n: float, p: float, C_prime: float = DEFAULT_C_PRIME) -> LogBound:
    """log of (1/p)^(m Psi_n), the bound on the number of m-cores.

    Requires t_n > C(lambda) = lambda + lambda^2, which makes every core edge
    sit between two vertices of degree >= t_n - C(lambda).  Negative values
    (a count bound below one) are clamped to 0.
    """
    if m < 1:
        raise ValueError("m must be a positive edge count")
    lam = n * p
    notes = []
    if t_n <= lam + lam * lam:
        notes.append(f"invalid regime: t_n={t_n:.4g} <= lambda+lambda^2={lam + lam * lam:.4g}")
    psi = core_entropy_exponent(m, n, p, t_n, C_prime)
    value = m * psi * -math.log(p)
    if value < 0:
        notes.append(f"clamped: raw log-count {value:.6g} < 0")
        value = 0.0
    return LogBound(value, tuple(notes))


@dataclass(frozen=True)
class SeedFailureBound:
    bound: float
    log_xi: float

    @property
    def xi(self) -> float:
        try:
            return math.exp(self.log_xi)
        except OverflowError:
            return math.inf


def seed_failure_bound(a: float, w: float, k: float, p: float, C: float, ell: int) -> SeedFailureBound:
    """(1 - w/a)^ell bound on P(T >= ak, no seed), together with log xi_n."""
    if not (0 < w < a):
        raise ValueError("need 0 < w < a")
    limit = C * a / 3.0 / w * k ** (2.0 / 3.0) * -math.log(p)
    if not (0 <= ell <= limit):
        raise ValueError(f"ell={ell} outside the admissible range [0, {limit:.6g}]")
    log_xi = (0.5 * (6.0 * a) ** (2.0 / 3.0) - C / 3.0) * k ** (2.0 / 3.0) * -math.log(p)
    return SeedFailureBound((1.0 - w / a) ** ell, log_xi)


# -- near-cliques -----------------------------------------------------------


def near_clique_threshold(delta: float, e: int) -> float:
    return (1.0 - 4.0 * math.sqrt(delta)) * math.sqrt(2.0 * e)


@dataclass(frozen=True)
class NearCliqueReport:
    delta: float
    m: int
    min_degree: int
    threshold: float
    passes: bool


def near_clique_check(g: Graph, delta: float, m: int | None = None) -> NearCliqueReport:
    """Is ``g`` a (delta, m)-clique?  Degrees are taken over non-isolated vertices."""
    if delta <= 0:
        raise ValueError("delta must be positive")
    e = g.num_edges
    m = e if m is None else m
    degs = [d for d in g.degrees() if d]
    md = min(degs, default=0)
    thr = near_clique_threshold(delta, e)
    return NearCliqueReport(delta, m, md, thr, md >= thr and e == m)


@dataclass
class PeelResult:
    graph: Graph | None
    threshold: float
    regime_ok: bool
    guaranteed: bool
    removed: list[int]

    @property
    def guarantee_violated(self) -> bool:
        return self.guaranteed and self.graph is None


def high_min_degree_subgraph(g: Graph, delta: float) -> PeelResult:
    """Min-degree peeling against the threshold (1 - 4 sqrt(delta)) sqrt(2 e_G).

    The threshold uses the edge count of the input graph throughout.  When
    6 T >= (1 - delta)(2 e_G)^(3/2) and delta >= e_G^(-1/2), a subgraph with
    this minimum degree is known to exist; a peeling failure in that regime
    is logged and reported through ``guarantee_violated``.
    """
    if delta <= 0:
        raise ValueError("delta must be positive")
    e = g.num_edges
    thr = near_clique_threshold(delta, e)
    regime_ok = e > 0 and delta >= e ** -0.5
    guaranteed = regime_ok and 6 * triangle_stats(g).total >= (1.0 - delta) * (2.0 * e) ** 1.5

    h = g.induced(g.active_vertices())
    alive = set(h.active_vertices())
    heap = [(h.degree(v), v) for v in alive]
    heapq.heapify(heap)
    removed = []
    while heap:
        d, v = heap[0]
        if v not in alive or d != h.degree(v):
            heapq.heappop(heap)
            continue
        if d >= thr:
            break
        heapq.heappop(heap)
        alive.discard(v)
        removed.append(v)
        for x in list(h.adj[v]):
            h.remove_edge(v, x)
            heapq.heappush(heap, (h.degree(x), x))
    result = h if alive else None
    res = PeelResult(result, thr, regime_ok, guaranteed, removed)
    if res.guarantee_violated:
        log.warning("peeling found no subgraph although one is guaranteed (e=%d, delta=%g)", e, delta)
    return res
