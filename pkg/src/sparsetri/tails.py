"""Upper-tail probabilities of T and V_T.

Exact values come from the joint (edges, statistic) histogram over all graphs
on n <= 7 vertices.  Monte Carlo estimates use bitmask sampling when all pairs
fit in 64 bits.  The clique importance sampler and the two analytic formulas
are lower bounds and are labelled as such.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import logsumexp

from .enumeration import check_cap, joint_counts, log_edge_weights, mask_stats, sample_masks
from .graph import ErParams, Graph, edge_index, sample_er, triangle_stats
from .rng import make_rng, stream_id
from .variational import rate_vt

STATISTICS = ("T", "VT")
METHODS = ("exact", "mc", "is_clique", "analytic_lb")
MAX_CLIQUE_R = 6
_CHUNK = 1 << 16


def _check_stat(statistic: str) -> None:
    if statistic not in STATISTICS:
        raise ValueError(f"statistic must be one of {STATISTICS}, got {statistic!r}")


@dataclass
class TailEstimate:
    """Estimate of log P(statistic >= k).

    ``stderr`` is on the probability scale; ``stderr_log`` is its delta-method
    image on the log scale.
    """

    statistic: str
    k: float
    log_value: float
    method: str
    stderr: float | None = None
    samples: int | None = None
    seed: int | None = None
    is_lower_bound: bool = False
    flags: list[str] = field(default_factory=list)

    @property
    def value(self) -> float:
        return math.exp(self.log_value)

    @property
    def stderr_log(self) -> float | None:
        if self.stderr is None:
            return None
        return self.stderr / self.value if self.value > 0 else math.inf

    def csv_row(self) -> list:
        return [
            self.statistic,
            self.k,
            self.method,
            self.log_value,
            "" if self.stderr is None else self.stderr,
            int(self.is_lower_bound),
            "" if self.samples is None else self.samples,
            "" if self.seed is None else self.seed,
        ]


CSV_HEADER = ["stat", "k", "method", "log_p", "stderr", "lower_bound_flag", "samples", "seed"]


def _stat_index(statistic: str) -> int:
    return 1 if statistic == "T" else 2


# -- exact ------------------------------------------------------------------


def exact_log_tail_table(n: int, p: float, statistic: str, allow_large: bool = False) -> np.ndarray:
    """log P(statistic >= s) for s = 0..max."""
    _check_stat(statistic)
    counts = joint_counts(n, statistic, allow_large)
    m = n * (n - 1) // 2
    lw = log_edge_weights(m, p)
    with np.errstate(divide="ignore"):
        lc = np.log(counts.astype(float))
    # log P(statistic = s)
    point = logsumexp(lc + lw[:, None], axis=0)
    tail = np.logaddexp.accumulate(point[::-1])[::-1]
    return np.minimum(tail, 0.0)


def exact_tail(n: int, p: float, statistic: str, k: float, allow_large: bool = False) -> TailEstimate:
    """P(statistic >= k) by summing p^e (1-p)^(M-e) over every graph on n vertices."""
    _check_stat(statistic)
    check_cap(n, allow_large)
    if not (0.0 <= p <= 1.0):
        raise ValueError("p must lie in [0, 1]")
    table = exact_log_tail_table(n, p, statistic, allow_large)
    s = max(0, math.ceil(k))
    val = 0.0 if k <= 0 else (float(table[s]) if s < table.size else -math.inf)
    return TailEstimate(statistic, k, val, "exact")


# -- Monte Carlo ------------------------------------------------------------


def _sample_statistics(n: int, p: float, statistic: str, samples: int, rng: np.random.Generator) -> np.ndarray:
    out = np.empty(samples, dtype=np.int64)
    if n * (n - 1) // 2 <= 64:
        idx = _stat_index(statistic)
        for start in range(0, samples, _CHUNK):
            size = min(_CHUNK, samples - start)
            out[start : start + size] = mask_stats(sample_masks(n, p, size, rng), n)[idx]
    else:
        params = ErParams.from_p(n, p)
        sub = int(rng.integers(2**63))
        for i in range(samples):
            ts = triangle_stats(sample_er(params, sub, stream=i))
            out[i] = ts.total if statistic == "T" else ts.vt
    return out


def mc_tail(n: int, p: float, statistic: str, k: float, samples: int, seed: int = 0) -> TailEstimate:
    """Hit frequency of {statistic >= k} with binomial standard error.

    With no hits the one-sided 95% Clopper-Pearson bound 1 - 0.05^(1/N) is
    reported instead, and flagged.
    """
    _check_stat(statistic)
    if samples < 100:
        raise ValueError("mc_tail needs at least 100 samples")
    rng = make_rng(seed, "mc-tail", statistic, n)
    hits = int((_sample_statistics(n, p, statistic, samples, rng) >= k).sum())
    est = TailEstimate(statistic, k, 0.0, "mc", samples=samples, seed=seed)
    if hits == 0:
        est.log_value = math.log1p(-(0.05 ** (1.0 / samples)))
        est.stderr = 0.0
        est.flags.append("zero hits: value is a one-sided 95% upper confidence bound")
        return est
    phat = hits / samples
    est.log_value = math.log(phat)
    est.stderr = math.sqrt(phat * (1.0 - phat) / samples)
    return est


# -- clique importance sampling ---------------------------------------------


def _clique_masks(n: int, r: int) -> np.ndarray:
    out = []
    for s in combinations(range(n), r):
        m = 0
        for u, v in combinations(s, 2):
            m |= 1 << edge_index(n, u, v)
        out.append(m)
    return np.array(out, dtype=np.uint64)


def count_cliques(g: Graph, r: int) -> int:
    """Number of r-cliques, by ordered extension through higher neighbours."""
    if r < 1:
        raise ValueError("r must be positive")
    adj = g.adj

    def grow(cand: set[int], depth: int) -> int:
        if depth == r:
            return 1
        return sum(grow(cand & {w for w in adj[v] if w > v}, depth + 1) for v in cand)

    return grow(set(range(g.n)), 0)


def smallest_clique_order(k: float) -> int:
    """Smallest r >= 3 with C(r, 3) >= k."""
    r = 3
    while math.comb(r, 3) < k:
        r += 1
    return r


def is_clique_tail(
    n: int, p: float, k: float, r: int, samples: int, seed: int = 0, statistic: str = "T"
) -> TailEstimate:
    """Importance sampler planting K_r on a uniform r-subset.

    Weight C(n,r) p^C(r,2) / X_r(g) makes the estimator unbiased for
    P(statistic >= k and g contains some K_r), a lower bound on the tail.
    """
    _check_stat(statistic)
    if not (3 <= r <= n):
        raise ValueError(f"need 3 <= r <= n, got r={r}, n={n}")
    if r > MAX_CLIQUE_R:
        raise ValueError(f"r={r} exceeds the clique-counting limit {MAX_CLIQUE_R}")
    if samples < 1:
        raise ValueError("samples must be positive")
    rng = make_rng(seed, "is-clique", statistic, n, r)
    log_w0 = math.log(math.comb(n, r)) + math.comb(r, 2) * math.log(p)
    vals = np.empty(samples)
    if n * (n - 1) // 2 <= 64:
        cms = _clique_masks(n, r)
        idx = _stat_index(statistic)
        for start in range(0, samples, _CHUNK):
            size = min(_CHUNK, samples - start)
            planted = cms[rng.integers(cms.size, size=size)]
            masks = sample_masks(n, p, size, rng) | planted
            stat = mask_stats(masks, n)[idx]
            x = np.zeros(size, dtype=np.int64)
            for cm in cms:
                x += (masks & cm) == cm
            vals[start : start + size] = np.where(stat >= k, np.exp(log_w0) / x, 0.0)
    else:
        params = ErParams.from_p(n, p)
        sub = int(rng.integers(2**63))
        for i in range(samples):
            g = sample_er(params, sub, stream=i)
            s = sorted(rng.choice(n, size=r, replace=False).tolist())
            for u, v in combinations(s, 2):
                g.add_edge(u, v)
            ts = triangle_stats(g)
            hit = (ts.total if statistic == "T" else ts.vt) >= k
            vals[i] = math.exp(log_w0) / count_cliques(g, r) if hit else 0.0
    mean = float(vals.mean())
    est = TailEstimate(statistic, k, -math.inf, "is_clique", samples=samples, seed=seed, is_lower_bound=True)
    est.stderr = float(vals.std(ddof=1) / math.sqrt(samples)) if samples > 1 else math.nan
    est.flags.append(f"lower bound: estimates P({statistic} >= k and a K_{r} is present)")
    if mean > 0:
        est.log_value = min(0.0, math.log(mean))
    else:
        est.flags.append("no weighted hits")
    return est


# -- analytic lower bounds --------------------------------------------------


def clique_lower_bound(n: int, p: float, k: float) -> TailEstimate:
    """log p^C(r,2) for the smallest r with C(r,3) >= k: a fixed K_r forces T >= k."""
    if k <= 0:
        return TailEstimate("T", k, 0.0, "analytic_lb", is_lower_bound=True)
    r = smallest_clique_order(k)
    if r > n:
        raise ValueError(f"K_{r} needed for k={k} does not fit in n={n}")
    return TailEstimate("T", k, math.comb(r, 2) * math.log(p), "analytic_lb", is_lower_bound=True)


def disjoint_triangles_lower_bound(n: int, p: float, k: int, lam: float) -> TailEstimate:
    """P(V_T >= k) bound from graphs whose triangle vertices are exactly k/3
    disjoint triangles, summed over the C(n, k) vertex sets.

    The factor 0.9 exp(-lam^3/6) bounds the probability of no triangle
    outside the chosen set only for large n, so the result is flagged.
    """
    if k % 3 or not (3 <= k <= n):
        raise ValueError(f"need 3 <= k <= n with 3 | k, got k={k}, n={n}")
    if not (0 < p < 1):
        raise ValueError("p must lie in (0, 1)")
    t = k // 3
    val = (
        math.lgamma(n + 1)
        - math.lgamma(n - k + 1)
        - t * math.log(6)
        - math.lgamma(t + 1)
        + k * math.log(p)
        + (math.comb(k, 2) - k + (n - k) * k) * math.log1p(-p)
        + math.log(0.9)
        - lam**3 / 6.0
    )
    est = TailEstimate("VT", k, val, "analytic_lb", is_lower_bound=True)
    est.flags.append("asymptotic: the factor 0.9 exp(-lambda^3/6) is a large-n estimate")
    if val > 0:
        est.flags.append(f"raw value {val:.6g} > 0 clamped to 0")
        est.log_value = 0.0
    return est


def vt_implied_constant(n: int, p: float, k: int) -> float:
    """The C making (k/3) log(k/3) +- C k bracket the exact -log P(V_T >= k)."""
    if k < 3:
        raise ValueError("k must be at least 3")
    lv = exact_tail(n, p, "VT", k).log_value
    return abs(-lv - rate_vt(k)) / k


# -- conditioning -----------------------------------------------------------


class ConditioningFailure(RuntimeError):
    def __init__(self, tries: int, accepted: int = 0):
        self.tries = tries
        self.accepted = accepted
        super().__init__(f"rejection sampling gave up after {tries} tries ({accepted} accepted)")


@dataclass
class ConditionedSample:
    graph: Graph
    tries: int
    stream: str


def _event(statistic: str, k: float):
    _check_stat(statistic)
    if statistic == "T":
        return lambda ts: ts.total >= k
    return lambda ts: ts.vt >= k


def conditioned_samples(
    n: int, p: float, statistic: str, k: float, count: int, seed: int = 0, max_tries: int = 1_000_000
) -> tuple[list[Graph], int]:
    """``count`` independent G(n,p) graphs conditioned on {statistic >= k}.

    Try i draws from stream i of ``seed``; returns the graphs and the total
    number of tries.
    """
    ok = _event(statistic, k)
    params = ErParams.from_p(n, p)
    out = []
    for i in range(max_tries):
        g = sample_er(params, seed, stream=i)
        if ok(triangle_stats(g)):
            out.append(g)
            if len(out) == count:
                return out, i + 1
    raise ConditioningFailure(max_tries, len(out))


def conditioned_sample(
    n: int, p: float, statistic: str, k: float, seed: int = 0, max_tries: int = 1_000_000
) -> ConditionedSample:
    graphs, tries = conditioned_samples(n, p, statistic, k, 1, seed, max_tries)
    return ConditionedSample(graphs[0], tries, stream_id(seed, "er", tries - 1))
