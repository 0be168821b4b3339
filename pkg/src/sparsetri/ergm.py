"""Exponential random graph tilted by the number of vertices in triangles.

The measure has density n^(beta V_T(g)) / Z with respect to G(n, lambda/n).
Small n is handled exactly by enumeration; otherwise a single-edge-flip
Metropolis chain runs in a numba kernel on a dense adjacency matrix with
per-vertex triangle counts kept incrementally.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np
from numba import jit
from scipy.special import logsumexp

from .enumeration import check_cap, joint_counts, log_edge_weights
from .graph import Graph
from .rng import make_rng

log = logging.getLogger(__name__)

MIXING_TOLERANCE = 0.15
_CHUNK = 1 << 20


@dataclass(frozen=True)
class ErgmConfig:
    n: int
    lam: float
    beta: float
    steps: int
    burn_in: int = 0
    thin: int = 100
    seed: int = 0
    init: str = "empty"
    check_every: int = 100_000
    record_states: bool = False
    stream: tuple = ()

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("n must be at least 2")
        if not (0 < self.lam < self.n):
            raise ValueError(f"need 0 < lambda < n, got lambda={self.lam}")
        if not (self.steps > self.burn_in >= 0):
            raise ValueError("need steps > burn_in >= 0")
        if self.thin < 1:
            raise ValueError("thin must be >= 1")
        if self.init not in ("empty", "complete"):
            raise ValueError("init must be 'empty' or 'complete'")
        if self.record_states and self.n * (self.n - 1) // 2 > 62:
            raise ValueError("state recording needs C(n,2) <= 62")

    @property
    def p(self) -> float:
        return self.lam / self.n

    @property
    def tilt(self) -> float:
        """beta log n, the weight of one vertex in triangles."""
        return self.beta * math.log(self.n)


@dataclass
class ErgmTrace:
    config: ErgmConfig
    vt: np.ndarray
    edges: np.ndarray
    acceptance: float
    final_graph: Graph
    states: np.ndarray | None = None
    checks: int = 0

    @property
    def vt_fraction(self) -> np.ndarray:
        return self.vt / self.config.n

    @property
    def mean_vt(self) -> float:
        return float(self.vt.mean())

    def stderr_vt(self, batches: int = 50) -> float:
        return batch_means_stderr(self.vt, batches)


def batch_means_stderr(x: np.ndarray, batches: int = 50) -> float:
    """Standard error of the mean from ``batches`` equal contiguous batches."""
    x = np.asarray(x, dtype=float)
    size = x.size // batches
    if size < 1:
        raise ValueError(f"need at least {batches} samples for {batches} batches")
    means = x[: size * batches].reshape(batches, size).mean(axis=1)
    return float(means.std(ddof=1) / math.sqrt(batches))


# -- exact ------------------------------------------------------------------


def _log_weights(n: int, lam: float, beta: float, allow_large: bool) -> tuple[np.ndarray, np.ndarray]:
    check_cap(n, allow_large)
    if not (0 < lam < n):
        raise ValueError(f"need 0 < lambda < n, got lambda={lam}")
    counts = joint_counts(n, "VT", allow_large)
    m = n * (n - 1) // 2
    with np.errstate(divide="ignore"):
        lc = np.log(counts.astype(float))
    per_vt = logsumexp(lc + log_edge_weights(m, lam / n)[:, None], axis=0)
    s = np.arange(per_vt.size)
    return per_vt + beta * math.log(n) * s, s


def ergm_exact_log_partition(n: int, lam: float, beta: float, allow_large: bool = False) -> float:
    """log E[n^(beta V_T)] under G(n, lambda/n), by enumeration."""
    if beta == 0:
        check_cap(n, allow_large)
        return 0.0
    lw, _ = _log_weights(n, lam, beta, allow_large)
    return float(logsumexp(lw))


def ergm_exact_vt_distribution(n: int, lam: float, beta: float, allow_large: bool = False) -> np.ndarray:
    """P_beta(V_T = s) for s = 0..n."""
    lw, _ = _log_weights(n, lam, beta, allow_large)
    return np.exp(lw - logsumexp(lw))


def ergm_exact_mean_vt(n: int, lam: float, beta: float, allow_large: bool = False) -> float:
    dist = ergm_exact_vt_distribution(n, lam, beta, allow_large)
    return float(dist @ np.arange(dist.size))


def partition_scaling(beta: float) -> float:
    """(beta - 1/3)_+, the limit of log Z / (n log n)."""
    if beta < 0:
        raise ValueError("beta must be non-negative")
    return max(beta - 1.0 / 3.0, 0.0)


# -- MCMC kernel ------------------------------------------------------------


@jit(nopython=True, cache=True)
def _recount(adj, tri):
    n = adj.shape[0]
    tri[:] = 0
    for a in range(n):
        for b in range(a + 1, n):
            if adj[a, b]:
                for c in range(b + 1, n):
                    if adj[a, c] and adj[b, c]:
                        tri[a] += 1
                        tri[b] += 1
                        tri[c] += 1


@jit(nopython=True, cache=True)
def _state_mask(adj):
    n = adj.shape[0]
    mask = 0
    bit = 0
    for a in range(n):
        for b in range(a + 1, n):
            if adj[a, b]:
                mask |= 1 << bit
            bit += 1
    return mask


@jit(nopython=True, cache=True)
def _metropolis(
    adj, tri, pu, pv, pairs, unif, log_odds, tilt, step0, burn_in, thin,
    check_every, edges, vt, out_vt, out_e, out_states, record_states, scratch,
):
    """Advance the chain over one chunk of pre-drawn proposals.

    Returns (edges, vt, accepted, recount_mismatches).
    """
    n = adj.shape[0]
    accepted = 0
    bad = 0
    for i in range(pairs.shape[0]):
        step = step0 + i
        u = pu[pairs[i]]
        v = pv[pairs[i]]
        c = 0
        for w in range(n):
            if adj[u, w] and adj[v, w]:
                scratch[c] = w
                c += 1
        present = adj[u, v] == 1
        dv = 0
        if present:
            if c > 0:
                if tri[u] == c:
                    dv -= 1
                if tri[v] == c:
                    dv -= 1
                for j in range(c):
                    if tri[scratch[j]] == 1:
                        dv -= 1
            lr = -log_odds + tilt * dv
        else:
            if c > 0:
                if tri[u] == 0:
                    dv += 1
                if tri[v] == 0:
                    dv += 1
                for j in range(c):
                    if tri[scratch[j]] == 0:
                        dv += 1
            lr = log_odds + tilt * dv
        if lr >= 0.0 or unif[i] < math.exp(lr):
            accepted += 1
            sign = -1 if present else 1
            adj[u, v] = 0 if present else 1
            adj[v, u] = adj[u, v]
            edges += sign
            tri[u] += sign * c
            tri[v] += sign * c
            for j in range(c):
                tri[scratch[j]] += sign
            vt += dv
        done = step + 1
        if check_every > 0 and done % check_every == 0:
            saved = tri.copy()
            _recount(adj, tri)
            cnt = 0
            for x in range(n):
                if tri[x] > 0:
                    cnt += 1
                if tri[x] != saved[x]:
                    bad += 1
            if cnt != vt:
                bad += 1
            vt = cnt
        if step >= burn_in and (step - burn_in) % thin == 0:
            r = (step - burn_in) // thin
            out_vt[r] = vt
            out_e[r] = edges
            if record_states:
                out_states[r] = _state_mask(adj)
    return edges, vt, accepted, bad


def _initial_state(n: int, init: str) -> tuple[np.ndarray, np.ndarray, int, int]:
    if init == "empty":
        return np.zeros((n, n), dtype=np.uint8), np.zeros(n, dtype=np.int64), 0, 0
    adj = np.ones((n, n), dtype=np.uint8)
    np.fill_diagonal(adj, 0)
    tri = np.full(n, (n - 1) * (n - 2) // 2, dtype=np.int64)
    return adj, tri, n * (n - 1) // 2, n if n >= 3 else 0


def ergm_mcmc(config: ErgmConfig) -> ErgmTrace:
    """Run the Metropolis chain described by ``config``.

    A proposal picks a uniform pair and flips it with probability
    min(1, (p/(1-p))^(+-1) n^(beta dV_T)).  After burn-in, V_T and the edge
    count are recorded every ``thin`` steps; the step index counts proposals
    from zero.  The incremental triangle counts are checked against a full
    recount every ``check_every`` steps.
    """
    n, p = config.n, config.p
    rng = make_rng(config.seed, "ergm", *config.stream)
    iu, iv = np.triu_indices(n, 1)
    pu, pv = iu.astype(np.int64), iv.astype(np.int64)
    adj, tri, edges, vt = _initial_state(n, config.init)
    log_odds = math.log(p) - math.log1p(-p)
    records = (config.steps - config.burn_in + config.thin - 1) // config.thin
    out_vt = np.zeros(records, dtype=np.int64)
    out_e = np.zeros(records, dtype=np.int64)
    out_states = np.zeros(records if config.record_states else 1, dtype=np.int64)
    scratch = np.zeros(n, dtype=np.int64)
    accepted = bad = 0
    for start in range(0, config.steps, _CHUNK):
        size = min(_CHUNK, config.steps - start)
        pairs = rng.integers(pu.size, size=size)
        unif = rng.random(size)
        edges, vt, acc, b = _metropolis(
            adj, tri, pu, pv, pairs, unif, log_odds, config.tilt, start, config.burn_in, config.thin,
            config.check_every, edges, vt, out_vt, out_e, out_states, config.record_states, scratch,
        )
        accepted += acc
        bad += b
    if bad:
        raise RuntimeError(f"incremental triangle counts disagreed with recount {bad} times")
    g = Graph(n, zip(*np.nonzero(np.triu(adj))))
    checks = config.steps // config.check_every if config.check_every > 0 else 0
    return ErgmTrace(
        config, out_vt, out_e, accepted / config.steps, g,
        out_states if config.record_states else None, checks,
    )


# -- sweeps -----------------------------------------------------------------


@dataclass
class SweepRow:
    beta: float
    mean_empty: float
    stderr_empty: float
    acceptance_empty: float
    mean_complete: float
    stderr_complete: float
    acceptance_complete: float
    mixing_warning: bool = False
    notes: list[str] = field(default_factory=list)

    @property
    def mean(self) -> float:
        return 0.5 * (self.mean_empty + self.mean_complete)

    @property
    def stderr(self) -> float:
        return 0.5 * math.hypot(self.stderr_empty, self.stderr_complete)

    @property
    def disagreement(self) -> float:
        return abs(self.mean_empty - self.mean_complete)


SWEEP_HEADER = [
    "beta", "mean_vt_frac", "stderr", "acceptance",
    "mean_empty", "stderr_empty", "mean_complete", "stderr_complete",
    "disagreement", "mixing_warning",
]


def sweep_csv_row(row: SweepRow) -> list:
    acc = 0.5 * (row.acceptance_empty + row.acceptance_complete)
    return [
        row.beta, row.mean, row.stderr, acc,
        row.mean_empty, row.stderr_empty, row.mean_complete, row.stderr_complete,
        row.disagreement, int(row.mixing_warning),
    ]


def ergm_sweep(
    n: int,
    lam: float,
    betas: list[float],
    steps: int,
    burn_in: int | None = None,
    thin: int = 100,
    seed: int = 0,
    tolerance: float = MIXING_TOLERANCE,
) -> list[SweepRow]:
    """Paired chains from the empty and the complete graph at every beta.

    Means are of V_T / n.  Chains whose means differ by more than
    ``tolerance`` get a mixing warning instead of being silently averaged.
    """
    if not betas:
        raise ValueError("betas must be non-empty")
    burn_in = steps // 2 if burn_in is None else burn_in
    rows = []
    for i, beta in enumerate(betas):
        res = {}
        for init in ("empty", "complete"):
            cfg = ErgmConfig(n, lam, beta, steps, burn_in, thin, seed, init, stream=("sweep", i, init))
            tr = ergm_mcmc(cfg)
            res[init] = (float(tr.vt_fraction.mean()), batch_means_stderr(tr.vt_fraction), tr.acceptance)
        row = SweepRow(beta, *res["empty"], *res["complete"])
        if row.disagreement > tolerance:
            row.mixing_warning = True
            row.notes.append(f"paired chains disagree by {row.disagreement:.3f}")
            log.warning("beta=%g: empty and complete starts disagree by %.3f", beta, row.disagreement)
        rows.append(row)
    return rows
