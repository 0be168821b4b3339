"""Simple undirected graphs on {0..n-1}, Erdos-Renyi sampling and exact
triangle / vertex-in-triangle statistics."""

from __future__ import annotations

import json
import logging
import math
from dataclasses import dataclass, field
from itertools import combinations
from pathlib import Path
from typing import Iterable

import numpy as np

from .rng import make_rng

log = logging.getLogger(__name__)

__all__ = [
    "EdgeListError",
    "ErParams",
    "Graph",
    "SubgraphCounts",
    "TriangleStats",
    "edge_index",
    "format_edgelist",
    "parse_edgelist",
    "read_edgelist",
    "sample_er",
    "stats_json",
    "subgraph_counts",
    "toggle_edge",
    "triangle_stats",
    "write_edgelist",
]


class EdgeListError(ValueError):
    """Malformed edge-list input. ``line`` is 1-based, or None for whole-file problems."""

    def __init__(self, message: str, line: int | None = None):
        self.line = line
        where = f"line {line}: " if line is not None else ""
        super().__init__(where + message)


@dataclass(frozen=True)
class ErParams:
    """Parameters of G(n, p) with p = lam / n.

    ``lam`` must satisfy 0 <= lam < n.  ``ErParams.from_p`` is the escape hatch
    for arbitrary p in [0, 1] (tests and dense oracles).
    """

    n: int
    lam: float
    _p: float | None = field(default=None, repr=False, compare=False)

    def __post_init__(self):
        if int(self.n) != self.n or self.n < 1:
            raise ValueError(f"n must be a positive integer, got {self.n!r}")
        if self._p is None:
            if not (0 <= self.lam < self.n):
                raise ValueError(f"need 0 <= lambda < n, got lambda={self.lam}, n={self.n}")
        elif not (0.0 <= self._p <= 1.0):
            raise ValueError(f"p must lie in [0, 1], got {self._p}")

    @classmethod
    def from_p(cls, n: int, p: float) -> "ErParams":
        return cls(n, p * n, float(p))

    @property
    def p(self) -> float:
        return self._p if self._p is not None else self.lam / self.n

    @property
    def log_inv_p(self) -> float:
        return -math.log(self.p)

    @staticmethod
    def eps(k: float) -> float:
        """eps_n = k^(-2/3)."""
        return k ** (-2.0 / 3.0)


def edge_index(n: int, u: int, v: int) -> int:
    """Position of the pair {u, v} in the lexicographic list of pairs of [n]."""
    if u > v:
        u, v = v, u
    return u * (2 * n - u - 1) // 2 + (v - u - 1)


class Graph:
    """Simple undirected graph with adjacency sets.

    Mutation goes through ``add_edge`` / ``remove_edge`` (or ``toggle_edge``
    when triangle statistics must be kept in sync).
    """

    __slots__ = ("n", "adj", "_m")

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise ValueError("n must be non-negative")
        self.n = int(n)
        self.adj: list[set[int]] = [set() for _ in range(self.n)]
        self._m = 0
        for u, v in edges:
            self.add_edge(u, v)

    @classmethod
    def complete(cls, n: int) -> "Graph":
        return cls(n, combinations(range(n), 2))

    @classmethod
    def from_mask(cls, n: int, mask: int) -> "Graph":
        g = cls(n)
        for b, (u, v) in enumerate(combinations(range(n), 2)):
            if mask >> b & 1:
                g.add_edge(u, v)
        return g

    def to_mask(self) -> int:
        mask = 0
        for u, v in self.edges():
            mask |= 1 << edge_index(self.n, u, v)
        return mask

    @property
    def num_edges(self) -> int:
        return self._m

    def _check(self, u: int, v: int):
        if u == v:
            raise ValueError(f"self-loop at {u}")
        if not (0 <= u < self.n and 0 <= v < self.n):
            raise ValueError(f"vertex out of range: ({u}, {v}) with n={self.n}")

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def add_edge(self, u: int, v: int) -> bool:
        self._check(u, v)
        if v in self.adj[u]:
            return False
        self.adj[u].add(v)
        self.adj[v].add(u)
        self._m += 1
        return True

    def remove_edge(self, u: int, v: int) -> bool:
        if v not in self.adj[u]:
            return False
        self.adj[u].discard(v)
        self.adj[v].discard(u)
        self._m -= 1
        return True

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    def neighbors(self, v: int) -> list[int]:
        return sorted(self.adj[v])

    def edges(self) -> list[tuple[int, int]]:
        return [(u, v) for u in range(self.n) for v in sorted(self.adj[u]) if u < v]

    def active_vertices(self) -> list[int]:
        """Vertices of positive degree."""
        return [v for v in range(self.n) if self.adj[v]]

    def copy(self) -> "Graph":
        g = Graph(self.n)
        g.adj = [set(a) for a in self.adj]
        g._m = self._m
        return g

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph on ``vertices``, keeping the original labels and n."""
        keep = set(vertices)
        return Graph(self.n, ((u, v) for u, v in self.edges() if u in keep and v in keep))

    def __eq__(self, other):
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.adj == other.adj

    def __repr__(self):
        return f"Graph(n={self.n}, m={self._m})"


@dataclass
class TriangleStats:
    total: int
    per_vertex: list[int]
    vt: int

    def copy(self) -> "TriangleStats":
        return TriangleStats(self.total, list(self.per_vertex), self.vt)


@dataclass(frozen=True)
class SubgraphCounts:
    edges: int
    cherries: int
    triangles: int


def triangle_stats(g: Graph) -> TriangleStats:
    """Exact T, per-vertex triangle membership counts and V_T.

    Each triangle is found once, from its lexicographically smallest edge
    {u, v} (u < v), as w > v in N(u) & N(v).
    """
    per_vertex = [0] * g.n
    total = 0
    adj = g.adj
    for u in range(g.n):
        au = adj[u]
        for v in au:
            if v <= u:
                continue
            for w in au & adj[v]:
                if w > v:
                    total += 1
                    per_vertex[u] += 1
                    per_vertex[v] += 1
                    per_vertex[w] += 1
    vt = sum(1 for c in per_vertex if c)
    return TriangleStats(total, per_vertex, vt)


def subgraph_counts(g: Graph) -> SubgraphCounts:
    cherries = sum(d * (d - 1) // 2 for d in g.degrees())
    return SubgraphCounts(g.num_edges, cherries, triangle_stats(g).total)


def toggle_edge(g: Graph, stats: TriangleStats, u: int, v: int) -> tuple[Graph, TriangleStats]:
    """Flip edge {u, v} in place, updating ``stats`` from N(u) & N(v) only."""
    if u == v or not (0 <= u < g.n and 0 <= v < g.n):
        raise ValueError(f"invalid pair ({u}, {v}) for n={g.n}")
    common = g.adj[u] & g.adj[v]
    pv = stats.per_vertex
    if g.has_edge(u, v):
        g.remove_edge(u, v)
        sign = -1
    else:
        g.add_edge(u, v)
        sign = 1
    if common:
        k = len(common)
        touched = [u, v, *common]
        before = sum(1 for x in touched if pv[x])
        pv[u] += sign * k
        pv[v] += sign * k
        for w in common:
            pv[w] += sign
        after = sum(1 for x in touched if pv[x])
        stats.total += sign * k
        stats.vt += after - before
    return g, stats


def sample_er(params: ErParams, seed: int, *, stream: int = 0) -> Graph:
    """Draw G(n, p) deterministically from ``seed``.

    The edge count is Binomial(C(n,2), p); the edge set is then a uniform
    subset of pairs of that size, which gives exactly the product measure.
    """
    n, p = params.n, params.p
    g = Graph(n)
    total = n * (n - 1) // 2
    if total == 0 or p == 0.0:
        return g
    rng = make_rng(seed, "er", stream)
    m = int(rng.binomial(total, p))
    if m == 0:
        return g
    idx = np.sort(rng.choice(total, size=m, replace=False))
    rows = np.arange(n, dtype=np.int64)
    starts = rows * (2 * n - rows - 1) // 2
    us = np.searchsorted(starts, idx, side="right") - 1
    vs = idx - starts[us] + us + 1
    for u, v in zip(us.tolist(), vs.tolist()):
        g.adj[u].add(v)
        g.adj[v].add(u)
    g._m = m
    return g


# -- edge-list text format -------------------------------------------------


def parse_edgelist(text: str) -> Graph:
    """Parse ``n m`` followed by ``m`` lines ``u v``.

    Pairs are normalised to u < v.  If labels outside [0, n) appear, the
    distinct labels are relabelled to 0..k-1 in increasing order (k <= n).
    """
    lines = [(i + 1, ln.strip()) for i, ln in enumerate(text.splitlines())]
    lines = [(i, ln) for i, ln in lines if ln and not ln.startswith("#")]
    if not lines:
        raise EdgeListError("empty input")
    head_no, head = lines[0]
    parts = head.split()
    if len(parts) != 2:
        raise EdgeListError("header must be 'n m'", head_no)
    try:
        n, m = int(parts[0]), int(parts[1])
    except ValueError:
        raise EdgeListError("header must contain two integers", head_no) from None
    if n < 0 or m < 0:
        raise EdgeListError("n and m must be non-negative", head_no)
    body = lines[1:]
    if len(body) != m:
        raise EdgeListError(f"header announces {m} edges, found {len(body)}", None)
    raw = []
    for no, ln in body:
        parts = ln.split()
        if len(parts) != 2:
            raise EdgeListError("expected 'u v'", no)
        try:
            u, v = int(parts[0]), int(parts[1])
        except ValueError:
            raise EdgeListError("vertex labels must be integers", no) from None
        if u < 0 or v < 0:
            raise EdgeListError("negative vertex label", no)
        if u == v:
            raise EdgeListError(f"self-loop at {u}", no)
        raw.append((no, min(u, v), max(u, v)))
    labels = sorted({x for _, u, v in raw for x in (u, v)})
    relabel = None
    if labels and labels[-1] >= n:
        if len(labels) > n:
            raise EdgeListError(f"{len(labels)} distinct labels do not fit in n={n}")
        relabel = {x: i for i, x in enumerate(labels)}
        log.warning("edge list labels exceed n-1; relabelled %d labels to 0..%d", len(labels), len(labels) - 1)
    g = Graph(n)
    for no, u, v in raw:
        if relabel is not None:
            u, v = relabel[u], relabel[v]
        if not g.add_edge(u, v):
            raise EdgeListError(f"duplicate edge ({u}, {v})", no)
    return g


def read_edgelist(path: str | Path) -> Graph:
    return parse_edgelist(Path(path).read_text(encoding="utf-8"))


def format_edgelist(g: Graph) -> str:
    edges = g.edges()
    out = [f"{g.n} {len(edges)}"]
    out.extend(f"{u} {v}" for u, v in edges)
    return "\n".join(out) + "\n"


def write_edgelist(g: Graph, path: str | Path) -> None:
    Path(path).write_text(format_edgelist(g), encoding="utf-8")


def stats_json(g: Graph, stats: TriangleStats | None = None) -> str:
    stats = stats or triangle_stats(g)
    return json.dumps({"n": g.n, "edges": g.num_edges, "triangles": stats.total, "vt": stats.vt})
