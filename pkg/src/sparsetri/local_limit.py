"""Rooted neighbourhood censuses and the Poisson Galton-Watson local limit.

A depth-r neighbourhood is the subgraph induced on the ball of radius r
around a root.  Its isomorphism class is encoded as a string:

* ``T...``: a tree, in AHU form, ``(`` + sorted child codes + ``)``;
* ``G{m}:bits``: any other neighbourhood on m <= 12 vertices, as the minimal
  upper-triangle adjacency string over orderings found by colour refinement
  and individualisation, the root first.

Cyclic neighbourhoods above 12 vertices, and trees above ``tree_cap``
vertices, fall into an overflow bucket that is counted, never dropped.
"""

from __future__ import annotations

import math
from collections import Counter, deque
from dataclasses import dataclass, field

import numpy as np
from scipy.stats import poisson

from .graph import ErParams, Graph, sample_er
from .rng import make_rng
from .tails import conditioned_samples

GRAPH_CAP = 12
TREE_CAP = 10_000
OVERFLOW = "overflow"


# -- canonical codes --------------------------------------------------------


def ball(g: Graph, root: int, r: int, limit: int | None = None) -> dict[int, int] | None:
    """Vertex -> distance for the radius-r ball, or None once it exceeds ``limit``."""
    dist = {root: 0}
    queue = deque([root])
    while queue:
        x = queue.popleft()
        if dist[x] == r:
            continue
        for y in g.adj[x]:
            if y not in dist:
                dist[y] = dist[x] + 1
                if limit is not None and len(dist) > limit:
                    return None
                queue.append(y)
    return dist


def _tree_code(children: dict[int, list[int]], root: int) -> str:
    order = [root]
    for x in order:
        order.extend(children[x])
    code: dict[int, str] = {}
    for x in reversed(order):
        code[x] = "(" + "".join(sorted(code[c] for c in children[x])) + ")"
    return "T" + code[root]


def _refine(nbrs: list[list[int]], colors: list[int]) -> list[int]:
    """Colour refinement; colours are ranks of signatures, so the result is label-free."""
    while True:
        sig = [(colors[v], tuple(sorted(colors[w] for w in nbrs[v]))) for v in range(len(nbrs))]
        ranks = {s: i for i, s in enumerate(sorted(set(sig)))}
        new = [ranks[s] for s in sig]
        if len(ranks) == len(set(colors)):
            return new
        colors = new


def _canonical_bits(nbrs: list[list[int]], colors: list[int]) -> str:
    m = len(nbrs)
    sets = [set(a) for a in nbrs]
    best = None
    stack = [colors]
    while stack:
        c = _refine(nbrs, stack.pop())
        if len(set(c)) == m:
            order = sorted(range(m), key=c.__getitem__)
            bits = "".join("1" if order[j] in sets[order[i]] else "0" for i in range(m) for j in range(i + 1, m))
            if best is None or bits < best:
                best = bits
            continue
        sizes = Counter(c)
        target = min(col for col, s in sizes.items() if s > 1)
        cell = [v for v in range(m) if c[v] == target]
        reps = []
        for v in cell:
            # Twins in one cell are swapped by an automorphism, so one branch covers both.
            if not any(sets[v] - {u} == sets[u] - {v} for u in reps):
                reps.append(v)
        for v in reps:
            stack.append([2 * x + (1 if x == target and u != v else 0) for u, x in enumerate(c)])
    return best


def neighborhood_code(
    g: Graph, root: int, r: int, graph_cap: int = GRAPH_CAP, tree_cap: int = TREE_CAP
) -> str:
    """Canonical code of the depth-r neighbourhood of ``root``, or ``OVERFLOW``."""
    dist = ball(g, root, r, limit=max(graph_cap, tree_cap))
    if dist is None:
        return OVERFLOW
    verts = list(dist)
    inside = set(verts)
    edges = sum(len(g.adj[x] & inside) for x in verts) // 2
    if edges == len(verts) - 1:
        if len(verts) > tree_cap:
            return OVERFLOW
        children = {x: [y for y in g.adj[x] if dist.get(y, -1) == dist[x] + 1] for x in verts}
        return _tree_code(children, root)
    if len(verts) > graph_cap:
        return OVERFLOW
    local = {x: i for i, x in enumerate(verts)}
    nbrs = [[local[y] for y in g.adj[x] if y in inside] for x in verts]
    colors = [dist[x] for x in verts]
    return f"G{len(verts)}:" + _canonical_bits(nbrs, colors)


def decode_code(code: str) -> tuple[Graph, int]:
    """Rebuild a representative rooted graph (root 0) from a code."""
    if code.startswith("T"):
        s = code[1:]
        g_edges, stack, nxt = [], [], 0
        for ch in s:
            if ch == "(":
                if stack:
                    g_edges.append((stack[-1], nxt))
                stack.append(nxt)
                nxt += 1
            elif ch == ")":
                stack.pop()
            else:
                raise ValueError(f"bad tree code {code!r}")
        if stack:
            raise ValueError(f"unbalanced tree code {code!r}")
        return Graph(nxt, g_edges), 0
    if code.startswith("G"):
        head, bits = code[1:].split(":")
        m = int(head)
        if len(bits) != m * (m - 1) // 2:
            raise ValueError(f"bad graph code {code!r}")
        g = Graph(m)
        b = iter(bits)
        for i in range(m):
            for j in range(i + 1, m):
                if next(b) == "1":
                    g.add_edge(i, j)
        return g, 0
    raise ValueError(f"cannot decode {code!r}")


def root_degree(code: str) -> int:
    g, root = decode_code(code)
    return g.degree(root)


# -- censuses ---------------------------------------------------------------


@dataclass
class NeighborhoodCensus:
    depth: int
    counts: Counter = field(default_factory=Counter)
    sample_size: int = 0
    overflow_count: int = 0

    def add(self, code: str) -> None:
        self.sample_size += 1
        if code == OVERFLOW:
            self.overflow_count += 1
        else:
            self.counts[code] += 1

    def merge(self, other: "NeighborhoodCensus") -> "NeighborhoodCensus":
        if other.depth != self.depth:
            raise ValueError("cannot merge censuses of different depth")
        self.counts.update(other.counts)
        self.sample_size += other.sample_size
        self.overflow_count += other.overflow_count
        return self

    @property
    def entries(self) -> dict[str, float]:
        if not self.sample_size:
            return {}
        return {c: k / self.sample_size for c, k in sorted(self.counts.items())}

    @property
    def overflow(self) -> float:
        return self.overflow_count / self.sample_size if self.sample_size else 0.0

    def distribution(self) -> dict[str, float]:
        """Frequencies with the overflow bucket as one more code."""
        d = dict(self.entries)
        if self.overflow_count:
            d[OVERFLOW] = self.overflow
        return d

    def to_dict(self) -> dict:
        return {
            "depth": self.depth,
            "entries": [{"code": c, "freq": f} for c, f in self.entries.items()],
            "overflow": self.overflow,
            "overflow_count": self.overflow_count,
            "sample_size": self.sample_size,
        }


@dataclass
class ExactCensus:
    """A census given directly as a distribution over codes."""

    depth: int
    probs: dict[str, float]

    def distribution(self) -> dict[str, float]:
        return dict(self.probs)


def neighborhood_census(
    g: Graph,
    r: int,
    vertex_sample: int | None = None,
    seed: int = 0,
    graph_cap: int = GRAPH_CAP,
    tree_cap: int = TREE_CAP,
) -> NeighborhoodCensus:
    """Census of depth-r neighbourhoods over all vertices, or over a uniform
    sample of ``vertex_sample`` distinct vertices."""
    if r < 0:
        raise ValueError("depth must be non-negative")
    if vertex_sample is None:
        roots = range(g.n)
    else:
        if not (1 <= vertex_sample <= g.n):
            raise ValueError("vertex_sample must lie in [1, n]")
        roots = sorted(make_rng(seed, "census-roots").choice(g.n, size=vertex_sample, replace=False).tolist())
    c = NeighborhoodCensus(r)
    for v in roots:
        c.add(neighborhood_code(g, v, r, graph_cap, tree_cap))
    return c


def _gw_code(rng: np.random.Generator, lam: float, r: int, cap: int) -> str:
    """One Poisson(lam) Galton-Watson tree cut at depth r, as a code."""
    levels = [[[]]]  # levels[d][i] = child indices into level d+1
    size = 1
    for d in range(r):
        kids = rng.poisson(lam, size=len(levels[d])) if lam > 0 else np.zeros(len(levels[d]), dtype=int)
        pos = 0
        for i, k in enumerate(kids.tolist()):
            levels[d][i] = list(range(pos, pos + k))
            pos += k
        size += pos
        if size > cap:
            return OVERFLOW
        nxt = [[] for _ in range(pos)]
        levels.append(nxt)
        if not pos:
            break
    codes = ["()"] * len(levels[-1])
    for d in range(len(levels) - 2, -1, -1):
        codes = ["(" + "".join(sorted(codes[j] for j in ch)) + ")" for ch in levels[d]]
    return "T" + codes[0]


def sample_ugw_census(
    lam: float, r: int, samples: int, seed: int = 0, size_cap: int = TREE_CAP
) -> NeighborhoodCensus:
    """Census of ``samples`` Poisson(lam) Galton-Watson trees truncated at depth r."""
    if samples < 1:
        raise ValueError("samples must be positive")
    if lam < 0 or r < 0:
        raise ValueError("need lambda >= 0 and r >= 0")
    rng = make_rng(seed, "ugw", r)
    c = NeighborhoodCensus(r)
    for _ in range(samples):
        c.add(_gw_code(rng, lam, r, size_cap))
    return c


def poisson_star_census(lam: float, max_degree: int) -> ExactCensus:
    """Exact depth-1 law of the Poisson(lam) tree: a star with Poi(lam) leaves.

    Degrees above ``max_degree`` are folded into the overflow bucket.
    """
    probs = {"T(" + "()" * d + ")": float(poisson.pmf(d, lam)) for d in range(max_degree + 1)}
    tail = float(poisson.sf(max_degree, lam))
    if tail > 0:
        probs[OVERFLOW] = tail
    return ExactCensus(1, probs)


def census_tv(c1, c2) -> float:
    """Total variation between two censuses, overflow treated as a code."""
    if c1.depth != c2.depth:
        raise ValueError(f"depth mismatch: {c1.depth} vs {c2.depth}")
    d1, d2 = c1.distribution(), c2.distribution()
    return 0.5 * math.fsum(abs(d1.get(c, 0.0) - d2.get(c, 0.0)) for c in sorted(set(d1) | set(d2)))


@dataclass
class LocalExperiment:
    census_cond: NeighborhoodCensus
    census_uncond: NeighborhoodCensus
    census_ugw: NeighborhoodCensus
    tv: float
    ugw_tv: float
    tries: int


def conditional_local_experiment(
    n: int,
    lam: float,
    k: float,
    r: int,
    graph_samples: int,
    seed: int = 0,
    max_tries: int = 10_000_000,
    ugw_samples: int | None = None,
) -> LocalExperiment:
    """Depth-r censuses of G(n, lam/n) conditioned on T >= k and unconditioned.

    ``ugw_tv`` compares the conditioned census with the Galton-Watson one.
    """
    params = ErParams(n, lam)
    cond, tries = conditioned_samples(n, params.p, "T", k, graph_samples, make_seed(seed, "cond"), max_tries)
    useed = make_seed(seed, "uncond")
    cc, cu = NeighborhoodCensus(r), NeighborhoodCensus(r)
    for g in cond:
        cc.merge(neighborhood_census(g, r))
    for i in range(graph_samples):
        cu.merge(neighborhood_census(sample_er(params, useed, stream=i), r))
    ugw = sample_ugw_census(lam, r, ugw_samples or n * graph_samples, make_seed(seed, "ugw"))
    return LocalExperiment(cc, cu, ugw, census_tv(cc, cu), census_tv(cc, ugw), tries)


def make_seed(seed: int, label: str) -> int:
    """A 63-bit child seed of ``seed`` for a named sub-experiment."""
    return int(make_rng(seed, label).integers(2**63))
