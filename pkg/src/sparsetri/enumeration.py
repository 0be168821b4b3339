"""Exhaustive enumeration of all labelled graphs on n <= 8 vertices.

Graphs are encoded as bitmasks over the lexicographic list of pairs (see
``graph.edge_index``).  Statistics are computed vectorised over chunks of
masks; the exact tail and partition-function code only ever needs the joint
histogram ``counts[e, s]`` = #{graphs with e edges and statistic s}.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations

import numpy as np

log = logging.getLogger(__name__)

DEFAULT_CAP = 7
HARD_CAP = 8
_CHUNK = 1 << 20


class EnumerationCapError(ValueError):
    pass


def check_cap(n: int, allow_large: bool = False) -> None:
    cap = HARD_CAP if allow_large else DEFAULT_CAP
    if n > cap:
        hint = "" if allow_large or n > HARD_CAP else " (pass allow_large=True for n=8)"
        raise EnumerationCapError(f"exhaustive enumeration capped at n={cap}, got n={n}{hint}")
    if n == HARD_CAP:
        log.warning("enumerating 2^28 graphs on 8 vertices; this takes minutes")


def _triangle_masks(n: int) -> list[tuple[int, tuple[int, int, int]]]:
    pos = {e: i for i, e in enumerate(combinations(range(n), 2))}
    out = []
    for a, b, c in combinations(range(n), 3):
        m = (1 << pos[(a, b)]) | (1 << pos[(a, c)]) | (1 << pos[(b, c)])
        out.append((m, (a, b, c)))
    return out


def _chunk_stats(masks: np.ndarray, n: int, tris) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    t = np.zeros(masks.shape, dtype=np.int16)
    covered = np.zeros((n,) + masks.shape, dtype=bool)
    for tm, (a, b, c) in tris:
        present = (masks & tm) == tm
        t += present
        covered[a] |= present
        covered[b] |= present
        covered[c] |= present
    edges = np.bitwise_count(masks).astype(np.int16)
    return edges, t, covered.sum(axis=0, dtype=np.int16)


@dataclass(frozen=True)
class GraphTable:
    """Per-mask statistics of every graph on n vertices (mask = array index)."""

    n: int
    edges: np.ndarray
    triangles: np.ndarray
    vt: np.ndarray

    @property
    def num_pairs(self) -> int:
        return self.n * (self.n - 1) // 2


@lru_cache(maxsize=4)
def graph_table(n: int) -> GraphTable:
    """Statistics for all 2^C(n,2) graphs; n <= 7."""
    check_cap(n)
    m = n * (n - 1) // 2
    masks = np.arange(1 << m, dtype=np.uint32)
    e, t, v = _chunk_stats(masks, n, _triangle_masks(n))
    for arr in (e, t, v):
        arr.setflags(write=False)
    return GraphTable(n, e, t, v)


@lru_cache(maxsize=8)
def joint_counts(n: int, statistic: str, allow_large: bool = False) -> np.ndarray:
    """``counts[e, s]``: number of graphs on n vertices with e edges and T (or V_T) = s."""
    if statistic not in ("T", "VT"):
        raise ValueError(f"statistic must be 'T' or 'VT', got {statistic!r}")
    check_cap(n, allow_large)
    m = n * (n - 1) // 2
    smax = math.comb(n, 3) if statistic == "T" else n
    counts = np.zeros((m + 1, smax + 1), dtype=np.int64)
    if n <= DEFAULT_CAP:
        tab = graph_table(n)
        s = tab.triangles if statistic == "T" else tab.vt
        flat = np.bincount(tab.edges.astype(np.int64) * (smax + 1) + s, minlength=counts.size)
        counts += flat.reshape(counts.shape)
    else:
        tris = _triangle_masks(n)
        for start in range(0, 1 << m, _CHUNK):
            masks = np.arange(start, min(start + _CHUNK, 1 << m), dtype=np.uint32)
            e, t, v = _chunk_stats(masks, n, tris)
            s = t if statistic == "T" else v
            flat = np.bincount(e.astype(np.int64) * (smax + 1) + s, minlength=counts.size)
            counts += flat.reshape(counts.shape)
    counts.setflags(write=False)
    return counts


@lru_cache(maxsize=16)
def _tris_cached(n: int):
    return tuple(_triangle_masks(n))


def mask_stats(masks: np.ndarray, n: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """(edges, T, V_T) for an array of graph bitmasks on n vertices."""
    masks = np.asarray(masks)
    return _chunk_stats(masks, n, _tris_cached(n))


def sample_masks(n: int, p: float, size: int, rng: np.random.Generator) -> np.ndarray:
    """``size`` independent G(n, p) graphs as uint64 bitmasks (requires C(n,2) <= 64)."""
    m = n * (n - 1) // 2
    if m > 64:
        raise ValueError("bitmask sampling needs C(n,2) <= 64")
    if m == 0:
        return np.zeros(size, dtype=np.uint64)
    bits = rng.random((size, m)) < p
    weights = np.left_shift(np.uint64(1), np.arange(m, dtype=np.uint64))
    return np.bitwise_or.reduce(np.where(bits, weights, np.uint64(0)), axis=1)


def log_edge_weights(m: int, p: float) -> np.ndarray:
    """log(p^e (1-p)^(m-e)) for e = 0..m, with -inf where the weight vanishes."""
    e = np.arange(m + 1, dtype=float)
    with np.errstate(divide="ignore", invalid="ignore"):
        lp = np.where(e > 0, e * math.log(p) if p > 0 else -np.inf, 0.0)
        lq = np.where(m - e > 0, (m - e) * math.log1p(-p) if p < 1 else -np.inf, 0.0)
    return lp + lq
