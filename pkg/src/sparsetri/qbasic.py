"""q-basic graphs: extraction, the (V1, V2, V3) decomposition and counting bounds.

A graph with V_T = q is q-basic when deleting any edge strictly lowers V_T.
Removing edge uv destroys the triangles uvw for w in N(u) & N(v), so it keeps
V_T exactly when the common neighbourhood is empty, or when u, v and every
such w still lie in another triangle afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

from scipy.optimize import brentq

from .cores import LogBound
from .graph import Graph, triangle_stats

# The free constant in the edge-parametrised count of q-basic graphs.
EDGE_COUNT_CONSTANT = 1.0

# Below this q the localisation of the entropy minimiser is not checked.
ENTROPY_FLOOR = 1e5


class NotQBasicError(ValueError):
    def __init__(self, edge: tuple[int, int]):
        self.edge = edge
        super().__init__(f"graph is not q-basic: edge {edge} can be deleted without changing V_T")


def _deletable(g: Graph, c: list[int], u: int, v: int) -> bool:
    common = g.adj[u] & g.adj[v]
    k = len(common)
    if k == 0:
        return True
    return c[u] > k and c[v] > k and all(c[w] > 1 for w in common)


def _delete(g: Graph, c: list[int], u: int, v: int) -> None:
    common = g.adj[u] & g.adj[v]
    c[u] -= len(common)
    c[v] -= len(common)
    for w in common:
        c[w] -= 1
    g.remove_edge(u, v)


def first_deletable_edge(g: Graph) -> tuple[int, int] | None:
    c = triangle_stats(g).per_vertex
    for u, v in g.edges():
        if _deletable(g, c, u, v):
            return (u, v)
    return None


def is_qbasic(g: Graph) -> bool:
    return first_deletable_edge(g) is None


def extract_qbasic(g: Graph) -> Graph:
    """Delete V_T-neutral edges in lexicographic order.

    An edge that cannot be deleted has an endpoint or common neighbour whose
    triangles all use it; later deletions preserve V_T, so that vertex keeps a
    triangle and all of them still use the edge.  One pass therefore suffices.
    """
    h = g.copy()
    c = triangle_stats(h).per_vertex
    for u, v in g.edges():
        if _deletable(h, c, u, v):
            _delete(h, c, u, v)
    return h


@dataclass
class QBasicDecomposition:
    v1: list[int]
    v2: list[int]
    v3: list[int]
    triangles1: list[tuple[int, int, int]]
    matching2: list[tuple[int, int]]
    coneighbor2: list[int]
    witness3: list[tuple[int, int]]

    @property
    def configuration(self) -> tuple[int, int, int]:
        return len(self.v1), len(self.v2), len(self.v3)

    def to_dict(self) -> dict:
        return {
            "v1": self.v1,
            "triangles": [list(t) for t in self.triangles1],
            "v2": self.v2,
            "matching": [list(e) for e in self.matching2],
            "coneighbors": self.coneighbor2,
            "v3": self.v3,
            "witnesses": [list(e) for e in self.witness3],
        }


def decompose_qbasic(g: Graph, check: bool = True) -> QBasicDecomposition:
    """Greedy disjoint triangles, then a greedy matching, then the rest.

    Vertices are the non-isolated ones.  Witnesses are the smallest valid
    choice: a common neighbour in V1 for each matching edge, and for each V3
    vertex the smallest neighbour pair inside V1 or across V1 and V2.
    """
    if check:
        bad = first_deletable_edge(g)
        if bad is not None:
            raise NotQBasicError(bad)
    adj = g.adj
    used: set[int] = set()
    tris = []
    for a, b in g.edges():
        if a in used or b in used:
            continue
        for c in sorted(adj[a] & adj[b]):
            if c > b and c not in used:
                tris.append((a, b, c))
                used.update((a, b, c))
                break
    v1 = set(used)

    matching = []
    for a, b in g.edges():
        if a not in used and b not in used:
            matching.append((a, b))
            used.update((a, b))
    v2 = used - v1

    coneighbors = []
    for a, b in matching:
        common = sorted((adj[a] & adj[b]) & v1)
        if not common:
            raise NotQBasicError((a, b))
        coneighbors.append(common[0])

    v3 = sorted(set(g.active_vertices()) - used)
    witnesses = []
    host = v1 | v2
    for x in v3:
        nb = sorted(adj[x] & host)
        w = next(
            ((y, z) for i, y in enumerate(nb) for z in nb[i + 1 :] if z in adj[y] and (y in v1 or z in v1)),
            None,
        )
        if w is None:
            raise NotQBasicError((x, nb[0] if nb else x))
        witnesses.append(w)

    return QBasicDecomposition(sorted(v1), sorted(v2), v3, tris, matching, coneighbors, witnesses)


@dataclass(frozen=True)
class Validation:
    ok: bool
    field: str | None = None
    message: str = ""

    def __bool__(self):
        return self.ok


def _fail(name: str, msg: str) -> Validation:
    return Validation(False, name, msg)


def validate_decomposition(g: Graph, d: QBasicDecomposition) -> Validation:
    """Check a decomposition against the graph, independently of how it was built.

    V1 must be covered by vertex-disjoint triangles of G and V2 by
    vertex-disjoint edges of G.  Extra edges inside V1 or V2 are allowed.
    """
    adj = g.adj
    s1, s2, s3 = set(d.v1), set(d.v2), set(d.v3)
    if len(s1) != len(d.v1) or len(s2) != len(d.v2) or len(s3) != len(d.v3):
        return _fail("partition", "repeated vertex in a part")
    if s1 & s2 or s1 & s3 or s2 & s3:
        return _fail("partition", "parts overlap")
    if s1 | s2 | s3 != set(g.active_vertices()):
        return _fail("partition", "parts do not cover the non-isolated vertices")
    if len(s1) % 3:
        return _fail("v1", "|V1| is not divisible by 3")
    if len(s2) % 2:
        return _fail("v2", "|V2| is odd")

    seen: set[int] = set()
    for t in d.triangles1:
        a, b, c = t
        if not (b in adj[a] and c in adj[a] and c in adj[b]):
            return _fail("triangles1", f"{t} is not a triangle")
        if seen & set(t):
            return _fail("triangles1", f"{t} shares a vertex with an earlier triangle")
        seen.update(t)
    if seen != s1:
        return _fail("triangles1", "triangles do not cover V1 exactly")

    seen = set()
    for e in d.matching2:
        a, b = e
        if b not in adj[a]:
            return _fail("matching2", f"{e} is not an edge")
        if a in seen or b in seen:
            return _fail("matching2", f"{e} is not vertex-disjoint from earlier edges")
        seen.update(e)
    if seen != s2:
        return _fail("matching2", "matching does not cover V2 exactly")

    rest = s2 | s3
    for u in rest:
        for v in adj[u] & rest:
            if v > u and any(w > v for w in adj[u] & adj[v] & rest):
                return _fail("v1", f"triangle through edge ({u}, {v}) avoids V1")
    for u in s3:
        if adj[u] & s3:
            return _fail("v3", f"V3 vertex {u} has a neighbour in V3")

    if len(d.coneighbor2) != len(d.matching2):
        return _fail("coneighbor2", "one co-neighbour per matching edge required")
    for (a, b), w in zip(d.matching2, d.coneighbor2):
        if w not in s1 or w not in adj[a] or w not in adj[b]:
            return _fail("coneighbor2", f"{w} is not a V1 co-neighbour of ({a}, {b})")

    if len(d.witness3) != len(d.v3):
        return _fail("witness3", "one witness edge per V3 vertex required")
    for x, (y, z) in zip(d.v3, d.witness3):
        if z not in adj[y] or y not in adj[x] or z not in adj[x]:
            return _fail("witness3", f"({y}, {z}) does not close a triangle with {x}")
        if not ((y in s1 and z in s1 | s2) or (z in s1 and y in s2)):
            return _fail("witness3", f"witness ({y}, {z}) of {x} is not inside V1 or across V1 and V2")
    return Validation(True)


def edge_accounting_holds(g: Graph, d: QBasicDecomposition) -> bool:
    """e <= l1 + 3/2 l2 + 3 l3 for the configuration of ``d``."""
    l1, l2, l3 = d.configuration
    return 2 * g.num_edges <= 2 * l1 + 3 * l2 + 6 * l3


# -- counting bounds --------------------------------------------------------


def configuration_count_bound(n: int, l1: int, l2: int, l3: int) -> LogBound:
    """log of n^q l1^(l2/2) (3q)^l3 / (3!^(l1/3) (l1/3)! 2!^(l2/2) (l2/2)! l3!)."""
    if l1 % 3 or l2 % 2 or min(l1, l2, l3) < 0:
        raise ValueError("need l1 divisible by 3, l2 even and all parts non-negative")
    q = l1 + l2 + l3
    if l2 and not l1:
        return LogBound(-math.inf, ("V2 is non-empty but V1 has no co-neighbours to offer",))
    t1, t2 = l1 // 3, l2 // 2
    val = q * math.log(n)
    val -= t1 * math.log(6) + math.lgamma(t1 + 1)
    val -= t2 * math.log(2) + math.lgamma(t2 + 1)
    val -= math.lgamma(l3 + 1)
    if t2:
        val += t2 * math.log(l1)
    if l3:
        val += l3 * math.log(3 * q)
    return LogBound(val)


def qbasic_edge_count_bound(n: int, q: int, m: int, C: float = EDGE_COUNT_CONSTANT) -> float:
    """log C + 3 log(3q) + m log n - (q/3) log(q/3) + 16 q."""
    if q < 1 or not (q <= m <= 3 * q):
        raise ValueError(f"need 1 <= q <= m <= 3q, got q={q}, m={m}")
    return math.log(C) + 3 * math.log(3 * q) + m * math.log(n) - q / 3 * math.log(q / 3) + 16 * q


# -- entropy minimisation ---------------------------------------------------


def _xlogx(x: float) -> float:
    return x * math.log(x) if x > 0 else 0.0


def entropy_objective(x1: float, x2: float, x3: float) -> float:
    return _xlogx(x1 / 3) + _xlogx(x2 / 2) + _xlogx(x3)


@dataclass
class EntropySolution:
    q: float
    mu: float
    x1: float
    x2: float
    x3: float
    value: float
    localization_checked: bool
    flags: list[str] = field(default_factory=list)

    @property
    def constraint_residual(self) -> float:
        return abs(self.x1 + self.x2 + self.x3 - self.q) / self.q

    @property
    def stationarity_residual(self) -> float:
        g1 = (math.log(self.x1 / 3) + 1) / 3 - self.mu
        g2 = (math.log(self.x2 / 2) + 1) / 2 - self.mu
        g3 = math.log(self.x3) + 1 - self.mu
        return max(abs(g1), abs(g2), abs(g3))

    @property
    def localization_floor(self) -> float:
        return self.q - self.q ** (2.0 / 3.0) * math.log(self.q)

    @property
    def value_lower_bound(self) -> float:
        L = self.localization_floor
        return L / 3 * math.log(L / 3)


def _constraint(mu: float, q: float) -> float:
    return 3 * math.exp(3 * mu - 1) + 2 * math.exp(2 * mu - 1) + math.exp(mu - 1) - q


def minimize_entropy(q: float, floor: float = ENTROPY_FLOOR) -> EntropySolution:
    """Minimise f(x1,x2,x3) on x1 + x2 + x3 = q through its stationary point.

    The constraint in mu is strictly increasing, so it has one root, bracketed
    between mu = 0 and the root of the x1 term alone, (log(q/3) + 1)/3 + 1.
    """
    if q < 3:
        raise ValueError("minimize_entropy needs q >= 3")
    hi = (math.log(q / 3) + 1) / 3 + 1
    mu = brentq(_constraint, -1.0, hi, args=(float(q),), xtol=1e-15, rtol=4 * 2.0**-52, maxiter=500)
    x1 = 3 * math.exp(3 * mu - 1)
    x2 = 2 * math.exp(2 * mu - 1)
    x3 = math.exp(mu - 1)
    sol = EntropySolution(q, mu, x1, x2, x3, entropy_objective(x1, x2, x3), q >= floor)
    if not sol.localization_checked:
        sol.flags.append(f"q={q:g} below the localisation floor {floor:g}; not checked")
    else:
        if not (sol.localization_floor <= x1 <= q):
            sol.flags.append("x1 outside [q - q^(2/3) log q, q]")
        if sol.value < sol.value_lower_bound:
            sol.flags.append("objective below (L/3) log(L/3)")
    return sol
