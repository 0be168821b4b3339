"""Brute-force oracles shared by the test modules."""

from __future__ import annotations

from itertools import combinations

import pytest

from sparsetri.graph import Graph


def brute_triangles(g: Graph) -> tuple[int, list[int]]:
    per = [0] * g.n
    total = 0
    for a, b, c in combinations(range(g.n), 3):
        if g.has_edge(a, b) and g.has_edge(a, c) and g.has_edge(b, c):
            total += 1
            per[a] += 1
            per[b] += 1
            per[c] += 1
    return total, per


def brute_cherries(g: Graph) -> int:
    """Paths on three vertices, counted by their middle vertex and end pair."""
    return sum(
        1 for v in range(g.n) for a, b in combinations(range(g.n), 2) if v not in (a, b) and g.has_edge(v, a) and g.has_edge(v, b)
    )


def brute_conditional(g: Graph, n: int, p: float) -> float:
    """Sum over all triples of p^(3 - planted edges in the triple)."""
    total = 0.0
    for a, b, c in combinations(range(n), 3):
        j = g.has_edge(a, b) + g.has_edge(a, c) + g.has_edge(b, c)
        total += p ** (3 - j)
    return total


def all_graphs(n: int):
    m = n * (n - 1) // 2
    for mask in range(1 << m):
        yield Graph.from_mask(n, mask)


_ACCEPTANCE_LINES: list[str] = []


@pytest.fixture
def acceptance_log():
    return _ACCEPTANCE_LINES


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
