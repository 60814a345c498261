import sys
from pathlib import Path

import pytest
from hypothesis import strategies as st

sys.path.insert(0, str(Path(__file__).parent))

from icnstretch.mdp import StretchEnv
from icnstretch.topology import Topology, build_default_topology

ACCEPTANCE_LINES = []


@pytest.fixture
def grid():
    return build_default_topology()


@pytest.fixture
def env(grid):
    return StretchEnv(grid)


@st.composite
def connected_graphs(draw, min_n=2, max_n=9):
    """(n, edges) for a random connected graph: random spanning tree plus extra links."""
    n = draw(st.integers(min_n, max_n))
    labels = draw(st.permutations(range(1, n + 1)))
    edges = set()
    for i in range(1, n):
        parent = draw(st.integers(0, i - 1))
        edges.add(tuple(sorted((labels[i], labels[parent]))))
    pairs = [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)]
    extra = draw(st.lists(st.sampled_from(pairs), max_size=n)) if n > 1 else []
    edges.update(extra)
    return n, sorted(edges)


@st.composite
def topologies(draw, min_n=2, max_n=9):
    n, edges = draw(connected_graphs(min_n, max_n))
    return Topology.from_edges(n, edges)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
