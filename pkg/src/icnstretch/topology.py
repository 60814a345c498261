"""Router mesh: an immutable undirected graph plus a BFS hop-count oracle.

Routers are numbered 1..n. Neighbor lists are kept in ascending id order
because action index k in the MDP binds to the k-th neighbor.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Iterable, Sequence

from icnstretch.errors import ParseError, UnknownRouter, ValidationError

RouterId = int


@dataclass(frozen=True)
class Topology:
    n: int
    adjacency: tuple[tuple[RouterId, ...], ...]  # index 0 unused; adjacency[r] for r in 1..n

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Topology":
        if n < 1:
            raise ValidationError(f"router count must be >= 1, got {n}")
        adj: list[set[int]] = [set() for _ in range(n + 1)]
        for i, j in edges:
            for r in (i, j):
                if not 1 <= r <= n:
                    raise ValidationError(f"edge ({i}, {j}): router {r} outside 1..{n}")
            if i == j:
                raise ValidationError(f"edge ({i}, {j}): self-loop on router {i}")
            adj[i].add(j)
            adj[j].add(i)
        topo = cls(n, tuple(tuple(sorted(s)) for s in adj))
        topo._check_connected()
        return topo

    def __post_init__(self):
        if len(self.adjacency) != self.n + 1:
            raise ValidationError("adjacency must have n + 1 entries (index 0 unused)")
        for i in range(1, self.n + 1):
            nbrs = self.adjacency[i]
            if i in nbrs:
                raise ValidationError(f"self-loop on router {i}")
            if any(a >= b for a, b in zip(nbrs, nbrs[1:])):
                raise ValidationError(f"neighbors of router {i} not strictly ascending")
            for j in nbrs:
                if not 1 <= j <= self.n:
                    raise ValidationError(f"router {i} lists unknown neighbor {j}")
                if i not in self.adjacency[j]:
                    raise ValidationError(f"link {i}-{j} is not symmetric")

    def _check_connected(self) -> None:
        seen = _bfs_distances(self, 1)
        for r in self.routers:
            if r not in seen:
                raise ValidationError(f"router {r} unreachable from router 1")

    @property
    def routers(self) -> range:
        return range(1, self.n + 1)

    @property
    def max_degree(self) -> int:
        return max(len(self.adjacency[r]) for r in self.routers)

    def check(self, r: RouterId) -> None:
        if not isinstance(r, int) or not 1 <= r <= self.n:
            raise UnknownRouter(r, self.n)

    def neighbors(self, r: RouterId) -> tuple[RouterId, ...]:
        self.check(r)
        return self.adjacency[r]

    def is_adjacent(self, a: RouterId, b: RouterId) -> bool:
        return b in self.adjacency[a]

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in self.routers for j in self.adjacency[i] if i < j]

    def serialize(self) -> str:
        lines = [f"n={self.n}"]
        lines.extend(f"{i} {j}" for i, j in self.edges())
        return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class PathTrace:
    routers: tuple[RouterId, ...]

    @property
    def stretch(self) -> int:
        return len(self.routers) - 1

    @property
    def origin(self) -> RouterId:
        return self.routers[0]

    @property
    def terminus(self) -> RouterId:
        return self.routers[-1]

    def reversed(self) -> "PathTrace":
        return PathTrace(self.routers[::-1])

    def is_valid_in(self, topo: Topology) -> bool:
        return all(topo.is_adjacent(a, b) for a, b in zip(self.routers, self.routers[1:]))


def build_default_topology() -> Topology:
    """3x3 grid, H1..H9 row-major, horizontal and vertical links only."""
    edges = []
    for row in range(3):
        for col in range(3):
            r = 3 * row + col + 1
            if col < 2:
                edges.append((r, r + 1))
            if row < 2:
                edges.append((r, r + 3))
    return Topology.from_edges(9, edges)


def grid_topology(rows: int, cols: int) -> Topology:
    edges = []
    for row in range(rows):
        for col in range(cols):
            r = cols * row + col + 1
            if col < cols - 1:
                edges.append((r, r + 1))
            if row < rows - 1:
                edges.append((r, r + cols))
    return Topology.from_edges(rows * cols, edges)


def complete_topology(n: int) -> Topology:
    return Topology.from_edges(n, [(i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1)])


def load_topology(description: str) -> Topology:
    """Parse the edge-list format.

    First meaningful line is ``n=<count>``; every later non-empty line not
    starting with ``#`` is ``<i> <j>``. Duplicate edges are idempotent.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(description.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if n is None:
            key, sep, value = line.partition("=")
            if not sep or key.strip() != "n":
                raise ParseError(f"line {lineno}: expected 'n=<count>', got {raw!r}")
            try:
                n = int(value.strip())
            except ValueError:
                raise ParseError(f"line {lineno}: router count {value.strip()!r} is not an integer") from None
            if n < 1:
                raise ParseError(f"line {lineno}: router count must be >= 1")
            continue
        parts = line.split()
        if len(parts) != 2:
            raise ParseError(f"line {lineno}: expected '<i> <j>', got {raw!r}")
        try:
            i, j = int(parts[0]), int(parts[1])
        except ValueError:
            raise ParseError(f"line {lineno}: router ids must be decimal integers, got {raw!r}") from None
        if i == j:
            raise ValidationError(f"line {lineno}: self-loop on router {i}")
        for r in (i, j):
            if not 1 <= r <= n:
                raise ValidationError(f"line {lineno}: router {r} outside 1..{n}")
        edges.append((i, j))
    if n is None:
        raise ParseError("missing 'n=<count>' header")
    return Topology.from_edges(n, edges)


def neighbors(topo: Topology, r: RouterId) -> tuple[RouterId, ...]:
    return topo.neighbors(r)


def _bfs_distances(topo: Topology, src: RouterId) -> dict[RouterId, int]:
    dist = {src: 0}
    queue = deque([src])
    while queue:
        u = queue.popleft()
        for v in topo.adjacency[u]:
            if v not in dist:
                dist[v] = dist[u] + 1
                queue.append(v)
    return dist


def shortest_hops(topo: Topology, src: RouterId, dst: RouterId) -> int:
    topo.check(src)
    topo.check(dst)
    return _bfs_distances(topo, src)[dst]


def hops_to_nearest(topo: Topology, src: RouterId, targets: Sequence[RouterId]) -> int:
    """Minimum hop count from ``src`` to any router in ``targets``."""
    dist = _bfs_distances(topo, src)
    return min(dist[t] for t in targets)
