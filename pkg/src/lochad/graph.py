"""Immutable simple graphs, neighbourhood queries and colouring checks."""
from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from typing import Iterable, Mapping, Sequence

import numpy as np

from . import _kernels


class GraphError(ValueError):
    """Raised for malformed graph input (loops, duplicate edges, bad ids)."""


class Graph:
    """Simple undirected graph on dense vertex ids ``0..n-1``.

    Edges are stored canonically as sorted ``(u, v)`` pairs with ``u < v``.
    Instances are immutable and hashable by value.
    """

    def __init__(self, n: int, edges: Iterable[tuple[int, int]] = ()):
        if n < 0:
            raise GraphError(f"negative vertex count {n}")
        adj: list[set[int]] = [set() for _ in range(n)]
        canon = []
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise GraphError(f"loop at vertex {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise GraphError(f"edge ({u}, {v}) out of range for n={n}")
            if v in adj[u]:
                raise GraphError(f"duplicate edge ({u}, {v})")
            adj[u].add(v)
            adj[v].add(u)
            canon.append((u, v) if u < v else (v, u))
        canon.sort()
        self.n = n
        self.edges: tuple[tuple[int, int], ...] = tuple(canon)
        self.adj: tuple[frozenset[int], ...] = tuple(frozenset(a) for a in adj)

    @classmethod
    def from_adjacency(cls, adj: Sequence[Iterable[int]]) -> "Graph":
        edges = {(u, v) if u < v else (v, u) for u, nb in enumerate(adj) for v in nb}
        return cls(len(adj), sorted(edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={len(self.edges)})"

    def __eq__(self, other) -> bool:
        return isinstance(other, Graph) and self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    @property
    def m(self) -> int:
        return len(self.edges)

    def degree(self, v: int) -> int:
        return len(self.adj[v])

    def neighbours(self, v: int) -> frozenset[int]:
        return self.adj[v]

    def has_edge(self, u: int, v: int) -> bool:
        return v in self.adj[u]

    def degrees(self) -> list[int]:
        return [len(a) for a in self.adj]

    @cached_property
    def csr(self) -> tuple[np.ndarray, np.ndarray]:
        indptr = np.zeros(self.n + 1, dtype=np.int64)
        for v, a in enumerate(self.adj):
            indptr[v + 1] = indptr[v] + len(a)
        indices = np.empty(indptr[-1], dtype=np.int64)
        for v, a in enumerate(self.adj):
            indices[indptr[v]:indptr[v + 1]] = sorted(a)
        return indptr, indices

    def check_vertex(self, v: int) -> None:
        if not (0 <= v < self.n):
            raise GraphError(f"vertex {v} out of range for n={self.n}")

    def induced(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        """Induced subgraph relabelled to ``0..k-1`` in ascending id order.

        Returns the subgraph and the list mapping new ids to old ids.
        """
        ids = sorted(set(vertices))
        index = {v: i for i, v in enumerate(ids)}
        edges = []
        for v in ids:
            iv = index[v]
            for w in self.adj[v]:
                iw = index.get(w)
                if iw is not None and iv < iw:
                    edges.append((iv, iw))
        return Graph(len(ids), edges), ids

    def delete_vertices(self, vertices: Iterable[int]) -> tuple["Graph", list[int]]:
        gone = set(vertices)
        return self.induced(v for v in range(self.n) if v not in gone)

    def components(self) -> list[list[int]]:
        seen = [False] * self.n
        comps = []
        for s in range(self.n):
            if seen[s]:
                continue
            seen[s] = True
            comp = [s]
            queue = deque([s])
            while queue:
                u = queue.popleft()
                for w in self.adj[u]:
                    if not seen[w]:
                        seen[w] = True
                        comp.append(w)
                        queue.append(w)
            comps.append(sorted(comp))
        return comps


@dataclass(frozen=True)
class VertexSet:
    """Sorted duplicate-free vertex ids, bounds-checked against a host size."""

    ids: tuple[int, ...]
    n: int

    def __post_init__(self):
        if any(b <= a for a, b in zip(self.ids, self.ids[1:])):
            raise GraphError("vertex set must be strictly sorted")
        if self.ids and (self.ids[0] < 0 or self.ids[-1] >= self.n):
            raise GraphError(f"vertex ids out of range for n={self.n}")

    @classmethod
    def of(cls, g: Graph, vertices: Iterable[int]) -> "VertexSet":
        return cls(tuple(sorted(set(vertices))), g.n)

    def __iter__(self):
        return iter(self.ids)

    def __len__(self):
        return len(self.ids)

    def __contains__(self, v) -> bool:
        # ids are sorted; a set lookup is cheaper for repeated queries
        return v in self.as_set

    @cached_property
    def as_set(self) -> frozenset[int]:
        return frozenset(self.ids)


def _ids(s) -> frozenset[int]:
    if isinstance(s, VertexSet):
        return s.as_set
    return frozenset(s)


def ball(g: Graph, v: int, r: int) -> VertexSet:
    """Vertices at distance at most ``r`` from ``v`` (always includes ``v``)."""
    g.check_vertex(v)
    if r < 0:
        raise ValueError("radius must be non-negative")
    indptr, indices = g.csr
    dist = np.full(g.n, -1, dtype=np.int64)
    order = _kernels.bfs_within(indptr, indices, v, r, dist)
    return VertexSet(tuple(sorted(int(x) for x in order)), g.n)


def distances_from(g: Graph, v: int) -> dict[int, int]:
    dist = {v: 0}
    queue = deque([v])
    while queue:
        u = queue.popleft()
        for w in g.adj[u]:
            if w not in dist:
                dist[w] = dist[u] + 1
                queue.append(w)
    return dist


def boundary_and_coboundary(g: Graph, s) -> tuple[VertexSet, VertexSet]:
    inside = _ids(s)
    for v in inside:
        g.check_vertex(v)
    bd, cobd = set(), set()
    for v in inside:
        for w in g.adj[v]:
            if w not in inside:
                bd.add(v)
                cobd.add(w)
    return VertexSet.of(g, bd), VertexSet.of(g, cobd)


def is_connected_set(adj: Sequence[Iterable[int]] | Mapping[int, Iterable[int]], s) -> bool:
    inside = _ids(s)
    if not inside:
        return False
    start = next(iter(inside))
    seen = {start}
    stack = [start]
    while stack:
        u = stack.pop()
        for w in adj[u]:
            if w in inside and w not in seen:
                seen.add(w)
                stack.append(w)
    return len(seen) == len(inside)


def is_pocket(g: Graph, s, cap: int) -> bool:
    """``s`` is connected, has at most ``cap`` vertices, each of host degree at most ``cap``."""
    inside = _ids(s)
    if not inside:
        raise ValueError("a pocket must be non-empty")
    if len(inside) > cap:
        return False
    if any(len(g.adj[v]) > cap for v in inside):
        return False
    return is_connected_set(g.adj, inside)


def is_deep(g: Graph, s, k: int) -> bool:
    """Non-empty coboundary of size at most ``|s| / k`` (exact rational test)."""
    inside = _ids(s)
    if not inside:
        raise ValueError("s must be non-empty")
    _, cobd = boundary_and_coboundary(g, inside)
    if len(cobd) == 0:
        return False
    return Fraction(len(cobd)) <= Fraction(len(inside), k)


@dataclass
class ListAssignment:
    """Per-vertex colour lists drawn from ``range(universe)``."""

    lists: dict[int, tuple[int, ...]]
    universe: int

    def __post_init__(self):
        norm = {}
        for v, lst in self.lists.items():
            cols = tuple(sorted(set(int(c) for c in lst)))
            if len(cols) != len(lst):
                raise ValueError(f"list of vertex {v} has repeated colours")
            if cols and (cols[0] < 0 or cols[-1] >= self.universe):
                raise ValueError(f"list of vertex {v} leaves the universe {self.universe}")
            norm[int(v)] = cols
        self.lists = norm

    def __getitem__(self, v: int) -> tuple[int, ...]:
        return self.lists[v]

    def min_size(self) -> int:
        return min((len(x) for x in self.lists.values()), default=0)

    def check_covers(self, g: Graph, allow_empty: bool = False) -> None:
        for v in range(g.n):
            if v not in self.lists:
                raise ValueError(f"vertex {v} has no list")
            if not allow_empty and not self.lists[v]:
                raise ValueError(f"vertex {v} has an empty list")

    @classmethod
    def uniform(cls, n: int, k: int) -> "ListAssignment":
        return cls({v: tuple(range(k)) for v in range(n)}, max(k, 1))


@dataclass
class Colouring:
    colors: dict[int, int] = field(default_factory=dict)

    def is_total(self, n: int) -> bool:
        return all(v in self.colors for v in range(n))

    def __getitem__(self, v: int) -> int:
        return self.colors[v]


@dataclass(frozen=True)
class ColouringVerdict:
    ok: bool
    kind: str | None = None       # "edge" or "list"
    edge: tuple[int, int] | None = None
    vertex: int | None = None

    def __bool__(self) -> bool:
        return self.ok


class PartialColouringError(ValueError):
    pass


def verify_colouring(g: Graph, phi: Colouring | Mapping[int, int], lists: ListAssignment | None = None) -> ColouringVerdict:
    """Check a total colouring edge by edge, then list membership vertex by vertex."""
    colors = phi.colors if isinstance(phi, Colouring) else phi
    missing = [v for v in range(g.n) if v not in colors]
    if missing:
        raise PartialColouringError(f"colouring undefined on vertex {missing[0]}")
    for u, v in g.edges:
        if colors[u] == colors[v]:
            return ColouringVerdict(False, "edge", edge=(u, v))
    if lists is not None:
        for v in range(g.n):
            if colors[v] not in lists.lists.get(v, ()):
                return ColouringVerdict(False, "list", vertex=v)
    return ColouringVerdict(True)
