"""Deterministic graph families and random list assignments.

All randomness comes from :class:`SplitMix64`, so a given ``(family, sizes,
seed)`` always yields the same canonical edge list on any platform::

    state <- state + 0x9E3779B97F4A7C15            (mod 2**64)
    z <- state
    z <- (z XOR (z >> 30)) * 0xBF58476D1CE4E5B9    (mod 2**64)
    z <- (z XOR (z >> 27)) * 0x94D049BB133111EB    (mod 2**64)
    output z XOR (z >> 31)

``below(m)`` maps an output ``x`` to ``(x * m) >> 64``.
"""
from __future__ import annotations

import heapq
from dataclasses import dataclass, field
from itertools import combinations
from typing import Iterable

from .graph import Graph, ListAssignment

MASK64 = (1 << 64) - 1


class SplitMix64:
    def __init__(self, seed: int):
        self.state = seed & MASK64

    def next(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
        return z ^ (z >> 31)

    def below(self, m: int) -> int:
        if m <= 0:
            raise ValueError("below() needs a positive bound")
        return (self.next() * m) >> 64

    def chance(self, p: float) -> bool:
        return self.next() < int(p * (1 << 64))

    def shuffle(self, items: list) -> list:
        for i in range(len(items) - 1, 0, -1):
            j = self.below(i + 1)
            items[i], items[j] = items[j], items[i]
        return items

    def sample(self, items: Iterable, k: int) -> list:
        pool = list(items)
        if k > len(pool):
            raise ValueError("sample larger than population")
        for i in range(k):
            j = i + self.below(len(pool) - i)
            pool[i], pool[j] = pool[j], pool[i]
        return pool[:k]


@dataclass(frozen=True)
class GenSpec:
    family: str
    n: int | None = None
    t: int | None = None
    k: int | None = None
    seed: int = 0
    knobs: dict = field(default_factory=dict, hash=False)


def _relabel(n: int, edges: Iterable[tuple[int, int]], rng: SplitMix64 | None) -> Graph:
    if rng is None:
        return Graph(n, edges)
    perm = rng.shuffle(list(range(n)))
    return Graph(n, [(perm[u], perm[v]) for u, v in edges])


def necklace(t: int, n: int) -> Graph:
    """``n`` copies of K_t minus an edge chained at their degree-(t-2) ends.

    Copy ``i`` has ends ``b_i = junction i`` and ``a_i = junction i+1``; the
    closing edge joins the two free junctions ``0`` and ``n``.  Junction ids
    come first (``0..n``), then the ``t-2`` inner vertices of each copy.
    """
    if t < 3 or n < 1:
        raise ValueError("necklace needs t >= 3 and n >= 1")
    inner = t - 2
    total = n * (t - 1) + 1
    edges = set()
    for i in range(n):
        core = [n + 1 + i * inner + j for j in range(inner)]
        for u, v in combinations(core, 2):
            edges.add((u, v))
        for c in core:
            edges.add((i, c))
            edges.add((i + 1, c))
    # n == 1 closes the single copy into K_t
    edges.add((0, n))
    return Graph(total, sorted(edges))


def wagner_v8() -> Graph:
    ring = [(i, (i + 1) % 8) for i in range(8)]
    chords = [(i, i + 4) for i in range(4)]
    return Graph(8, ring + chords)


def cycle(n: int) -> Graph:
    return Graph(n, [(i, (i + 1) % n) for i in range(n)]) if n >= 3 else path(n)


def path(n: int) -> Graph:
    return Graph(n, [(i, i + 1) for i in range(n - 1)])


def complete(n: int) -> Graph:
    return Graph(n, list(combinations(range(n), 2)))


def k4_minus_edge() -> Graph:
    """K4 without edge (0, 3): vertices 0 and 3 have degree 2."""
    return Graph(4, [(0, 1), (0, 2), (1, 2), (1, 3), (2, 3)])


def random_tree(n: int, seed: int) -> Graph:
    """Uniform labelled tree via a random Prüfer sequence."""
    if n < 1:
        raise ValueError("tree needs n >= 1")
    if n == 1:
        return Graph(1)
    if n == 2:
        return Graph(2, [(0, 1)])
    rng = SplitMix64(seed)
    seq = [rng.below(n) for _ in range(n - 2)]
    degree = [1] * n
    for x in seq:
        degree[x] += 1
    edges = []
    leaves = [v for v in range(n) if degree[v] == 1]
    heapq.heapify(leaves)
    for x in seq:
        leaf = heapq.heappop(leaves)
        edges.append((leaf, x))
        degree[x] -= 1
        if degree[x] == 1:
            heapq.heappush(leaves, x)
    u, v = heapq.heappop(leaves), heapq.heappop(leaves)
    edges.append((u, v))
    return Graph(n, edges)


def series_parallel_random(n: int, seed: int) -> Graph:
    """Grow a K4-minor-free graph from K2 by subdivisions and length-2 parallel paths.

    Each step picks a uniformly random current edge ``uv`` and, with equal
    probability, either replaces it by ``u-w-v`` or adds ``u-w-v`` beside it.
    Both moves add one vertex and never create multi-edges.  Vertex ids are
    shuffled at the end.
    """
    if n < 2:
        raise ValueError("series-parallel generator needs n >= 2")
    rng = SplitMix64(seed)
    edges: list[tuple[int, int]] = [(0, 1)]
    for w in range(2, n):
        i = rng.below(len(edges))
        u, v = edges[i]
        if rng.below(2) == 0:
            edges[i] = (u, w)
            edges.append((w, v))
        else:
            edges.append((u, w))
            edges.append((w, v))
    return _relabel(n, edges, rng)


def planar_triangulation_random(n: int, seed: int) -> Graph:
    """Maximal planar graph by repeated insertion of a vertex into a random face."""
    if n < 3:
        raise ValueError("triangulation needs n >= 3")
    rng = SplitMix64(seed)
    edges = [(0, 1), (1, 2), (0, 2)]
    faces = [(0, 1, 2), (0, 1, 2)]  # inner and outer face of the triangle
    for w in range(3, n):
        i = rng.below(len(faces))
        a, b, c = faces[i]
        edges += [(a, w), (b, w), (c, w)]
        faces[i] = (a, b, w)
        faces.append((b, c, w))
        faces.append((a, c, w))
    return _relabel(n, edges, rng)


def _is_clique(g: Graph, vs) -> bool:
    return all(g.has_edge(u, v) for u, v in combinations(vs, 2))


def clique_sum(g1: Graph, k1, g2: Graph, k2, drop: Iterable[tuple[int, int]] = ()) -> Graph:
    """Glue ``g2`` onto ``g1`` identifying sorted(k2) with sorted(k1).

    Vertices of ``g1`` keep their ids; the rest of ``g2`` is numbered from
    ``g1.n`` upward in ascending original order.  ``drop`` lists identified
    clique edges (in ``g1`` ids) to delete afterwards.
    """
    s1, s2 = sorted(set(k1)), sorted(set(k2))
    if len(s1) != len(s2):
        raise ValueError("clique sizes differ")
    if not _is_clique(g1, s1) or not _is_clique(g2, s2):
        raise ValueError("clique_sum needs cliques on both sides")
    ident = dict(zip(s2, s1))
    nxt = g1.n
    for v in range(g2.n):
        if v not in ident:
            ident[v] = nxt
            nxt += 1
    edges = set(g1.edges)
    for u, v in g2.edges:
        a, b = ident[u], ident[v]
        edges.add((min(a, b), max(a, b)))
    glued = set(combinations(s1, 2))
    for u, v in drop:
        e = (min(u, v), max(u, v))
        if e not in glued:
            raise ValueError(f"edge {e} is not an identified clique edge")
        edges.discard(e)
    return Graph(nxt, sorted(edges))


def _cliques_upto3(g: Graph) -> list[tuple[int, ...]]:
    out: list[tuple[int, ...]] = [(v,) for v in range(g.n)]
    out += list(g.edges)
    for u, v in g.edges:
        for w in g.adj[u] & g.adj[v]:
            if w > v:
                out.append((u, v, w))
    return out


def wagner_composition_random(blocks: int, n_per_block: int, seed: int,
                              v8_prob: float = 0.25, drop_prob: float = 0.25) -> Graph:
    """Clique-sum random planar triangulations and V8 copies over cliques of size <= 3.

    The output is K5-minor-free by construction.
    """
    if blocks < 1:
        raise ValueError("need at least one block")
    rng = SplitMix64(seed)

    def block() -> Graph:
        if rng.chance(v8_prob):
            return wagner_v8()
        return planar_triangulation_random(max(n_per_block, 3), rng.next())

    g = block()
    for _ in range(blocks - 1):
        h = block()
        arity = 1 + rng.below(3)
        mine = [c for c in _cliques_upto3(g) if len(c) == arity]
        theirs = [c for c in _cliques_upto3(h) if len(c) == arity]
        while not mine or not theirs:
            arity -= 1
            mine = [c for c in _cliques_upto3(g) if len(c) == arity]
            theirs = [c for c in _cliques_upto3(h) if len(c) == arity]
        k1 = mine[rng.below(len(mine))]
        k2 = theirs[rng.below(len(theirs))]
        drop = [e for e in combinations(sorted(k1), 2) if rng.chance(drop_prob)]
        g = clique_sum(g, k1, h, k2, drop)
    return _relabel(g.n, g.edges, rng)


def random_lists(g: Graph, size: int, universe: int, seed: int) -> ListAssignment:
    if size < 0 or size > universe:
        raise ValueError("need 0 <= size <= universe")
    rng = SplitMix64(seed)
    return ListAssignment({v: tuple(sorted(rng.sample(range(universe), size))) for v in range(g.n)}, universe)


FAMILIES = ("necklace", "sp", "planar", "wagner-sum", "v8", "tree", "path", "cycle")


def generate(spec: GenSpec) -> tuple[Graph, dict]:
    """Build a graph from a :class:`GenSpec`; returns it with its metadata block."""
    fam = spec.family
    certified: int | None = None
    if fam == "necklace":
        g = necklace(spec.t or 4, spec.n or 1)
    elif fam == "v8":
        g, certified = wagner_v8(), 5
    elif fam == "sp":
        g, certified = series_parallel_random(spec.n or 2, spec.seed), 4
    elif fam == "planar":
        g, certified = planar_triangulation_random(spec.n or 3, spec.seed), 5
    elif fam == "wagner-sum":
        per = int(spec.knobs.get("n_per_block", 12))
        blocks = spec.k or max(1, round((spec.n or per) / max(per - 2, 1)))
        g, certified = wagner_composition_random(blocks, per, spec.seed), 5
    elif fam == "tree":
        g, certified = random_tree(spec.n or 1, spec.seed), 3
    elif fam == "path":
        g, certified = path(spec.n or 1), 3
    elif fam == "cycle":
        g, certified = cycle(spec.n or 3), 4
    else:
        raise ValueError(f"unknown family {fam!r}")
    meta = {"family": fam, "seed": spec.seed, "certified_minor_free": certified}
    return g, meta
