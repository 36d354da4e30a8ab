"""Minor containment, K_t-minor-freeness and width-2 tree decompositions."""
from __future__ import annotations

import heapq

from dataclasses import dataclass
from itertools import combinations

from networkx.algorithms.isomorphism import GraphMatcher
import networkx as nx

from .graph import Graph, ball, is_connected_set

DEFAULT_BUDGET = 10**7


class BudgetExceeded(RuntimeError):
    """The search expanded more nodes than allowed; the answer is unknown."""

    def __init__(self, expanded: int):
        super().__init__(f"minor search budget exhausted after {expanded} nodes")
        self.expanded = expanded


@dataclass(frozen=True)
class MinorModel:
    pattern: Graph
    branch_sets: tuple[tuple[int, ...], ...]
    name: str = ""

    def to_doc(self) -> dict:
        return {"pattern": self.name or f"H{self.pattern.n}",
                "branch_sets": [list(b) for b in self.branch_sets]}


def clique(t: int) -> Graph:
    return Graph(t, list(combinations(range(t), 2)))


def validate_minor_model(host: Graph, model: MinorModel) -> bool:
    """Disjoint, connected branch sets with a host edge for every pattern edge."""
    sets = model.branch_sets
    if len(sets) != model.pattern.n:
        return False
    owner = {}
    for i, b in enumerate(sets):
        if not b:
            return False
        for v in b:
            if not (0 <= v < host.n) or v in owner:
                return False
            owner[v] = i
        if not is_connected_set(host.adj, b):
            return False
    touching = set()
    for u, v in host.edges:
        a, b = owner.get(u), owner.get(v)
        if a is not None and b is not None and a != b:
            touching.add((min(a, b), max(a, b)))
    return all(e in touching for e in model.pattern.edges)


def _find_clique(adj: dict[int, set[int]], t: int) -> list[int] | None:
    cand = sorted((v for v in adj if len(adj[v]) >= t - 1), key=lambda v: -len(adj[v]))

    def extend(chosen: list[int], pool: list[int]) -> list[int] | None:
        if len(chosen) == t:
            return chosen
        for i, v in enumerate(pool):
            if len(chosen) + len(pool) - i < t:
                return None
            rest = [w for w in pool[i + 1:] if w in adj[v]]
            got = extend(chosen + [v], rest)
            if got:
                return got
        return None

    return extend([], cand)


class _MinorSearch:
    def __init__(self, pattern: Graph, budget: int):
        self.pattern = pattern
        self.budget = budget
        self.expanded = 0
        self.p_n = pattern.n
        self.p_m = pattern.m
        degs = pattern.degrees()
        self.delta = min(degs) if degs else 0
        self.is_clique = pattern.m == self.p_n * (self.p_n - 1) // 2
        self.p_connected = pattern.n <= 1 or len(pattern.components()) == 1
        self.failed: set = set()
        self.p_nx = nx.Graph()
        self.p_nx.add_nodes_from(range(pattern.n))
        self.p_nx.add_edges_from(pattern.edges)

    def _tick(self):
        self.expanded += 1
        if self.expanded > self.budget:
            raise BudgetExceeded(self.expanded)

    def _embed(self, adj) -> list[int] | None:
        if self.is_clique:
            return _find_clique(adj, self.p_n)
        host = nx.Graph()
        host.add_nodes_from(adj)
        host.add_edges_from((u, v) for u in adj for v in adj[u] if u < v)
        gm = GraphMatcher(host, self.p_nx)
        for mapping in gm.subgraph_monomorphisms_iter():
            inv = {p: h for h, p in mapping.items()}
            return [inv[i] for i in range(self.p_n)]
        return None

    @staticmethod
    def _contract(adj, bags, v, u):
        """Merge ``v`` into ``u``."""
        for w in adj[v]:
            if w != u:
                adj[w].discard(v)
                adj[w].add(u)
                adj[u].add(w)
        adj[u].discard(v)
        del adj[v]
        bags[u] = bags[u] | bags[v]
        del bags[v]

    @staticmethod
    def _delete(adj, bags, v):
        for w in adj[v]:
            adj[w].discard(v)
        del adj[v]
        del bags[v]

    def _reduce(self, adj, bags):
        if not self.p_connected or self.delta < 2:
            return
        changed = True
        while changed:
            changed = False
            for v in sorted(adj):
                if v not in adj:
                    continue
                d = len(adj[v])
                if d <= 1:
                    self._delete(adj, bags, v)
                    changed = True
                elif d == 2 and self.delta >= 3:
                    a = min(adj[v])
                    self._contract(adj, bags, v, a)
                    changed = True

    def search(self, adj: dict[int, set[int]], bags: dict[int, frozenset[int]]):
        self._tick()
        self._reduce(adj, bags)
        if len(adj) < self.p_n:
            return None
        m = sum(len(a) for a in adj.values()) // 2
        if m < self.p_m:
            return None
        key = (frozenset(adj), frozenset((u, v) for u in adj for v in adj[u] if u < v))
        if key in self.failed:
            return None
        if self.p_connected:
            comps = _components(adj)
            if len(comps) > 1:
                for comp in comps:
                    sub = {v: set(adj[v]) for v in comp}
                    got = self.search(sub, {v: bags[v] for v in comp})
                    if got is not None:
                        return got
                self.failed.add(key)
                return None
        emb = self._embed(adj)
        if emb is not None:
            return [bags[x] for x in emb]
        low = min(adj, key=lambda v: (len(adj[v]), v))
        if self.p_connected and len(adj[low]) < self.delta:
            # a low-degree vertex is either unused or merged with a neighbour
            branches = [("del", low, None)] + [("con", low, u) for u in sorted(adj[low])]
        else:
            u = min(adj[low], key=lambda w: (len(adj[low] & adj[w]), len(adj[w]), w))
            branches = [("con", low, u), ("cut", low, u)]
        for kind, v, u in branches:
            a2 = {x: set(s) for x, s in adj.items()}
            b2 = dict(bags)
            if kind == "del":
                self._delete(a2, b2, v)
            elif kind == "con":
                self._contract(a2, b2, v, u)
            else:
                a2[v].discard(u)
                a2[u].discard(v)
            got = self.search(a2, b2)
            if got is not None:
                return got
        self.failed.add(key)
        return None


def _components(adj) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for s in sorted(adj):
        if s in seen:
            continue
        seen.add(s)
        comp, stack = [s], [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(comp)
    return out


def has_minor(host: Graph, pattern: Graph, budget: int = DEFAULT_BUDGET, name: str = "") -> MinorModel | None:
    """Return a validated model of ``pattern`` in ``host``, or None if there is none.

    Raises :class:`BudgetExceeded` when more than ``budget`` search nodes
    are expanded; that outcome means "unknown", never "no".
    """
    if pattern.n == 0:
        raise ValueError("pattern must be non-empty")
    if not name and pattern.m == pattern.n * (pattern.n - 1) // 2:
        name = f"K{pattern.n}"
    search = _MinorSearch(pattern, budget)
    adj = {v: set(host.adj[v]) for v in range(host.n)}
    bags = {v: frozenset((v,)) for v in range(host.n)}
    sets = search.search(adj, bags)
    if sets is None:
        return None
    model = MinorModel(pattern, tuple(tuple(sorted(b)) for b in sets), name)
    if not validate_minor_model(host, model):  # pragma: no cover - search invariant
        raise AssertionError("minor search produced an invalid model")
    return model


def is_forest(g: Graph) -> bool:
    return g.m == g.n - len(g.components())


def sp_elimination(g: Graph) -> list[tuple[int, tuple[int, ...]]] | None:
    """Eliminate vertices of degree <= 2, joining the two neighbours of a degree-2 vertex.

    Returns ``[(v, later_neighbours), ...]`` when everything is eliminated
    (exactly the K4-minor-free graphs), else None.
    """
    adj = [set(a) for a in g.adj]
    alive = [True] * g.n
    stack = sorted((v for v in range(g.n) if len(adj[v]) <= 2), reverse=True)
    order = []
    while stack:
        v = stack.pop()
        if not alive[v] or len(adj[v]) > 2:
            continue
        nbrs = tuple(sorted(adj[v]))
        order.append((v, nbrs))
        alive[v] = False
        for w in nbrs:
            adj[w].discard(v)
        if len(nbrs) == 2:
            a, b = nbrs
            adj[a].add(b)
            adj[b].add(a)
        for w in nbrs:
            if len(adj[w]) <= 2:
                stack.append(w)
    return order if len(order) == g.n else None


def is_kt_minor_free(g: Graph, t: int, budget: int = DEFAULT_BUDGET) -> bool | None:
    """Exact for t = 3 (acyclicity) and t = 4 (series-parallel reduction);
    budgeted search for t = 5, returning None when the budget runs out."""
    if t == 3:
        return is_forest(g)
    if t == 4:
        return sp_elimination(g) is not None
    if t == 5:
        try:
            return has_minor(g, clique(5), budget) is None
        except BudgetExceeded:
            return None
    raise ValueError("t must be 3, 4 or 5")


@dataclass(frozen=True)
class LocalCheck:
    free: bool | None
    vertex: int | None = None
    model: MinorModel | None = None

    def to_doc(self) -> dict:
        verdict = {True: "free", False: "has-minor", None: "unknown"}[self.free]
        doc = {"verdict": verdict, "vertex": self.vertex}
        if self.model is not None:
            doc["witness"] = self.model.to_doc()
        return doc


def is_locally_minor_free(g: Graph, t: int, r: int, budget: int = DEFAULT_BUDGET) -> LocalCheck:
    """Check that every radius-``r`` ball is K_t-minor-free.

    A definite violation at the smallest vertex id wins over budget
    exhaustion elsewhere; otherwise the first undecided vertex is reported.
    """
    if r < 0:
        raise ValueError("radius must be non-negative")
    seen: dict[tuple[int, ...], bool | None] = {}
    first_unknown = None
    for v in range(g.n):
        ids = ball(g, v, r).ids
        if ids not in seen:
            sub, _ = g.induced(ids)
            seen[ids] = is_kt_minor_free(sub, t, budget)
        verdict = seen[ids]
        if verdict is False:
            sub, back = g.induced(ids)
            try:
                m = has_minor(sub, clique(t), budget)
            except BudgetExceeded:
                m = None
            model = None
            if m is not None:
                model = MinorModel(m.pattern, tuple(tuple(back[x] for x in b) for b in m.branch_sets), m.name)
            return LocalCheck(False, v, model)
        if verdict is None and first_unknown is None:
            first_unknown = v
    if first_unknown is not None:
        return LocalCheck(None, first_unknown)
    return LocalCheck(True)


@dataclass(frozen=True)
class TreeDecomposition:
    tree: Graph
    bags: tuple[tuple[int, ...], ...]

    @property
    def width(self) -> int:
        return max((len(b) for b in self.bags), default=0) - 1


def decomposition_violations(g: Graph, td: TreeDecomposition) -> list[str]:
    """Empty list iff ``td`` is a tree decomposition of ``g``."""
    out = []
    t = td.tree
    if t.n != len(td.bags):
        out.append("bag count differs from tree size")
        return out
    if t.n == 0 or t.m != t.n - 1 or len(t.components()) != 1:
        out.append("decomposition tree is not a tree")
        return out
    holders: dict[int, list[int]] = {v: [] for v in range(g.n)}
    for i, b in enumerate(td.bags):
        for v in b:
            if v not in holders:
                out.append(f"bag {i} holds unknown vertex {v}")
            else:
                holders[v].append(i)
    for v, hs in holders.items():
        if not hs:
            out.append(f"vertex {v} in no bag")
        elif not is_connected_set(t.adj, hs):
            out.append(f"bags holding vertex {v} are not connected")
    bagsets = [set(b) for b in td.bags]
    for u, v in g.edges:
        if not any(u in b and v in b for b in bagsets):
            out.append(f"edge ({u}, {v}) in no bag")
    return out


def _leaf_elimination(g: Graph) -> list[tuple[int, tuple[int, ...]]]:
    adj = [set(a) for a in g.adj]
    heap = [v for v in range(g.n) if len(adj[v]) <= 1]
    heapq.heapify(heap)
    done = [False] * g.n
    order = []
    while heap:
        v = heapq.heappop(heap)
        if done[v]:
            continue
        done[v] = True
        later = tuple(sorted(adj[v]))
        order.append((v, later))
        for w in later:
            adj[w].discard(v)
            if len(adj[w]) <= 1:
                heapq.heappush(heap, w)
    return order


def tree_decomposition_w2(g: Graph) -> TreeDecomposition | None:
    """Width <= 2 decomposition from the series-parallel elimination order.

    Forests are eliminated leaf by leaf instead, which gives width <= 1.
    """
    order = _leaf_elimination(g) if is_forest(g) else sp_elimination(g)
    if order is None:
        return None
    if g.n == 0:
        return TreeDecomposition(Graph(1), ((),))
    pos = {v: i for i, (v, _) in enumerate(order)}
    bags = []
    edges = []
    roots = []
    for i, (v, later) in enumerate(order):
        bags.append(tuple(sorted((v,) + later)))
        if later:
            edges.append((i, min(pos[w] for w in later)))
        else:
            roots.append(i)
    edges += list(zip(roots, roots[1:]))
    return TreeDecomposition(Graph(len(bags), edges), tuple(bags))


def make_smooth(td: TreeDecomposition, k: int) -> TreeDecomposition:
    """Every bag gets exactly k+1 vertices and adjacent bags share exactly k."""
    if td.width > k:
        raise ValueError(f"decomposition width {td.width} exceeds {k}")
    bags = {i: set(b) for i, b in enumerate(td.bags)}
    nbrs = {i: set(td.tree.adj[i]) for i in range(td.tree.n)}

    def merge(keep: int, gone: int):
        for w in nbrs.pop(gone):
            if w != keep:
                nbrs[w].discard(gone)
                nbrs[w].add(keep)
                nbrs[keep].add(w)
        nbrs[keep].discard(gone)
        del bags[gone]

    while True:
        merged = False
        for x in sorted(nbrs):
            if x not in nbrs:
                continue
            for y in sorted(nbrs[x]):
                if bags[y] <= bags[x]:
                    merge(x, y)
                    merged = True
                elif bags[x] <= bags[y]:
                    merge(y, x)
                    merged = True
                    break
        if merged:
            continue
        small = [x for x in sorted(bags) if len(bags[x]) < k + 1]
        if not small:
            break
        x = small[0]
        if not nbrs[x]:
            raise ValueError("graph has fewer than k+1 vertices; no k-smooth decomposition")
        y = min(nbrs[x])
        bags[x].add(min(bags[y] - bags[x]))
    ids = sorted(bags)
    index = {x: i for i, x in enumerate(ids)}
    out_bags = [tuple(sorted(bags[x])) for x in ids]
    out_edges = []
    for x in ids:
        for y in nbrs[x]:
            if x >= y:
                continue
            shared = bags[x] & bags[y]
            if len(shared) == k:
                out_edges.append((index[x], index[y]))
                continue
            cur = set(bags[x])
            outgoing = sorted(bags[x] - bags[y])
            incoming = sorted(bags[y] - bags[x])
            prev = index[x]
            for a, b in zip(outgoing[:-1], incoming[:-1]):
                cur = (cur - {a}) | {b}
                out_bags.append(tuple(sorted(cur)))
                node = len(out_bags) - 1
                out_edges.append((prev, node))
                prev = node
            out_edges.append((prev, index[y]))
    return TreeDecomposition(Graph(len(out_bags), out_edges), tuple(out_bags))
