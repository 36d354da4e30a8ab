"""r-deletability: list budgets, choosability tests, pocket search and extension."""
from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations
from typing import Mapping, Sequence

import networkx as nx
import numpy as np

from . import _kernels
from .graph import Colouring, Graph, ListAssignment, VertexSet, _ids

EXACT_CAP = 6
EXACT_BUDGET = 200_000


@dataclass(frozen=True)
class DegreeBudget:
    """``f[i]`` is the guaranteed list size of ``vertices[i]`` once outside colours are fixed."""

    vertices: tuple[int, ...]
    f: tuple[int, ...]

    @property
    def feasible(self) -> bool:
        return all(x >= 1 for x in self.f)

    def as_dict(self) -> dict[int, int]:
        return dict(zip(self.vertices, self.f))


@dataclass(frozen=True)
class DeletabilityVerdict:
    decision: str               # "yes" | "no" | "unknown"
    method: str                 # degeneracy | gallai | exact | infeasible | budget-exceeded | too-large
    certificate: dict = field(default_factory=dict, compare=False)

    @property
    def yes(self) -> bool:
        return self.decision == "yes"

    def to_doc(self) -> dict:
        return {"decision": self.decision, "method": self.method, "certificate": self.certificate}


def _degree(adj, v) -> int:
    return len(adj[v])


def list_budget(g: Graph | Sequence | Mapping, s, c: int) -> DegreeBudget:
    adj = g.adj if isinstance(g, Graph) else g
    inside = _ids(s)
    if not inside:
        raise ValueError("list_budget needs a non-empty set")
    vs = tuple(sorted(inside))
    f = []
    for v in vs:
        ext = sum(1 for w in adj[v] if w not in inside)
        f.append(c - ext)
    return DegreeBudget(vs, tuple(f))


def _masks_for(lists: Sequence[Sequence[int]]) -> np.ndarray | None:
    masks = np.zeros(len(lists), dtype=np.uint64)
    for i, lst in enumerate(lists):
        m = 0
        for c in lst:
            if c >= _kernels.MAX_MASK_COLOURS:
                return None
            m |= 1 << c
        masks[i] = m
    return masks


def _backtrack_py(adj: Sequence[Sequence[int]], lists: Sequence[Sequence[int]]) -> list[int] | None:
    """Same search as the compiled kernel, on Python sets (any colour range)."""
    n = len(lists)
    avail = [set(x) for x in lists]
    out = [-1] * n
    if any(not a for a in avail):
        return None

    def pick():
        best, best_c = -1, 1 << 30
        for w in range(n):
            if out[w] < 0 and len(avail[w]) < best_c:
                best, best_c = w, len(avail[w])
        return best

    def rec(depth):
        if depth == n:
            return True
        v = pick()
        for col in sorted(avail[v]):
            saved = [set(a) for a in avail]
            out[v] = col
            ok = True
            for w in adj[v]:
                if out[w] < 0:
                    avail[w].discard(col)
                    if not avail[w]:
                        ok = False
                        break
            if ok and rec(depth + 1):
                return True
            avail[:] = saved
            out[v] = -1
        return False

    return out if rec(0) else None


def colour_small(h: Graph, lists: Sequence[Sequence[int]]) -> list[int] | None:
    """Proper colouring of ``h`` from ``lists`` (indexed by vertex), or None."""
    if h.n == 0:
        return []
    masks = _masks_for(lists)
    if masks is None:
        return _backtrack_py(h.adj, lists)
    indptr, indices = h.csr
    out = np.empty(h.n, dtype=np.int64)
    if not _kernels.colour_backtrack(indptr, indices, masks, out):
        return None
    return [int(x) for x in out]


def list_colour_exhaustive(g: Graph, l: ListAssignment) -> Colouring | None:
    l.check_covers(g, allow_empty=True)
    got = colour_small(g, [l.lists[v] for v in range(g.n)])
    return None if got is None else Colouring({v: c for v, c in enumerate(got)})


def chromatic_number_exact(g: Graph, limit: int) -> int | None:
    """Smallest k <= limit with g k-colourable; None when it exceeds ``limit``."""
    if g.n == 0:
        return 0
    for k in range(1, limit + 1):
        if colour_small(g, [range(k)] * g.n) is not None:
            return k
    return None


# ---------------------------------------------------------------- choosability

def _degeneracy_order(adj: Sequence[set[int]], f: Sequence[int], alive: set[int]) -> tuple[list[int], set[int]]:
    """Peel vertices whose remaining degree is below their budget; returns (order, core)."""
    alive = set(alive)
    deg = {v: sum(1 for w in adj[v] if w in alive) for v in alive}
    order = []
    queue = sorted(v for v in alive if deg[v] < f[v])
    while queue:
        v = queue.pop(0)
        if v not in alive:
            continue
        alive.discard(v)
        order.append(v)
        for w in adj[v]:
            if w in alive:
                deg[w] -= 1
                if deg[w] < f[w] and w not in queue:
                    queue.append(w)
    return order, alive


def _is_gallai_tree(h: nx.Graph) -> bool:
    for block in nx.biconnected_components(h):
        b = h.subgraph(block)
        k = b.number_of_nodes()
        e = b.number_of_edges()
        if e == k * (k - 1) // 2:
            continue
        if k % 2 == 1 and e == k and all(d == 2 for _, d in b.degree()):
            continue
        return False
    return True


def _gallai_safe(adj, f, core: set[int]) -> bool:
    """Every component of ``core`` has f >= degree and is not a Gallai tree."""
    for comp in _components_of(adj, core):
        sub = nx.Graph()
        sub.add_nodes_from(comp)
        for v in comp:
            d = 0
            for w in adj[v]:
                if w in core:
                    d += 1
                    sub.add_edge(v, w)
            if f[v] < d:
                return False
        if _is_gallai_tree(sub):
            return False
    return True


def choosable_sufficient(h: Graph, f: Sequence[int]) -> DeletabilityVerdict:
    """Sound, incomplete: answers yes (with a certificate) or unknown, never no."""
    if any(x < 1 for x in f):
        return DeletabilityVerdict("unknown", "infeasible")
    order, core = _degeneracy_order(h.adj, f, set(range(h.n)))
    if not core:
        return DeletabilityVerdict("yes", "degeneracy", {"order": order})
    if not _gallai_safe(h.adj, f, core):
        return DeletabilityVerdict("unknown", "gallai")
    blocks = _components_of(h.adj, core)
    return DeletabilityVerdict("yes", "gallai", {"order": order, "non_gallai_components": [sorted(b) for b in blocks]})


class _ExactBudget(Exception):
    pass


def choosable_exact(h: Graph, f: Sequence[int], budget: int = EXACT_BUDGET,
                    exact_cap: int = EXACT_CAP) -> tuple[bool, list[tuple[int, ...]] | None]:
    """Decide f-choosability by enumerating list assignments up to colour renaming.

    Lists are generated vertex by vertex; a list may reuse colours already
    seen and otherwise introduces the next unused colours in order, which
    covers every assignment over a universe of size sum(f) exactly once per
    renaming class.  A branch is abandoned as soon as some colouring of the
    assigned prefix leaves the rest degenerate with the reduced budgets.
    Returns ``(True, None)`` or ``(False, failing_lists)``.
    """
    n = h.n
    if n > exact_cap:
        raise ValueError(f"exact choosability limited to {exact_cap} vertices")
    if any(x < 1 for x in f):
        raise ValueError("budgets must be positive")
    if n == 0:
        return True, None
    adj = [sorted(a) for a in h.adj]
    # peeling low-degree vertices and splitting components are both lossless
    _, core = _degeneracy_order(adj, f, set(range(n)))
    expanded = [0]
    failing = None
    for comp in _components_of(adj, core):
        if _alon_tarsi(adj, f, comp):
            continue
        failing = _enumerate_failing(adj, f, comp, budget, expanded)
        if failing is not None:
            break
    if failing is None:
        return True, None
    top = max((c for lst in failing.values() for c in lst), default=-1) + 1
    full = []
    for v in range(n):
        if v in failing:
            full.append(failing[v])
        else:
            full.append(tuple(range(top, top + f[v])))
            top += f[v]
    if colour_small(h, full) is not None:  # pragma: no cover - search invariant
        raise AssertionError("failing assignment is colourable")
    return False, full


def _components_of(adj, alive: set[int]) -> list[list[int]]:
    seen: set[int] = set()
    out = []
    for s in sorted(alive):
        if s in seen:
            continue
        seen.add(s)
        comp, stack = [s], [s]
        while stack:
            u = stack.pop()
            for w in adj[u]:
                if w in alive and w not in seen:
                    seen.add(w)
                    comp.append(w)
                    stack.append(w)
        out.append(comp)
    return out


_SUB_CACHE: dict = {}


def _alon_tarsi(adj, f, vs) -> bool:
    """Some monomial of prod_{uv}(x_u - x_v) with all exponents below f has a non-zero coefficient."""
    vs = sorted(vs)
    idx = {v: i for i, v in enumerate(vs)}
    caps = [f[v] - 1 for v in vs]
    edges = [(idx[u], idx[w]) for u in vs for w in adj[u] if w in idx and idx[u] < idx[w]]
    if sum(caps) < len(edges):
        return False
    poly = {(0,) * len(vs): 1}
    for i, j in edges:
        nxt: dict = {}
        for mono, coef in poly.items():
            for k, sign in ((i, 1), (j, -1)):
                if mono[k] < caps[k]:
                    m2 = mono[:k] + (mono[k] + 1,) + mono[k + 1:]
                    nxt[m2] = nxt.get(m2, 0) + sign * coef
        poly = {m: c for m, c in nxt.items() if c}
        if not poly:
            return False
    return True


def _sub_choosable(adj, f, vs) -> bool:
    """Exact choosability of a strictly smaller remainder; budget trouble counts as no."""
    vs = sorted(vs)
    h = _local(adj, tuple(vs))
    fv = tuple(f[v] for v in vs)
    key = (h.n, h.edges, fv)
    got = _SUB_CACHE.get(key)
    if got is None:
        try:
            got = choosable_exact(h, fv, exact_cap=h.n)[0]
        except _ExactBudget:
            got = False
        _SUB_CACHE[key] = got
    return got


def _enumerate_failing(adj, f, comp: list[int], budget: int, expanded: list[int]):
    """Failing lists for the connected core ``comp``, or None if it is f-choosable."""
    inside = set(comp)
    nb = {v: [w for w in adj[v] if w in inside] for v in comp}
    start = max(comp, key=lambda v: (len(nb[v]), -v))
    order = [start]
    seen = {start}
    for v in order:
        for w in sorted(nb[v], key=lambda x: (-len(nb[x]), x)):
            if w not in seen:
                seen.add(w)
                order.append(w)
    n = len(order)
    pos = {v: i for i, v in enumerate(order)}
    # boundary[k]: prefix positions < k that still have neighbours at positions >= k
    boundary = [tuple(i for i in range(k) if any(pos[w] >= k for w in nb[order[i]])) for k in range(n + 1)]

    def remainder_safe(phi: tuple[int, ...], k: int) -> bool:
        rest = set(order[k:])
        f2 = dict(f) if isinstance(f, dict) else list(f)
        for u in rest:
            f2[u] = f[u] - len({phi[pos[w]] for w in nb[u] if pos[w] < k})
            if f2[u] < 1:
                return False
        _, left = _degeneracy_order(nb, f2, rest)
        if not left or _gallai_safe(nb, f2, left) or _alon_tarsi(nb, f2, left):
            return True
        return len(left) < n and _sub_choosable(nb, f2, left)

    def rec(k: int, lists: dict[int, tuple[int, ...]], used: int, cols: set[tuple[int, ...]]):
        expanded[0] += 1
        if expanded[0] > budget:
            raise _ExactBudget
        if not cols:
            return lists
        if k == n:
            return None
        for phi in cols:
            if remainder_safe(phi, k):
                return None
        v = order[k]
        back = [pos[w] for w in nb[v] if pos[w] < k]
        keep = boundary[k + 1]
        need = f[v]
        for fresh in range(0, need + 1):
            reuse = need - fresh
            if reuse > used:
                continue
            new_cols = tuple(range(used, used + fresh))
            for old in combinations(range(used), reuse):
                lst = tuple(old) + new_cols
                nxt = set()
                for phi in cols:
                    blocked = {phi[i] for i in back}
                    for c in lst:
                        if c not in blocked:
                            full = phi + (c,)
                            nxt.add(tuple(full[i] if i in keep else -1 for i in range(k + 1)))
                lists[v] = lst
                got = rec(k + 1, lists, used + fresh, nxt)
                if got is not None:
                    return got
                del lists[v]
        return None

    return rec(0, {}, 0, {()})


_VERDICT_CACHE: dict = {}


def _local(adj, vs: tuple[int, ...]) -> Graph:
    index = {v: i for i, v in enumerate(vs)}
    edges = []
    for v in vs:
        for w in adj[v]:
            j = index.get(w)
            if j is not None and index[v] < j:
                edges.append((index[v], j))
    return Graph(len(vs), edges)


def is_deletable(g, s, c: int, exact_cap: int = EXACT_CAP, budget: int = EXACT_BUDGET) -> DeletabilityVerdict:
    """Ladder: infeasible budget -> no; sufficient tests -> yes; exact search -> yes/no; else unknown.

    ``g`` may be a :class:`Graph` or any indexable adjacency (vertex -> neighbours).
    """
    adj = g.adj if isinstance(g, Graph) else g
    fb = list_budget(adj, s, c)
    for v, x in zip(fb.vertices, fb.f):
        if x < 1:
            return DeletabilityVerdict("no", "infeasible", {"vertex": v, "budget": x})
    h = _local(adj, fb.vertices)
    key = (h.n, h.edges, fb.f, exact_cap, budget)
    hit = _VERDICT_CACHE.get(key)
    if hit is not None:
        return _relabel_verdict(hit, fb.vertices)
    verdict = choosable_sufficient(h, fb.f)
    if not verdict.yes:
        if h.n > exact_cap:
            verdict = DeletabilityVerdict("unknown", "too-large")
        else:
            try:
                ok, failing = choosable_exact(h, fb.f, budget, exact_cap)
            except _ExactBudget:
                verdict = DeletabilityVerdict("unknown", "budget-exceeded")
            else:
                verdict = (DeletabilityVerdict("yes", "exact") if ok else
                           DeletabilityVerdict("no", "exact", {"failing_lists": failing}))
    _VERDICT_CACHE[key] = verdict
    return _relabel_verdict(verdict, fb.vertices)


def _relabel_verdict(v: DeletabilityVerdict, vs: tuple[int, ...]) -> DeletabilityVerdict:
    cert = {}
    for k, val in v.certificate.items():
        if k == "order":
            cert[k] = [vs[i] for i in val]
        elif k == "non_gallai_components":
            cert[k] = [[vs[i] for i in comp] for comp in val]
        elif k == "failing_lists":
            cert[k] = {vs[i]: list(lst) for i, lst in enumerate(val)}
        else:
            cert[k] = val
    return DeletabilityVerdict(v.decision, v.method, cert)


# ---------------------------------------------------------------- pocket search

def _connected_sets(adj, v: int, size_cap: int, allowed, doomed) -> list[tuple[int, ...]]:
    """Connected vertex sets containing ``v`` inside ``allowed``, by size then sorted ids."""
    layer = {frozenset((v,))}
    out = []
    for size in range(1, size_cap + 1):
        keep = sorted((tuple(sorted(s)) for s in layer if not doomed(s, size_cap - len(s))))
        out.extend(keep)
        if size == size_cap:
            break
        nxt = set()
        for t in keep:
            s = frozenset(t)
            for u in t:
                for w in adj[u]:
                    if w not in s and allowed(w):
                        nxt.add(s | {w})
        layer = nxt
    return out


def _search(adj, seeds, c: int, size_cap: int, allowed, exact_cap: int, budget: int) -> VertexSet | None | tuple:
    def doomed(s: frozenset, room: int) -> bool:
        # f(u) >= 1 needs at least deg(u) - c + 1 neighbours inside the set
        for u in s:
            need = len(adj[u]) - c + 1
            if need - sum(1 for w in adj[u] if w in s) > room:
                return True
        return False

    for v in seeds:
        if not allowed(v):
            continue
        for cand in _connected_sets(adj, v, size_cap, allowed, doomed):
            if is_deletable(adj, cand, c, exact_cap, budget).yes:
                return cand
    return None


def find_deletable_pocket(g, v: int, cap: int, c: int, size_cap: int,
                          exact_cap: int = EXACT_CAP, budget: int = EXACT_BUDGET) -> tuple[int, ...] | None:
    """First c-deletable cap-pocket containing ``v`` (smallest size, then lexicographic)."""
    if size_cap > cap:
        raise ValueError("size_cap must not exceed cap")
    adj = g.adj if isinstance(g, Graph) else g
    if isinstance(adj, Mapping):
        # a partial view: vertices it does not describe are never pocket members
        def allowed(u):
            return u in adj and len(adj[u]) <= cap
    else:
        def allowed(u):
            return len(adj[u]) <= cap
    return _search(adj, [v], c, size_cap, allowed, exact_cap, budget)


def find_deletable_disjoint_from(g: Graph, x, c: int, size_cap: int,
                                 exact_cap: int = EXACT_CAP, budget: int = EXACT_BUDGET) -> tuple[int, ...] | None:
    """First c-deletable connected set avoiding ``x``, seeded from vertices in id order."""
    banned = _ids(x)
    seeds = [v for v in range(g.n) if v not in banned]
    return _search(g.adj, seeds, c, size_cap, lambda u: u not in banned, exact_cap, budget)


def extend_into(g, s, phi: Mapping[int, int] | Colouring, l: ListAssignment) -> dict[int, int] | None:
    """Colour ``s`` from ``l`` avoiding colours of already-coloured neighbours.

    Returns the colours chosen for ``s`` only, or None if impossible.
    """
    adj = g.adj if isinstance(g, Graph) else g
    colors = phi.colors if isinstance(phi, Colouring) else phi
    vs = tuple(sorted(_ids(s)))
    h = _local(adj, vs)
    inside = set(vs)
    lists = []
    for v in vs:
        blocked = {colors[w] for w in adj[v] if w not in inside and w in colors}
        lists.append([col for col in l.lists[v] if col not in blocked])
    got = colour_small(h, lists)
    if got is None:
        return None
    return dict(zip(vs, got))
