"""Distributed list colouring by repeatedly removing deletable pockets.

Each level runs fixed-length phases on the remaining graph ``R``:

A. base detection (``k_base`` rounds of capped flooding); components with at
   most ``k_base`` vertices are coloured by exhaustive search on the spot;
B. low-degree gathering for ``size_cap - 1`` rounds, after which every vertex
   of degree <= ``cap`` looks for a deletable pocket containing itself;
C. overlap resolution (``2 (size_cap - 1)`` rounds): a candidate survives iff
   it is the smallest candidate at each of its members;
D. a proper colouring of the contact graph of the survivors, whose classes
   fix the order of extension.  This runs alongside later levels.

Once every vertex is removed, pockets are coloured last-removed-first, each
one as soon as every neighbour that was still present at its level (other
than same-level pockets of a higher class) has a colour.
"""
from __future__ import annotations

import logging
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Mapping

from . import localsim
from .deletability import EXACT_CAP, colour_small, find_deletable_pocket
from .graph import Colouring, Graph, ListAssignment, verify_colouring
from .localsim import Broadcast

log = logging.getLogger(__name__)


class ListColouringError(RuntimeError):
    """The run could not finish; ``remaining`` holds the stalled vertex ids."""

    def __init__(self, message: str, remaining: tuple[int, ...] = ()):
        super().__init__(message)
        self.remaining = remaining


class ExtensionFailure(ListColouringError):
    pass


@dataclass(frozen=True)
class AlgoParams:
    c: int
    cap: int
    size_cap: int
    k_base: int = 12
    max_levels: int = 500
    exact_cap: int = EXACT_CAP
    progress_floor: Fraction | None = None

    def __post_init__(self):
        if self.c < 1 or self.k_base < 1 or self.size_cap < 1:
            raise ValueError("c, size_cap and k_base must be positive")
        if self.size_cap > self.cap:
            raise ValueError("size_cap must not exceed cap")

    @classmethod
    def for_t(cls, t: int, **over) -> "AlgoParams":
        base = {3: dict(c=3, cap=2, size_cap=1),
                4: dict(c=4, cap=4, size_cap=4),
                5: dict(c=5, cap=6, size_cap=6)}
        if t not in base:
            raise ValueError("t must be 3, 4 or 5")
        return cls(**{**base[t], **over})

    @property
    def floor(self) -> Fraction:
        return self.progress_floor if self.progress_floor is not None else Fraction(1, 2 * self.cap)


@dataclass(frozen=True)
class LevelRecord:
    level: int
    remaining: int
    removed: int
    pockets: int
    classes: int
    rounds: int
    psi_rounds: int
    base_solved: int = 0

    @property
    def progress(self) -> Fraction:
        return Fraction(self.removed, self.remaining) if self.remaining else Fraction(1)

    def to_doc(self) -> dict:
        return asdict(self)


@dataclass
class AlgoTrace:
    """Round accounting.  ``rounds`` lets each level's contact colouring overlap
    the later levels; ``rounds_sequential`` runs every phase back to back."""

    rounds: int = 0
    rounds_sequential: int = 0
    extension_rounds: int = 0
    phases: list[dict] = field(default_factory=list)

    @property
    def max_msg_bytes(self) -> int:
        return max((p["max_bytes"] for p in self.phases), default=0)

    @property
    def messages(self) -> int:
        return sum(p["messages"] for p in self.phases)

    def to_doc(self) -> dict:
        return {"rounds": self.rounds, "rounds_sequential": self.rounds_sequential,
                "extension_rounds": self.extension_rounds, "max_msg_bytes": self.max_msg_bytes,
                "messages": self.messages, "phases": self.phases}


# ---------------------------------------------------------------- contact colouring

def _is_prime(q: int) -> bool:
    if q < 2:
        return False
    i = 2
    while i * i <= q:
        if q % i == 0:
            return False
        i += 1
    return True


def _next_prime(q: int) -> int:
    while not _is_prime(q):
        q += 1
    return q


def linial_schedule(m: int, delta: int) -> list[tuple[int, int]]:
    """Polynomial colour-reduction steps ``(q, d)``: a proper m-colouring becomes a
    q^2-colouring, where q is prime, q > delta*d and q^(d+1) >= m.  Steps are
    taken while they shrink the palette."""
    steps = []
    while True:
        best = None
        d = 1
        while best is None or delta * d + 1 <= best[0]:
            q = _next_prime(delta * d + 1)
            while q ** (d + 1) < m:
                q = _next_prime(q + 1)
            if best is None or q < best[0]:
                best = (q, d)
            d += 1
        q, d = best
        if q * q >= m:
            return steps
        steps.append((q, d))
        m = q * q


def _poly(x: int, q: int, d: int, a: int) -> int:
    val, power = 0, 1
    for _ in range(d + 1):
        val = (val + (x % q) * power) % q
        x //= q
        power = (power * a) % q
    return val


def linial_recolour(x: int, nbr_colours, q: int, d: int) -> int:
    for a in range(q):
        px = _poly(x, q, d, a)
        if all(_poly(y, q, d, a) != px for y in nbr_colours):
            return a * q + px
    raise AssertionError("no free evaluation point; schedule violated")  # pragma: no cover


def _palette_after(m: int, steps) -> int:
    return steps[-1][0] ** 2 if steps else m


def contact_graph(pockets: list[tuple[int, ...]], adj) -> Graph:
    """Pockets (disjoint) are adjacent when some host edge joins them."""
    owner = {v: i for i, p in enumerate(pockets) for v in p}
    edges = set()
    for i, p in enumerate(pockets):
        for v in p:
            for w in adj[v]:
                j = owner.get(w)
                if j is not None and j != i:
                    edges.add((min(i, j), max(i, j)))
    return Graph(len(pockets), sorted(edges))


def contact_graph_colouring(contact: Graph, ids: list[int], id_space: int,
                            delta: int | None = None) -> tuple[list[int], int]:
    """Deterministic (delta+1)-colouring from unique ids; returns (colours, overlay rounds).

    Linial-style polynomial steps shrink the id palette, then colour classes
    above ``delta`` are eliminated one per round, each picking the smallest
    colour in ``0..delta`` unused by its neighbours.
    """
    if delta is None:
        delta = max(contact.degrees(), default=0)
    if contact.n == 0:
        return [], 0
    if delta == 0:
        return [0] * contact.n, 0
    steps = linial_schedule(id_space, delta)
    col = list(ids)
    for q, d in steps:
        col = [linial_recolour(col[v], [col[w] for w in contact.adj[v]], q, d) for v in range(contact.n)]
    palette = _palette_after(id_space, steps)
    rounds = len(steps)
    for target in range(palette - 1, delta, -1):
        rounds += 1
        nxt = list(col)
        for v in range(contact.n):
            if col[v] == target:
                used = {col[w] for w in contact.adj[v]}
                nxt[v] = min(x for x in range(delta + 1) if x not in used)
        col = nxt
    return col, rounds


class ContactColouring:
    """The same reduction as a node program on the contact overlay.

    Every node speaks in each polynomial round; afterwards a node only wakes
    in the round that eliminates its own colour class and in the last round.
    """

    idle_when_empty = True

    def __init__(self, ids: list[int], id_space: int, delta: int):
        self.ids = ids
        self.delta = delta
        self.steps = linial_schedule(id_space, delta) if delta > 0 else []
        self.palette = _palette_after(id_space, self.steps)
        self.total = len(self.steps) + max(0, self.palette - 1 - delta) if delta > 0 else 0

    def _turn(self, colour: int) -> int:
        # reduction round in which colour class ``colour`` is recoloured
        return len(self.steps) + self.palette - colour

    def next_wake(self, state, rnd):
        colour = state[0]
        if rnd < len(self.steps):
            return rnd + 1
        if colour > self.delta and self._turn(colour) > rnd:
            return self._turn(colour)
        return self.total if self.total > rnd else None

    def init(self, node, neighbours, config):
        colour = self.ids[node] if self.delta > 0 else 0
        if self.total == 0:
            return (colour, {}), None, colour
        return (colour, {}), Broadcast(colour), None

    def step(self, state, rnd, inbox):
        colour, nbr = state
        nbr.update(inbox)
        changed = False
        if rnd <= len(self.steps):
            q, d = self.steps[rnd - 1]
            colour = linial_recolour(colour, [inbox[w] for w in sorted(inbox)], q, d)
            changed = True
        elif colour > self.delta and self._turn(colour) == rnd:
            used = set(nbr.values())
            colour = min(x for x in range(self.delta + 1) if x not in used)
            changed = True
        out = colour if rnd == self.total else None
        return (colour, nbr), Broadcast(colour) if changed else None, out


# ---------------------------------------------------------------- phase programs

class BaseDetect:
    """Capped flooding of adjacency and lists; small closed components solve themselves."""

    idle_when_empty = True

    def __init__(self, k_base: int, ids: list[int], adj: Mapping, lists: ListAssignment):
        self.k = k_base
        self.ids = ids
        self.adj = adj
        self.lists = lists

    def _status(self, known: dict, big: bool):
        if big:
            return "big"
        seen = set(known)
        for nb, _ in known.values():
            seen.update(nb)
        if len(seen) > self.k:
            return "big"
        if all(u in known for u in seen):
            return "small"
        return None

    def _solve(self, me: int, known: dict):
        vs = sorted(known)
        index = {v: i for i, v in enumerate(vs)}
        h = Graph(len(vs), [(index[u], index[w]) for u in vs for w in known[u][0] if u < w])
        got = colour_small(h, [known[u][1] for u in vs])
        return ("small", None if got is None else got[index[me]], tuple(vs))

    def init(self, node, neighbours, config):
        me = self.ids[node]
        known = {me: (tuple(self.adj[me]), self.lists.lists[me])}
        status = self._status(known, False)
        if status == "small":
            return (me, known, True), None, self._solve(me, known)
        if status == "big":
            return (me, known, True), Broadcast("BIG"), ("big",)
        return (me, known, False), Broadcast(dict(known)), None

    def step(self, state, rnd, inbox):
        me, known, done = state
        if done:
            return state, None, None
        big = False
        fresh = {}
        for payload in inbox.values():
            if payload == "BIG":
                big = True
                continue
            for u, rec in payload.items():
                if u not in known:
                    known[u] = rec
                    fresh[u] = rec
        status = self._status(known, big)
        if status == "big" or (status is None and rnd >= self.k):
            return (me, known, True), Broadcast("BIG"), ("big",)
        if status == "small":
            return (me, known, True), Broadcast(fresh) if fresh else None, self._solve(me, known)
        return (me, known, False), Broadcast(fresh) if fresh else None, None


class Flood:
    """Every node starts with a set of items; new items are relayed for ``radius`` rounds."""

    idle_when_empty = False

    def __init__(self, radius: int, start: list[frozenset]):
        self.radius = radius
        self.start = start

    def init(self, node, neighbours, config):
        items = set(self.start[node])
        if self.radius == 0:
            return items, None, frozenset(items)
        return items, Broadcast(frozenset(items)) if items else None, None

    def step(self, items, rnd, inbox):
        fresh = set()
        for payload in inbox.values():
            fresh |= payload - items
        items |= fresh
        if rnd >= self.radius:
            return items, None, frozenset(items)
        return items, Broadcast(frozenset(fresh)) if fresh else None, None


@dataclass(frozen=True)
class _PocketRole:
    members: tuple[int, ...]
    edges: tuple[tuple[int, int], ...]
    deps: Mapping[int, frozenset[int]]


class Extension:
    """Pockets colour themselves once all their dependencies are coloured.

    Messages are tuples of ``("col", colour)`` (sent to every neighbour once
    the sender is coloured) and ``("rec", records)`` (gossip inside a pocket:
    each member's dependency colours, keyed by member).
    """

    idle_when_empty = True

    def __init__(self, g: Graph, fixed: dict[int, int], roles: dict[int, _PocketRole],
                 lists: ListAssignment):
        self.g = g
        self.fixed = fixed
        self.roles = roles
        self.lists = lists

    def init(self, node, neighbours, config):
        if node in self.fixed:
            c = self.fixed[node]
            return None, Broadcast((("col", c),)), c
        state = {"me": node, "role": self.roles[node], "heard": {}, "records": {}, "colour": None}
        return self._advance(state, {})

    def step(self, state, rnd, inbox):
        if state is None:
            return None, None, None
        fresh = {}
        for sender, msgs in inbox.items():
            for kind, body in msgs:
                if kind == "col":
                    state["heard"][sender] = body
                else:
                    for v, rec in body.items():
                        if v not in state["records"]:
                            state["records"][v] = rec
                            fresh[v] = rec
        return self._advance(state, fresh)

    def _advance(self, state, fresh):
        me, role, heard, records = state["me"], state["role"], state["heard"], state["records"]
        deps = role.deps[me]
        if me not in records and all(w in heard for w in deps):
            records[me] = tuple(sorted((w, heard[w]) for w in deps))
            fresh[me] = records[me]
        outbox: dict[int, tuple] = {}
        if fresh:
            for w in self.g.adj[me]:
                if w in role.members:
                    outbox[w] = (("rec", dict(fresh)),)
        out = None
        if state["colour"] is None and len(records) == len(role.members):
            blocked = {v: {c for _, c in rec} for v, rec in records.items()}
            got = _extend_pocket(role.members, role.edges, blocked, self.lists)
            if got is None:
                raise ExtensionFailure(f"pocket {role.members} could not be extended", role.members)
            state["colour"] = out = got[me]
            for w in self.g.adj[me]:
                outbox[w] = outbox.get(w, ()) + (("col", out),)
        return state, outbox or None, out


def _extend_pocket(members, edges, blocked: Mapping[int, set[int]], lists: ListAssignment) -> dict[int, int] | None:
    index = {v: i for i, v in enumerate(members)}
    h = Graph(len(members), [(index[u], index[w]) for u, w in edges])
    avail = [[c for c in lists.lists[v] if c not in blocked[v]] for v in members]
    got = colour_small(h, avail)
    return None if got is None else {v: got[index[v]] for v in members}


# ---------------------------------------------------------------- shared helpers

def _check_lists(g: Graph, l: ListAssignment, p: AlgoParams):
    l.check_covers(g)
    short = [v for v in range(g.n) if len(l.lists[v]) < p.c]
    if short:
        raise ValueError(f"vertex {short[0]} has fewer than c={p.c} colours")


def _resolve(cands: dict[int, tuple[int, ...]]) -> list[tuple[int, ...]]:
    """Keep candidates that are the minimum (min member, size, members) at each member."""
    best: dict[int, tuple] = {}
    for p in set(cands.values()):
        key = (p[0], len(p), p)
        for u in p:
            if u not in best or key < best[u]:
                best[u] = key
    keep = {p for p in set(cands.values()) if all(best[u][2] == p for u in p)}
    return sorted(keep)


def _psi_host_rounds(size_cap: int, overlay_rounds: int) -> int:
    hop = 2 * size_cap - 1
    return hop + overlay_rounds * hop


def _level_forward_rounds(p: AlgoParams, base_rounds: int, any_big: bool) -> int:
    if not any_big:
        return base_rounds
    return p.k_base + (p.size_cap - 1) + 2 * (p.size_cap - 1) + 1


def _check_progress(level: int, removed: int, remaining: int, p: AlgoParams, stalls: int,
                    alive) -> int:
    if remaining and Fraction(removed, remaining) < p.floor:
        log.warning("level %d removed %d of %d vertices, below floor %s", level, removed, remaining, p.floor)
    stalls = stalls + 1 if removed == 0 else 0
    if stalls >= 2:
        raise ListColouringError("two consecutive levels without progress; size_cap too small for this input?",
                                 tuple(sorted(alive)))
    return stalls


def _deps_for(g: Graph, members, level_of, class_of, alive_at_level: set[int]) -> dict[int, frozenset[int]]:
    lv = level_of[members[0]]
    cl = class_of[members[0]]
    mem = set(members)
    out = {}
    for v in members:
        out[v] = frozenset(w for w in g.adj[v] if w not in mem and w in alive_at_level
                           and not (level_of[w] == lv and class_of[w] > cl))
    return out


def _assert_non_touching(contact: Graph, classes: list[int], pockets) -> None:
    for a, b in contact.edges:
        if classes[a] == classes[b]:
            raise ListColouringError(f"touching pockets {pockets[a]} and {pockets[b]} share class {classes[a]}",
                                     pockets[a] + pockets[b])


@dataclass
class _Removal:
    level: int
    pockets: list[tuple[int, ...]]
    classes: list[int]
    alive: frozenset[int]


def _assign_colours_sequential(g, l, base_colours, removals: list[_Removal]) -> dict[int, int]:
    colours = dict(base_colours)
    for rem in reversed(removals):
        order = sorted(range(len(rem.pockets)), key=lambda i: (rem.classes[i], rem.pockets[i]))
        for i in order:
            p = rem.pockets[i]
            mem = set(p)
            edges = [(u, w) for u in p for w in g.adj[u] if u < w and w in mem]
            blocked = {v: {colours[w] for w in g.adj[v] if w not in mem and w in rem.alive and w in colours}
                       for v in p}
            got = _extend_pocket(p, edges, blocked, l)
            if got is None:
                raise ExtensionFailure(f"pocket {p} could not be extended", p)
            colours.update(got)
    return colours


# ---------------------------------------------------------------- sequential reference

def sequential_reference_colour(g: Graph, l: ListAssignment, p: AlgoParams) -> tuple[Colouring, list[LevelRecord]]:
    _check_lists(g, l, p)
    alive = set(range(g.n))
    records: list[LevelRecord] = []
    removals: list[_Removal] = []
    base_colours: dict[int, int] = {}
    stalls = 0
    level = 0
    while alive:
        if level >= p.max_levels:
            raise ListColouringError(f"max_levels={p.max_levels} exceeded", tuple(sorted(alive)))
        adj = {v: tuple(sorted(w for w in g.adj[v] if w in alive)) for v in alive}
        rg, ids = g.induced(alive)
        small = []
        any_big = False
        base_rounds = 0
        for comp in rg.components():
            vs = [ids[i] for i in comp]
            if len(vs) <= p.k_base:
                small.append(vs)
                sub, back = g.induced(vs)
                got = colour_small(sub, [l.lists[v] for v in back])
                if got is None:
                    raise ListColouringError("base component is not colourable from its lists", tuple(back))
                base_colours.update(zip(back, got))
                base_rounds = max(base_rounds, _max_ecc(sub))
            else:
                any_big = True
        solved = {v for vs in small for v in vs}
        pockets: list[tuple[int, ...]] = []
        classes: list[int] = []
        psi_rounds = 0
        if any_big:
            big = {v: nb for v, nb in adj.items() if v not in solved}
            view = {v: nb for v, nb in big.items() if len(nb) <= p.cap}
            cands = {}
            for v in sorted(view):
                h = find_deletable_pocket(view, v, p.cap, p.c, p.size_cap, p.exact_cap)
                if h is not None:
                    cands[v] = h
            pockets = _resolve(cands)
            contact = contact_graph(pockets, big)
            classes, overlay = contact_graph_colouring(contact, [pk[0] for pk in pockets], g.n)
            _assert_non_touching(contact, classes, pockets)
            psi_rounds = _psi_host_rounds(p.size_cap, overlay) if pockets else 0
        removed = len(solved) + sum(len(pk) for pk in pockets)
        records.append(LevelRecord(level, len(alive), removed, len(pockets), len(set(classes)),
                                   _level_forward_rounds(p, base_rounds, any_big), psi_rounds, len(solved)))
        removals.append(_Removal(level, pockets, classes, frozenset(alive)))
        stalls = _check_progress(level, removed, len(alive), p, stalls, alive)
        alive -= solved
        for pk in pockets:
            alive -= set(pk)
        level += 1
    colours = _assign_colours_sequential(g, l, base_colours, removals)
    return Colouring(colours), records


def _max_ecc(h: Graph) -> int:
    best = 0
    for s in range(h.n):
        dist = {s: 0}
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for w in h.adj[u]:
                    if w not in dist:
                        dist[w] = dist[u] + 1
                        nxt.append(w)
            frontier = nxt
        best = max(best, max(dist.values()))
    return best


# ---------------------------------------------------------------- distributed run

def _phase_stats(level, name, trace: localsim.SimTrace, charged: int) -> dict:
    return {"level": level, "phase": name, "rounds": charged, "messages": trace.messages,
            "max_bytes": trace.max_msg_bytes}


def distributed_list_colour(g: Graph, l: ListAssignment, p: AlgoParams,
                            verify: bool = True) -> tuple[Colouring, AlgoTrace, list[LevelRecord]]:
    """Run every phase through the LOCAL simulator and return the colouring,
    round accounting and per-level records."""
    _check_lists(g, l, p)
    alive = set(range(g.n))
    records: list[LevelRecord] = []
    trace = AlgoTrace()
    base_colours: dict[int, int] = {}
    level_of: dict[int, int] = {}
    class_of: dict[int, int] = {}
    alive_at: dict[int, frozenset[int]] = {}
    pocket_of: dict[int, tuple[int, ...]] = {}
    clock = 0
    psi_done = 0
    stalls = 0
    level = 0
    while alive:
        if level >= p.max_levels:
            raise ListColouringError(f"max_levels={p.max_levels} exceeded", tuple(sorted(alive)))
        rg, ids = g.induced(alive)
        adj = {v: tuple(sorted(w for w in g.adj[v] if w in alive)) for v in alive}
        out, tr = localsim.run(rg, BaseDetect(p.k_base, ids, adj, l), max_rounds=p.k_base + 1)
        solved = set()
        any_big = False
        for i, res in out.items():
            if res[0] == "small":
                if res[1] is None:
                    raise ListColouringError("base component is not colourable from its lists", res[2])
                base_colours[ids[i]] = res[1]
                solved.add(ids[i])
            else:
                any_big = True
        base_rounds = p.k_base if any_big else tr.rounds_used
        trace.phases.append(_phase_stats(level, "base", tr, base_rounds))
        pockets: list[tuple[int, ...]] = []
        classes: list[int] = []
        psi_rounds = 0
        if any_big:
            keep = [v for v in sorted(alive) if v not in solved]
            bg, bids = g.induced(keep)
            radius = p.size_cap - 1
            start = [frozenset([(v, adj[v])]) if len(adj[v]) <= p.cap else frozenset() for v in bids]
            views, tr = localsim.run(bg, Flood(radius, start), max_rounds=radius + 1)
            trace.phases.append(_phase_stats(level, "gather", tr, radius))
            cand_at = [frozenset() for _ in bids]
            for i, v in enumerate(bids):
                if len(adj[v]) <= p.cap:
                    h = find_deletable_pocket(dict(views[i]), v, p.cap, p.c, p.size_cap, p.exact_cap)
                    if h is not None:
                        cand_at[i] = frozenset([h])
            heard, tr1 = localsim.run(bg, Flood(radius, cand_at), max_rounds=radius + 1)
            mins = []
            for i, v in enumerate(bids):
                mine = [h for h in heard[i] if v in h]
                mins.append(frozenset([(v, min((h[0], len(h), h) for h in mine)[2])]) if mine else frozenset())
            agreed, tr2 = localsim.run(bg, Flood(radius, mins), max_rounds=radius + 1)
            trace.phases.append(_phase_stats(level, "resolve", tr1, radius))
            trace.phases.append(_phase_stats(level, "resolve", tr2, radius))
            chosen = set()
            for i, v in enumerate(bids):
                table = dict(agreed[i])
                if v in table:
                    h = table[v]
                    if all(table.get(u) == h for u in h):
                        chosen.add(h)
            pockets = sorted(chosen)
            if pockets:
                contact = contact_graph(pockets, adj)
                delta = max(contact.degrees(), default=0)
                prog = ContactColouring([pk[0] for pk in pockets], g.n, delta)
                cols, tr = localsim.run(contact, prog, max_rounds=prog.total + 1)
                classes = [cols[i] for i in range(len(pockets))]
                _assert_non_touching(contact, classes, pockets)
                psi_rounds = _psi_host_rounds(p.size_cap, tr.rounds_used)
                trace.phases.append(_phase_stats(level, "psi", tr, psi_rounds))
        fwd = _level_forward_rounds(p, base_rounds, any_big)
        clock += fwd
        psi_done = max(psi_done, clock + psi_rounds)
        trace.rounds_sequential += fwd + psi_rounds
        removed = len(solved) + sum(len(pk) for pk in pockets)
        records.append(LevelRecord(level, len(alive), removed, len(pockets), len(set(classes)),
                                   fwd, psi_rounds, len(solved)))
        frozen_alive = frozenset(alive)
        for k, pk in enumerate(pockets):
            for v in pk:
                level_of[v] = level
                class_of[v] = classes[k]
                alive_at[v] = frozen_alive
                pocket_of[v] = pk
        stalls = _check_progress(level, removed, len(alive), p, stalls, alive)
        alive -= solved
        for pk in pockets:
            alive -= set(pk)
        level += 1
    for v in base_colours:
        level_of[v] = level
        class_of[v] = 0
    roles = {}
    for v, pk in pocket_of.items():
        if pk[0] != v:
            continue
        mem = set(pk)
        edges = tuple((u, w) for u in pk for w in g.adj[u] if u < w and w in mem)
        role = _PocketRole(pk, edges, _deps_for(g, pk, level_of, class_of, alive_at[v]))
        for u in pk:
            roles[u] = role
    ext = Extension(g, base_colours, roles, l)
    try:
        colours, tr = localsim.run(g, ext, max_rounds=10 * g.n + 10)
    except localsim.NodeProgramError as exc:
        if isinstance(exc.__cause__, ExtensionFailure):
            raise exc.__cause__ from None
        raise
    trace.extension_rounds = tr.rounds_used
    trace.phases.append(_phase_stats(level, "extend", tr, tr.rounds_used))
    trace.rounds = max(clock, psi_done) + tr.rounds_used
    trace.rounds_sequential += tr.rounds_used
    phi = Colouring({v: colours[v] for v in range(g.n)})
    if verify:
        verdict = verify_colouring(g, phi, l)
        if not verdict:
            raise ExtensionFailure(f"produced colouring fails verification: {verdict}")
    return phi, trace, records
