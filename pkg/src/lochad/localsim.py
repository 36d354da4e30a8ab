"""Synchronous LOCAL-model simulator.

A node program supplies two pure functions::

    init(node, neighbours, config) -> (state, outbox, output)
    step(state, round, inbox)      -> (state, outbox, output)

``inbox`` maps sender id to payload.  ``outbox`` is either a dict from
neighbour id to payload or a :class:`Broadcast`.  ``output`` is None until
the node is done; the first non-None output fixes the node's output round,
after which the node keeps stepping so it can still relay.  Programs that set
``idle_when_empty = True`` promise that a step with an empty inbox changes
nothing, which lets the runtime skip those calls.  Such programs may define
``next_wake(state, round)`` returning a later round at which the node must be
stepped even if nothing arrives.
"""
from __future__ import annotations

import pickle
from dataclasses import dataclass, field
from typing import Any, Protocol

from .graph import Graph


class Broadcast:
    __slots__ = ("payload",)

    def __init__(self, payload):
        self.payload = payload


class NodeProgram(Protocol):
    idle_when_empty: bool

    def init(self, node: int, neighbours: tuple[int, ...], config: Any): ...

    def step(self, state, rnd: int, inbox: dict[int, Any]): ...


class RoundBudgetExceeded(RuntimeError):
    pass


class NodeProgramError(RuntimeError):
    def __init__(self, node: int, rnd: int, exc: BaseException):
        super().__init__(f"node {node} failed in round {rnd}: {exc!r}")
        self.node = node
        self.round = rnd


@dataclass
class SimTrace:
    rounds_used: int = 0
    per_round: list[dict] = field(default_factory=list)
    output_round: dict[int, int] = field(default_factory=dict)

    @property
    def max_msg_bytes(self) -> int:
        return max((r["max_bytes"] for r in self.per_round), default=0)

    @property
    def messages(self) -> int:
        return sum(r["messages"] for r in self.per_round)

    def to_doc(self) -> dict:
        return {"rounds": self.rounds_used, "max_msg_bytes": self.max_msg_bytes, "per_round": self.per_round}


def _size(payload, cache: dict) -> int:
    key = id(payload)
    got = cache.get(key)
    if got is None:
        got = len(pickle.dumps(payload, protocol=4))
        cache[key] = got
    return got


def run(g: Graph, program, config=None, max_rounds: int = 10_000, measure: bool = True) -> tuple[dict[int, Any], SimTrace]:
    """Run ``program`` on every vertex of ``g`` in lockstep until all nodes output."""
    if max_rounds < 1:
        raise ValueError("max_rounds must be >= 1")
    n = g.n
    idle_ok = getattr(program, "idle_when_empty", False)
    next_wake = getattr(program, "next_wake", None) if idle_ok else None
    wake: dict[int, set[int]] = {}
    states: list[Any] = [None] * n
    outputs: dict[int, Any] = {}
    trace = SimTrace()
    pending: dict[int, dict[int, Any]] = {}
    nbrs = [tuple(sorted(a)) for a in g.adj]

    def deliver(v: int, outbox, rnd: int, stats: dict, sizes: dict):
        if outbox is None:
            return
        if isinstance(outbox, Broadcast):
            targets = ((w, outbox.payload) for w in nbrs[v])
        else:
            for w in outbox:
                if w not in g.adj[v]:
                    raise NodeProgramError(v, rnd, ValueError(f"{w} is not a neighbour"))
            targets = sorted(outbox.items())
        for w, payload in targets:
            pending.setdefault(w, {})[v] = payload
            stats["messages"] += 1
            if measure:
                b = _size(payload, sizes)
                if b > stats["max_bytes"]:
                    stats["max_bytes"] = b

    stats = {"messages": 0, "max_bytes": 0}
    sizes: dict = {}
    for v in range(n):
        try:
            state, outbox, out = program.init(v, nbrs[v], config)
        except Exception as exc:
            raise NodeProgramError(v, 0, exc) from exc
        states[v] = state
        if out is not None:
            outputs[v] = out
            trace.output_round[v] = 0
        deliver(v, outbox, 0, stats, sizes)
        if next_wake is not None:
            r = next_wake(state, 0)
            if r is not None:
                wake.setdefault(r, set()).add(v)
    rnd = 0
    while len(outputs) < n:
        rnd += 1
        if rnd > max_rounds:
            raise RoundBudgetExceeded(f"{n - len(outputs)} nodes without output after {max_rounds} rounds")
        inboxes, pending = pending, {}
        stats = {"messages": 0, "max_bytes": 0}
        sizes = {}
        if idle_ok:
            active = sorted(set(inboxes) | wake.pop(rnd, set()))
        else:
            active = range(n)
        for v in active:
            inbox = inboxes.get(v, {})
            try:
                state, outbox, out = program.step(states[v], rnd, inbox)
            except Exception as exc:
                raise NodeProgramError(v, rnd, exc) from exc
            states[v] = state
            if out is not None and v not in outputs:
                outputs[v] = out
                trace.output_round[v] = rnd
            deliver(v, outbox, rnd, stats, sizes)
            if next_wake is not None:
                r = next_wake(state, rnd)
                if r is not None and r > rnd:
                    wake.setdefault(r, set()).add(v)
        trace.per_round.append({"round": rnd, **stats})
        if idle_ok and not pending and not wake and len(outputs) < n:
            raise RoundBudgetExceeded("no messages in flight and some nodes never output")
    trace.rounds_used = max(trace.output_round.values(), default=0)
    return outputs, trace


class GatherBall:
    """Each node learns the induced subgraph on its radius-``r`` ball.

    After ``k`` rounds a node holds the adjacency lists of every vertex at
    distance at most ``k``; the induced ball subgraph is output at round
    ``r``.  Output is ``(ids, edges)`` in original vertex ids, sorted.
    """

    idle_when_empty = False

    def __init__(self, r: int):
        if r < 0:
            raise ValueError("radius must be non-negative")
        self.r = r

    def _result(self, me: int, known: dict[int, tuple[int, ...]]):
        dist = {me: 0}
        frontier = [me]
        for d in range(1, self.r + 1):
            nxt = []
            for u in frontier:
                for w in known.get(u, ()):
                    if w not in dist:
                        dist[w] = d
                        nxt.append(w)
            frontier = nxt
        ids = tuple(sorted(dist))
        edges = tuple(sorted((u, w) for u in ids for w in known.get(u, ()) if u < w and w in dist))
        return ids, edges

    def init(self, node, neighbours, config):
        known = {node: neighbours}
        state = (node, known)
        if self.r == 0:
            return state, None, self._result(node, known)
        return state, Broadcast({node: neighbours}), None

    def step(self, state, rnd, inbox):
        me, known = state
        fresh = {}
        for payload in inbox.values():
            for u, nb in payload.items():
                if u not in known:
                    known[u] = nb
                    fresh[u] = nb
        if rnd >= self.r:
            return state, None, self._result(me, known)
        return state, Broadcast(fresh) if fresh else None, None


def gather_ball_program(r: int) -> GatherBall:
    return GatherBall(r)
