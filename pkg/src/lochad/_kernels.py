"""Hot inner loops: bounded BFS over CSR arrays and the list-colouring
backtracker over colour bitmasks.

Each kernel is written once in numba-compatible Python.  When numba is
importable and ``LOCHAD_DISABLE_NUMBA`` is unset (or ``0``), the module-level
names are the ``@njit`` compiled versions; otherwise they are the plain
Python functions.  ``py_*`` aliases always point at the uncompiled source so
the two paths can be compared directly.
"""
from __future__ import annotations

import os

import numpy as np

_DISABLED = os.environ.get("LOCHAD_DISABLE_NUMBA", "0").lower() not in ("", "0", "false", "no")

try:
    if _DISABLED:
        raise ImportError
    from numba import njit

    USING_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    USING_NUMBA = False

    def njit(*args, **kwargs):
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]
        return lambda f: f


# Largest colour index representable in a uint64 mask.
MAX_MASK_COLOURS = 63


@njit(cache=True)
def popcount(x):
    c = 0
    while x:
        x &= x - np.uint64(1)
        c += 1
    return c


def _bfs_within(indptr, indices, src, radius, dist):
    """Fill ``dist`` (pre-set to -1) for vertices within ``radius`` of ``src``.

    Returns the visited vertices in BFS order.
    """
    n = indptr.shape[0] - 1
    order = np.empty(n, dtype=np.int64)
    dist[src] = 0
    order[0] = src
    head = 0
    tail = 1
    while head < tail:
        u = order[head]
        head += 1
        du = dist[u]
        if du == radius:
            continue
        for k in range(indptr[u], indptr[u + 1]):
            w = indices[k]
            if dist[w] < 0:
                dist[w] = du + 1
                order[tail] = w
                tail += 1
    return order[:tail]


def _colour_backtrack(indptr, indices, masks, out):
    """Find a proper colouring choosing bit ``out[v]`` from ``masks[v]``.

    Dynamic smallest-remaining-list ordering (ties to the smallest index),
    colours tried in ascending order, forward checking on uncoloured
    neighbours.  ``out`` receives colour indices; returns True on success.
    The search order is fully determined by the inputs.
    """
    n = masks.shape[0]
    avail = masks.copy()
    for v in range(n):
        out[v] = -1
        if avail[v] == 0:
            return False
    if n == 0:
        return True
    # stack frames: vertex, remaining candidate mask, snapshot offset
    stack_v = np.empty(n, dtype=np.int64)
    stack_rem = np.empty(n, dtype=np.uint64)
    snap = np.empty(n * n, dtype=np.uint64)
    depth = 0
    # choose first vertex
    best = -1
    best_c = 1 << 30
    for v in range(n):
        c = popcount(avail[v])
        if c < best_c:
            best_c = c
            best = v
    stack_v[0] = best
    stack_rem[0] = avail[best]
    while depth >= 0:
        v = stack_v[depth]
        rem = stack_rem[depth]
        if out[v] >= 0:
            # undo previous choice at this depth
            for w in range(n):
                avail[w] = snap[depth * n + w]
            out[v] = -1
        if rem == 0:
            depth -= 1
            continue
        low = rem & (~rem + np.uint64(1))
        stack_rem[depth] = rem ^ low
        col = 0
        t = low
        while t > np.uint64(1):
            t >>= np.uint64(1)
            col += 1
        for w in range(n):
            snap[depth * n + w] = avail[w]
        out[v] = col
        ok = True
        for k in range(indptr[v], indptr[v + 1]):
            w = indices[k]
            if out[w] < 0:
                avail[w] &= ~low
                if avail[w] == 0:
                    ok = False
                    break
        if not ok:
            continue
        if depth == n - 1:
            return True
        best = -1
        best_c = 1 << 30
        for w in range(n):
            if out[w] < 0:
                c = popcount(avail[w])
                if c < best_c:
                    best_c = c
                    best = w
        depth += 1
        stack_v[depth] = best
        stack_rem[depth] = avail[best]
        out[best] = -1
    return False


py_bfs_within = _bfs_within
py_colour_backtrack = _colour_backtrack

bfs_within = njit(cache=True)(_bfs_within)
colour_backtrack = njit(cache=True)(_colour_backtrack)
