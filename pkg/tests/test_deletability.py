import random
from itertools import product

import networkx as nx
import pytest
from hypothesis import given, settings, strategies as st

from lochad.deletability import (
    choosable_exact, choosable_sufficient, chromatic_number_exact, extend_into, find_deletable_disjoint_from,
    find_deletable_pocket, is_deletable, list_budget, list_colour_exhaustive,
)
from lochad.generators import complete, cycle, k4_minus_edge, necklace, path, random_tree, series_parallel_random
from lochad.graph import Graph, ListAssignment, is_connected_set, is_pocket, verify_colouring

import oracles
from strategies import graphs


def _star(k):
    return Graph(k + 1, [(0, i) for i in range(1, k + 1)])


def _k4e_strip():
    """Squared path t,u,v,w,x,y,z,a,b,c (ids 0..9) whose outer vertices are
    pushed above degree 4 by three hubs, so only {w,x,y,z} = {3,4,5,6} can
    form a 4-pocket."""
    edges = {(i, j) for i in range(10) for j in (i + 1, i + 2) if j < 10}
    for hub in (10, 11, 12):
        edges |= {(v, hub) for v in (0, 1, 2, 7, 8, 9)}
    return Graph(13, edges)


# ---------------------------------------------------------------- budgets

def test_list_budget_examples():
    assert list_budget(Graph(1), [0], 3).f == (3,)
    fb = list_budget(_star(5), [0], 4)
    assert fb.f == (-1,) and not fb.feasible
    g = _k4e_strip()
    assert list_budget(g, [3, 4, 5, 6], 4).as_dict() == {3: 2, 4: 3, 5: 3, 6: 2}
    with pytest.raises(ValueError):
        list_budget(g, [], 4)


# ---------------------------------------------------------------- choosability

def test_choosable_exact_examples():
    assert choosable_exact(Graph(1), [1]) == (True, None)
    ok, failing = choosable_exact(complete(2), [1, 1])
    assert not ok and failing[0] == failing[1] and len(failing[0]) == 1
    k4e = k4_minus_edge()  # missing edge between the two degree-2 vertices
    f = [2 if k4e.degree(v) == 2 else 3 for v in range(4)]
    assert choosable_exact(k4e, f) == (True, None)
    ok, failing = choosable_exact(cycle(5), [2] * 5)
    assert not ok
    assert not oracles.colourable(5, cycle(5).edges, failing)
    with pytest.raises(ValueError):
        choosable_exact(path(7), [2] * 7)


def test_choosable_sufficient_examples():
    v = choosable_sufficient(path(4), [2] * 4)
    assert v.decision == "yes" and v.method == "degeneracy"
    k4e = k4_minus_edge()
    f = [2 if k4e.degree(v) == 2 else 3 for v in range(4)]
    v = choosable_sufficient(k4e, f)
    assert v.decision == "yes" and v.method == "gallai"
    assert choosable_sufficient(cycle(5), [2] * 5).decision == "unknown"
    assert choosable_sufficient(cycle(4), [2] * 4).decision == "yes"  # even cycle is not a Gallai tree


def _connected_graphs(max_n):
    for g in nx.graph_atlas_g()[1:]:
        if g.number_of_nodes() <= max_n and nx.is_connected(g):
            yield Graph(g.number_of_nodes(), g.edges())


def test_sufficient_is_sound_on_all_small_graphs():
    checked = 0
    for g in _connected_graphs(5):
        for f in product(*[range(1, g.degree(v) + 2) for v in range(g.n)]):
            suff = choosable_sufficient(g, f)
            assert suff.decision in ("yes", "unknown")
            ok, failing = choosable_exact(g, f)
            if suff.yes:
                assert ok, (g, f)
            if not ok:
                assert not oracles.colourable(g.n, g.edges, failing)
                assert all(len(failing[v]) == f[v] for v in range(g.n))
            checked += 1
    assert checked > 10_000


@settings(max_examples=120)
@given(graphs(max_n=4), st.data())
def test_choosable_exact_matches_brute_force(g, data):
    f = [data.draw(st.integers(1, max(1, min(3, g.degree(v) + 1)))) for v in range(g.n)]
    if sum(f) > 6:
        return
    ok, _ = choosable_exact(g, f)
    assert ok == oracles.choosable(g.n, g.edges, f)


# ---------------------------------------------------------------- is_deletable

def test_is_deletable_examples():
    for deg in range(4):
        assert is_deletable(_star(deg), [0], 4).yes
    for deg in range(3):
        assert is_deletable(_star(deg), [0], 3).yes
    # K2 whose endpoints each see three outside vertices
    g = Graph(8, [(0, 1)] + [(0, i) for i in (2, 3, 4)] + [(1, i) for i in (5, 6, 7)])
    v = is_deletable(g, [0, 1], 4)
    assert v.decision == "no" and v.method == "exact"
    assert v.certificate["failing_lists"] == {0: [0], 1: [0]}
    v = is_deletable(_star(5), [0], 4)
    assert v.decision == "no" and v.method == "infeasible"


def test_is_deletable_too_large_is_unknown():
    g = cycle(9)
    g = Graph(9, list(g.edges) + [(0, 4)])
    # no degenerate peel, chord endpoints have f < d, and 9 vertices exceed the exact cap
    v = is_deletable(g, range(9), 2, exact_cap=6)
    assert v.decision == "unknown"


def test_budget_exhaustion_is_unknown():
    # C5 with one pendant per cycle vertex: budgets f = 2 on an odd cycle, decided only by enumeration
    g = Graph(10, list(cycle(5).edges) + [(i, i + 5) for i in range(5)])
    v = is_deletable(g, range(5), 3, budget=1)
    assert v.decision == "unknown" and v.method == "budget-exceeded"
    v = is_deletable(g, range(5), 3)
    assert v.decision == "no" and v.method == "exact"


# ---------------------------------------------------------------- pocket search

def test_pocket_examples():
    t = random_tree(15, 2)
    leaf = next(v for v in range(t.n) if t.degree(v) == 1)
    assert find_deletable_pocket(t, leaf, 4, 3, 4) == (leaf,)
    g = series_parallel_random(60, 3)
    v3 = next(v for v in range(g.n) if g.degree(v) == 3)
    assert find_deletable_pocket(g, v3, 4, 4, 4) == (v3,)
    assert find_deletable_pocket(_k4e_strip(), 3, 4, 4, 4) == (3, 4, 5, 6)
    with pytest.raises(ValueError):
        find_deletable_pocket(g, 0, 3, 4, 4)


def test_pocket_is_a_pocket_and_deletable():
    g = series_parallel_random(300, 11)
    for v in range(0, g.n, 7):
        s = find_deletable_pocket(g, v, 4, 4, 4)
        if s is None:
            continue
        assert v in s and is_pocket(g, s, 4) and is_deletable(g, s, 4).yes


def test_pocket_search_on_partial_view():
    g = _k4e_strip()
    view = {v: g.adj[v] for v in (3, 4, 5, 6)}
    assert find_deletable_pocket(view, 3, 4, 4, 4) == (3, 4, 5, 6)
    view = {v: g.adj[v] for v in (3, 4, 5)}
    assert find_deletable_pocket(view, 3, 4, 4, 4) is None


def test_disjoint_examples():
    p5 = path(5)
    assert find_deletable_disjoint_from(p5, [0, 4], 3, 1) == (1,)
    t = random_tree(20, 8)
    low = [v for v in range(t.n) if t.degree(v) <= 2]
    assert find_deletable_disjoint_from(t, low, 3, 1) is None


@pytest.mark.parametrize("seed", range(200))
def test_k3_bound(seed):
    rng = random.Random(seed)
    n = rng.randint(2, 40)
    t = random_tree(n, seed)
    x = rng.sample(range(n), rng.randint(0, n // 2))
    if n > 2 * (len(x) - 1):
        assert find_deletable_disjoint_from(t, x, 3, 1) is not None


@pytest.mark.parametrize("seed", range(200))
def test_k4_bound(seed):
    rng = random.Random(seed)
    n = rng.randint(12, 120)
    g = series_parallel_random(n, seed)
    k = rng.randint(0, (n - 1) // 11)
    x = rng.sample(range(n), k)
    assert n > 11 * len(x)
    assert find_deletable_disjoint_from(g, x, 4, 4) is not None


# ---------------------------------------------------------------- extension

def test_extend_into_examples():
    l = ListAssignment({0: (5,)}, 6)
    assert extend_into(Graph(1), [0], {}, l) == {0: 5}
    g = _k4e_strip()
    rng = random.Random(1)
    for _ in range(50):
        lists = {v: tuple(sorted(rng.sample(range(8), 4))) for v in range(g.n)}
        phi = {v: rng.choice(lists[v]) for v in range(g.n) if v not in (3, 4, 5, 6)}
        assert extend_into(g, [3, 4, 5, 6], phi, ListAssignment(lists, 8)) is not None
    g = Graph(4, [(0, 1), (0, 2), (1, 3)])
    l = ListAssignment({0: (0, 1), 1: (0, 1), 2: (1,), 3: (1,)}, 2)
    assert extend_into(g, [0, 1], {2: 1, 3: 1}, l) is None


def test_deletable_implies_extension():
    rng = random.Random(2024)
    hits = 0
    attempts = 0
    while hits < 500:
        attempts += 1
        assert attempts < 20_000
        n = rng.randint(3, 14)
        g = series_parallel_random(n, rng.randrange(1 << 30)) if rng.random() < 0.5 else \
            Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.3])
        c = rng.choice((3, 4))
        v = rng.randrange(n)
        s = {v}
        for _ in range(rng.randint(0, 3)):
            nb = [w for u in s for w in g.adj[u] if w not in s]
            if nb:
                s.add(rng.choice(nb))
        if not is_deletable(g, s, c).yes:
            continue
        hits += 1
        universe = c + 3
        lists = {u: tuple(sorted(rng.sample(range(universe), c))) for u in range(n)}
        phi = {u: rng.choice(lists[u]) for u in range(n) if u not in s}
        ext = extend_into(g, s, phi, ListAssignment(lists, universe))
        assert ext is not None
        full = {**phi, **ext}
        for a in s:
            assert full[a] in lists[a]
            assert all(full[a] != full[b] for b in g.adj[a])


def test_deletability_monotone_under_outside_deletions():
    rng = random.Random(7)
    for _ in range(300):
        n = rng.randint(4, 12)
        g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.35])
        s = {rng.randrange(n)}
        for _ in range(rng.randint(0, 3)):
            nb = [w for u in s for w in g.adj[u] if w not in s]
            if nb:
                s.add(rng.choice(nb))
        if not is_deletable(g, s, 4).yes:
            continue
        keep = [e for e in g.edges if (e[0] in s and e[1] in s) or rng.random() < 0.5]
        gone = {u for u in range(n) if u not in s and rng.random() < 0.3}
        keep = [e for e in keep if e[0] not in gone and e[1] not in gone]
        assert is_deletable(Graph(n, keep), s, 4).yes


# ---------------------------------------------------------------- exhaustive colouring

def test_list_colour_exhaustive_examples():
    k3 = complete(3)
    l = ListAssignment({0: (0, 1), 1: (1, 2), 2: (0, 2)}, 3)
    phi = list_colour_exhaustive(k3, l)
    assert phi is not None and verify_colouring(k3, phi, l)
    assert oracles.colourable(3, k3.edges, [l[v] for v in range(3)])
    assert list_colour_exhaustive(complete(2), ListAssignment({0: (0,), 1: (0,)}, 1)) is None
    phi = list_colour_exhaustive(path(4), ListAssignment.uniform(4, 2))
    assert [phi[v] for v in range(4)] in ([0, 1, 0, 1], [1, 0, 1, 0])


@settings(max_examples=80)
@given(graphs(max_n=7), st.data())
def test_exhaustive_matches_brute_force(g, data):
    lists = [tuple(sorted(data.draw(st.sets(st.integers(0, 3), min_size=1, max_size=3)))) for _ in range(g.n)]
    l = ListAssignment(dict(enumerate(lists)), 4)
    phi = list_colour_exhaustive(g, l)
    assert (phi is not None) == oracles.colourable(g.n, g.edges, lists)
    if phi is not None:
        assert verify_colouring(g, phi, l)


def test_chromatic_number_examples():
    assert chromatic_number_exact(cycle(7), 10) == 3
    assert chromatic_number_exact(complete(5), 10) == 5
    assert chromatic_number_exact(necklace(4, 3), 10) == 4
    assert chromatic_number_exact(complete(5), 4) is None


@settings(max_examples=40)
@given(graphs(max_n=7))
def test_chromatic_number_matches_brute_force(g):
    assert chromatic_number_exact(g, g.n + 1) == oracles.chromatic_number(g.n, g.edges)


def test_alon_tarsi_certificate():
    from lochad.deletability import _alon_tarsi
    assert _alon_tarsi(cycle(4).adj, [2] * 4, range(4))       # even cycles are 2-choosable
    assert not _alon_tarsi(cycle(5).adj, [2] * 5, range(5))   # odd cycles are not
    k4e = k4_minus_edge()
    assert _alon_tarsi(k4e.adj, [2 if k4e.degree(v) == 2 else 3 for v in range(4)], range(4))
    assert not _alon_tarsi(complete(4).adj, [3] * 4, range(4))
