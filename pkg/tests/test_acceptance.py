"""Acceptance suite: one test per primary criterion, each printing a PASS/FAIL line.

Run alone with ``pytest tests/test_acceptance.py -v -s`` or ``python tests/test_acceptance.py``.
"""
import math
import random
import statistics
import sys
from fractions import Fraction
from itertools import product
from pathlib import Path

import networkx as nx
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from lochad.algorithm import AlgoParams, distributed_list_colour, sequential_reference_colour  # noqa: E402
from lochad.cli import fit_log, run_scaling  # noqa: E402
from lochad.deletability import (  # noqa: E402
    choosable_exact, choosable_sufficient, chromatic_number_exact, find_deletable_disjoint_from,
)
from lochad.generators import (  # noqa: E402
    GenSpec, cycle, generate, k4_minus_edge, necklace, random_lists, random_tree, series_parallel_random,
    wagner_composition_random, wagner_v8,
)
from lochad.graph import Graph, verify_colouring  # noqa: E402
from lochad.minors import clique, has_minor, is_kt_minor_free, is_locally_minor_free  # noqa: E402

SP_SEED = 1_000
WAGNER_SEED = 2_000


def _report(request, n: int, ok: bool, detail: str) -> None:
    line = f"criterion {n}: {'PASS' if ok else 'FAIL'} | {detail}"
    capman = request.config.pluginmanager.getplugin("capturemanager") if request else None
    if capman:
        with capman.global_and_fixture_disabled():
            print("\n" + line)
    else:
        print(line)


def _wagner_instance(seed: int, rng: random.Random) -> Graph:
    while True:
        target = rng.randint(100, 2000)
        g, _ = generate(GenSpec("wagner-sum", n=target, t=5, seed=seed))
        if 100 <= g.n <= 2000:
            return g
        seed += 7919


def criterion_1():
    rng = random.Random(1)
    failures = []
    for i in range(200):
        seed = SP_SEED + i
        g = series_parallel_random(rng.randint(100, 5000), seed)
        l = random_lists(g, 4, 8, seed + 1)
        phi, _, _ = distributed_list_colour(g, l, AlgoParams.for_t(4), verify=False)
        if not verify_colouring(g, phi, l):
            failures.append(("sp", seed))
    for i in range(100):
        seed = WAGNER_SEED + i
        g = _wagner_instance(seed, rng)
        l = random_lists(g, 5, 10, seed + 1)
        phi, _, _ = distributed_list_colour(g, l, AlgoParams.for_t(5), verify=False)
        if not verify_colouring(g, phi, l):
            failures.append(("wagner", seed))
    return not failures, f"300 runs, {300 - len(failures)} verified; failures={failures[:5]}"


def criterion_2():
    sizes = [2 ** k for k in range(10, 17)]
    res = run_scaling({"family": "sp", "t": 4, "sizes": sizes, "trials": 3, "seed": 7})
    med = [row["median_rounds"] for row in res["table"]]
    fit = fit_log(sizes, med)
    ratio = med[-1] / med[0]
    worst = max(fit["residuals"])
    ok = worst < 0.15 and ratio <= 2.0 and all(r["verified"] for r in res["runs"])
    return ok, (f"median rounds {dict(zip(sizes, med))}; fit a={fit['a']:.2f} b={fit['b']:.1f}; "
                f"max residual {worst:.3f}; ratio {ratio:.3f}")


def criterion_3():
    p = AlgoParams.for_t(4)
    worst = Fraction(1)
    where = None
    for i in range(20):
        n = 500 + 225 * i
        g = series_parallel_random(n, 3_000 + i)
        _, _, recs = distributed_list_colour(g, random_lists(g, 4, 8, 3_001 + i), p)
        for r in recs:
            if r.progress < worst:
                worst, where = r.progress, (n, r.level, r.removed, r.remaining)
    return worst >= p.floor, (f"empirical minimum progress {float(worst):.3f} at (n, level, removed, remaining)="
                              f"{where}; floor 1/(2*cap) = {float(p.floor):.3f}")


def criterion_4():
    bad = []
    for t in (3, 4, 5):
        for n in range(2, 7):
            g = necklace(t, n)
            chi = chromatic_number_exact(g, t + 1)
            local = is_locally_minor_free(g, t, n // 2).free
            if chi != t or local is not True:
                bad.append((t, n, chi, local))
    return not bad, f"15 necklaces checked; mismatches={bad}"


def criterion_5():
    tree_fail, sp_fail = [], []
    for i in range(200):
        rng = random.Random(5_000 + i)
        n = rng.randint(2, 60)
        g = random_tree(n, 5_000 + i)
        k = rng.randint(0, n // 2)
        x = rng.sample(range(n), k)
        assert n > 2 * (k - 1)
        if find_deletable_disjoint_from(g, x, 3, 1) is None:
            tree_fail.append(i)
    for i in range(200):
        rng = random.Random(6_000 + i)
        n = rng.randint(12, 400)
        g = series_parallel_random(n, 6_000 + i)
        k = rng.randint(0, (n - 1) // 11)
        x = rng.sample(range(n), k)
        if find_deletable_disjoint_from(g, x, 4, 4) is None:
            sp_fail.append(i)
    ok = not tree_fail and not sp_fail
    return ok, f"trees 200 (failures {tree_fail}); SP 200 (failures {sp_fail})"


def criterion_6():
    budgets = unsound = 0
    for a in nx.graph_atlas_g()[1:]:
        if a.number_of_nodes() > 5 or not nx.is_connected(a):
            continue
        g = Graph(a.number_of_nodes(), a.edges())
        for f in product(*[range(1, g.degree(v) + 2) for v in range(g.n)]):
            budgets += 1
            if choosable_sufficient(g, f).yes and not choosable_exact(g, f)[0]:
                unsound += 1
    k4e = k4_minus_edge()
    f = [2 if k4e.degree(v) == 2 else 3 for v in range(4)]
    k4e_ok = choosable_exact(k4e, f)[0] is True
    c5_ok = choosable_exact(cycle(5), [2] * 5)[0] is False
    ok = unsound == 0 and k4e_ok and c5_ok
    return ok, f"{budgets} budgets, {unsound} unsound; K4-e (2,3,3,2) true={k4e_ok}; C5 f=2 false={c5_ok}"


def _differential_instances():
    for i in range(120):
        g = series_parallel_random(50 + 17 * i, 7_000 + i)
        yield g, random_lists(g, 4, 8, 7_500 + i), AlgoParams.for_t(4)
    for i in range(40):
        g = wagner_composition_random(2 + i // 2, 12, 8_000 + i)
        yield g, random_lists(g, 5, 10, 8_500 + i), AlgoParams.for_t(5)
    for i in range(30):
        g = random_tree(20 + 10 * i, 9_000 + i)
        yield g, random_lists(g, 3, 5, 9_500 + i), AlgoParams.for_t(3)
    for i in range(10):
        g = necklace(4, 3 + i)
        yield g, random_lists(g, 4, 6, 9_900 + i), AlgoParams.for_t(4, k_base=4)


def criterion_7():
    mismatches = []
    count = 0
    for k, (g, l, p) in enumerate(_differential_instances()):
        count += 1
        phi, _, recs = distributed_list_colour(g, l, p)
        ref, ref_recs = sequential_reference_colour(g, l, p)
        if phi.colors != ref.colors or recs != ref_recs:
            mismatches.append(k)
    return count == 200 and not mismatches, f"{count} instances, mismatches={mismatches}"


def criterion_8():
    rng = random.Random(8)
    disagree = []
    for i in range(10_000):
        n = rng.randint(1, 9)
        p = rng.random()
        g = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < p])
        for t in (3, 4):
            if is_kt_minor_free(g, t) != (has_minor(g, clique(t)) is None):
                disagree.append((i, t))
    v8 = wagner_v8()
    v8_ok = has_minor(v8, clique(5)) is None and has_minor(v8, clique(4)) is not None
    return not disagree and v8_ok, f"10000 graphs, disagreements={disagree[:5]}; V8 K5-free with K4 minor={v8_ok}"


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4,
            5: criterion_5, 6: criterion_6, 7: criterion_7, 8: criterion_8}


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number, request):
    ok, detail = CRITERIA[number]()
    _report(request, number, ok, detail)
    assert ok, detail


if __name__ == "__main__":
    results = {}
    for number, fn in CRITERIA.items():
        ok, detail = fn()
        _report(None, number, ok, detail)
        results[number] = ok
    sys.exit(0 if all(results.values()) else 1)
