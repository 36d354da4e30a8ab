"""Compiled vs pure-Python kernels.

    python benchmarks/bench_kernels.py [--end-to-end N]

Times the bounded BFS and the list-colouring backtracker through both code
paths on the same inputs, and optionally one full colouring run with the
numba path switched on and off via LOCHAD_DISABLE_NUMBA.
"""
from __future__ import annotations

import argparse
import os
import random
import subprocess
import sys
import time

import numpy as np

from lochad import _kernels
from lochad.generators import complete, necklace, series_parallel_random
from lochad.graph import Graph


def _time(fn, repeat: int = 3) -> float:
    best = float("inf")
    for _ in range(repeat):
        t = time.perf_counter()
        fn()
        best = min(best, time.perf_counter() - t)
    return best


def bfs_case(g: Graph, radius: int, sources: list[int]):
    indptr, indices = g.csr

    def run(kernel):
        def go():
            for s in sources:
                dist = np.full(g.n, -1, dtype=np.int64)
                kernel(indptr, indices, s, radius, dist)
        return go
    return run


def colour_case(instances):
    prepared = []
    for h, lists in instances:
        indptr, indices = h.csr
        masks = np.array([sum(1 << c for c in lst) for lst in lists], dtype=np.uint64)
        prepared.append((indptr, indices, masks, np.empty(h.n, dtype=np.int64)))

    def run(kernel):
        def go():
            for indptr, indices, masks, out in prepared:
                kernel(indptr, indices, masks, out)
        return go
    return run


def pocket_instances(count: int, seed: int):
    rng = random.Random(seed)
    out = []
    for _ in range(count):
        n = rng.randint(1, 6)
        h = Graph(n, [(u, v) for u in range(n) for v in range(u + 1, n) if rng.random() < 0.6])
        out.append((h, [rng.sample(range(8), rng.randint(1, 4)) for _ in range(n)]))
    return out


def hard_instances():
    # uncolourable with one colour too few: the backtracker has to exhaust the tree
    return [(complete(9), [list(range(8))] * 9), (necklace(5, 4), [list(range(4))] * necklace(5, 4).n)]


def end_to_end(n: int) -> dict[str, float]:
    code = ("import time;from lochad.generators import series_parallel_random,random_lists;"
            "from lochad.algorithm import AlgoParams,distributed_list_colour;"
            f"g=series_parallel_random({n},1);l=random_lists(g,4,8,2);"
            "distributed_list_colour(series_parallel_random(50,0),random_lists(series_parallel_random(50,0),4,8,0),AlgoParams.for_t(4));"
            "t=time.perf_counter();distributed_list_colour(g,l,AlgoParams.for_t(4));print(time.perf_counter()-t)")
    res = {}
    for flag in ("0", "1"):
        env = {**os.environ, "LOCHAD_DISABLE_NUMBA": flag}
        out = subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True, check=True)
        res["numba" if flag == "0" else "python"] = float(out.stdout.strip())
    return res


def main(argv=None) -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--end-to-end", type=int, default=0, metavar="N",
                    help="also time a full colouring of an N-vertex series-parallel graph")
    args = ap.parse_args(argv)
    if not _kernels.USING_NUMBA:
        print("numba unavailable or disabled; only the Python path can be timed")
        return 1
    g = series_parallel_random(20_000, 3)
    cases = {
        "bfs r=3, 2000 sources": (bfs_case(g, 3, list(range(0, 20_000, 10))), _kernels.bfs_within,
                                  _kernels.py_bfs_within),
        "backtrack, 5000 pockets": (colour_case(pocket_instances(5000, 1)), _kernels.colour_backtrack,
                                    _kernels.py_colour_backtrack),
        "backtrack, hard refutations": (colour_case(hard_instances()), _kernels.colour_backtrack,
                                        _kernels.py_colour_backtrack),
    }
    print(f"{'case':32} {'numba s':>10} {'python s':>10} {'speedup':>8}")
    for name, (case, fast, slow) in cases.items():
        case(fast)()  # compile
        tf = _time(case(fast))
        ts = _time(case(slow), repeat=1)
        print(f"{name:32} {tf:10.4f} {ts:10.4f} {ts / tf:8.1f}")
    if args.end_to_end:
        res = end_to_end(args.end_to_end)
        print(f"{'colour SP n=' + str(args.end_to_end):32} {res['numba']:10.2f} {res['python']:10.2f} "
              f"{res['python'] / res['numba']:8.2f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
