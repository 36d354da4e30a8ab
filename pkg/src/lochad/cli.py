"""Command-line entry point.

Exit codes: 0 success / property holds, 1 property fails, 2 undecided within
budget, 3 usage or input error (reported as JSON on stderr).
"""
from __future__ import annotations

import argparse
import json
import statistics
import sys
from math import log2
from pathlib import Path

import numpy as np

from . import io
from .algorithm import AlgoParams, ListColouringError, distributed_list_colour
from .generators import FAMILIES, GenSpec, generate, random_lists
from .graph import Graph, GraphError, PartialColouringError, verify_colouring
from .minors import BudgetExceeded, DEFAULT_BUDGET, clique, has_minor, is_kt_minor_free, is_locally_minor_free

OK, FAIL, UNKNOWN, ERROR = 0, 1, 2, 3
RANDOM_FAMILIES = {"sp", "planar", "wagner-sum", "tree"}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _emit(doc: dict, dst=None) -> None:
    text = io.dump_json(doc)
    if dst:
        Path(dst).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_gen(args) -> int:
    if args.family in RANDOM_FAMILIES and args.seed is None:
        raise UsageError(f"--seed is required for family {args.family}")
    knobs = {}
    if args.n_per_block is not None:
        knobs["n_per_block"] = args.n_per_block
    spec = GenSpec(args.family, n=args.n, t=args.t, k=args.k, seed=args.seed or 0, knobs=knobs)
    g, meta = generate(spec)
    meta.update({"n_arg": args.n, "t": args.t})
    text = io.save_graph(g, meta=meta)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def _minor_witness(g: Graph, t: int, budget: int):
    try:
        m = has_minor(g, clique(t), budget)
    except BudgetExceeded:
        return None
    return m.to_doc() if m else None


def cmd_check(args) -> int:
    g = io.load_graph(args.graph)
    if args.what == "minor-free":
        verdict = is_kt_minor_free(g, args.t, args.budget)
        doc = {"t": args.t, "verdict": {True: "free", False: "has-minor", None: "unknown"}[verdict]}
        if verdict is False:
            doc["witness"] = _minor_witness(g, args.t, args.budget)
        _emit(doc)
        return {True: OK, False: FAIL, None: UNKNOWN}[verdict]
    if args.radius is None:
        raise UsageError("check local needs --radius")
    res = is_locally_minor_free(g, args.t, args.radius, args.budget)
    _emit({"t": args.t, "radius": args.radius, **res.to_doc()})
    return {True: OK, False: FAIL, None: UNKNOWN}[res.free]


def _params(args) -> AlgoParams:
    base = AlgoParams.for_t(args.t) if args.t else None
    over = {k: v for k, v in (("c", args.c), ("cap", args.cap), ("size_cap", args.size_cap),
                              ("k_base", args.k_base), ("max_levels", args.max_levels)) if v is not None}
    if base is None:
        missing = [k for k in ("c", "cap", "size_cap") if k not in over]
        if missing:
            raise UsageError(f"give --t or all of --c --cap --size-cap (missing {', '.join(missing)})")
        return AlgoParams(**over)
    return AlgoParams(**{**base.__dict__, **over})


def cmd_color(args) -> int:
    g = io.load_graph(args.graph)
    lists = io.load_lists(args.lists)
    p = _params(args)
    phi, trace, levels = distributed_list_colour(g, lists, p, verify=False)
    verdict = verify_colouring(g, phi, lists)
    stats = {"rounds": trace.rounds, "rounds_sequential": trace.rounds_sequential,
             "max_msg_bytes": trace.max_msg_bytes,
             "levels": [lv.to_doc() for lv in levels], "verified": bool(verdict)}
    if args.stats:
        _emit(stats, args.stats)
    if not verdict:
        _emit({"error": "verification-failed", "kind": verdict.kind,
               "edge": verdict.edge, "vertex": verdict.vertex}, None)
        return FAIL
    text = io.save_colouring(phi)
    if args.output:
        Path(args.output).write_text(text)
    else:
        sys.stdout.write(text)
    return OK


def cmd_verify(args) -> int:
    g = io.load_graph(args.graph)
    lists = io.load_lists(args.lists) if args.lists else None
    phi = io.load_colouring(args.coloring)
    try:
        verdict = verify_colouring(g, phi, lists)
    except PartialColouringError as exc:
        _emit({"ok": False, "kind": "partial", "message": str(exc)})
        return FAIL
    _emit({"ok": verdict.ok, "kind": verdict.kind,
           "edge": list(verdict.edge) if verdict.edge else None, "vertex": verdict.vertex})
    return OK if verdict else FAIL


def fit_log(ns, rounds) -> dict:
    """Least-squares fit rounds ~ a*log2(n) + b with per-point relative residuals."""
    x = np.array([log2(n) for n in ns], dtype=float)
    y = np.array(rounds, dtype=float)
    if len(x) >= 2:
        a, b = np.polyfit(x, y, 1)
    else:
        a, b = 0.0, float(y[0])
    pred = a * x + b
    resid = [abs(float(yi - pi)) / float(yi) if yi else 0.0 for yi, pi in zip(y, pred)]
    return {"a": float(a), "b": float(b), "residuals": resid}


def run_scaling(cfg: dict) -> dict:
    """Generate, colour and verify each (size, trial); summarise rounds and progress."""
    sizes = cfg["sizes"]
    trials = int(cfg.get("trials", 1))
    if not sizes or sorted(sizes) != list(sizes):
        raise UsageError("sizes must be non-empty and ascending")
    if trials < 1:
        raise UsageError("trials must be >= 1")
    family = cfg.get("family", "sp")
    t = int(cfg.get("t", 4))
    params = AlgoParams.for_t(t, **cfg.get("params", {}))
    list_size = int(cfg.get("list_size", params.c))
    universe = int(cfg.get("universe", 2 * list_size))
    seed0 = int(cfg.get("seed", 0))
    knobs = cfg.get("knobs", {})
    runs = []
    table = []
    for n in sizes:
        per = []
        for trial in range(trials):
            seed = seed0 + 1000 * trial + n
            g, meta = generate(GenSpec(family, n=n, t=t, seed=seed, knobs=knobs))
            lists = random_lists(g, list_size, universe, seed + 1)
            phi, trace, levels = distributed_list_colour(g, lists, params)
            ok = bool(verify_colouring(g, phi, lists))
            prog = min((float(lv.progress) for lv in levels), default=1.0)
            rec = {"n": n, "trial": trial, "seed": seed, "vertices": g.n, "rounds": trace.rounds,
                   "rounds_sequential": trace.rounds_sequential, "levels": len(levels),
                   "min_progress": prog, "verified": ok}
            runs.append(rec)
            per.append(rec)
        table.append({"n": n, "median_rounds": statistics.median(r["rounds"] for r in per),
                      "max_rounds": max(r["rounds"] for r in per),
                      "min_progress": min(r["min_progress"] for r in per)})
    fit = fit_log([row["n"] for row in table], [row["median_rounds"] for row in table])
    return {"family": family, "t": t, "params": {k: v for k, v in params.__dict__.items() if k != "progress_floor"},
            "table": table, "fit": fit, "runs": runs}


def cmd_experiment(args) -> int:
    cfg = json.loads(Path(args.config).read_text())
    result = run_scaling(cfg)
    out = args.output or cfg.get("output")
    _emit(result, out)
    return OK if all(r["verified"] for r in result["runs"]) else FAIL


def build_parser() -> argparse.ArgumentParser:
    ap = _Parser(prog="lochad", description="Distributed list colouring of minor-free graphs.")
    sub = ap.add_subparsers(dest="cmd", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", help="generate a graph")
    g.add_argument("--family", required=True, choices=FAMILIES)
    g.add_argument("--n", type=int)
    g.add_argument("--t", type=int)
    g.add_argument("--k", type=int, help="number of blocks for wagner-sum")
    g.add_argument("--n-per-block", type=int)
    g.add_argument("--seed", type=int)
    g.add_argument("-o", "--output")
    g.set_defaults(func=cmd_gen)

    c = sub.add_parser("check", help="minor-freeness checks")
    c.add_argument("what", choices=["minor-free", "local"])
    c.add_argument("graph")
    c.add_argument("--t", type=int, required=True, choices=[3, 4, 5])
    c.add_argument("--radius", type=int)
    c.add_argument("--budget", type=int, default=DEFAULT_BUDGET)
    c.set_defaults(func=cmd_check)

    col = sub.add_parser("color", help="run the distributed list colouring")
    col.add_argument("graph")
    col.add_argument("--lists", required=True)
    col.add_argument("--t", type=int, choices=[3, 4, 5])
    col.add_argument("--c", type=int)
    col.add_argument("--cap", type=int)
    col.add_argument("--size-cap", type=int)
    col.add_argument("--k-base", type=int)
    col.add_argument("--max-levels", type=int)
    col.add_argument("-o", "--output")
    col.add_argument("--stats")
    col.set_defaults(func=cmd_color)

    v = sub.add_parser("verify", help="check a colouring")
    v.add_argument("graph")
    v.add_argument("--coloring", "--colouring", dest="coloring", required=True)
    v.add_argument("--lists")
    v.set_defaults(func=cmd_verify)

    e = sub.add_parser("experiment", help="scaling experiments")
    e.add_argument("kind", choices=["scaling"])
    e.add_argument("--config", required=True)
    e.add_argument("-o", "--output")
    e.set_defaults(func=cmd_experiment)
    return ap


def main(argv=None) -> int:
    try:
        args = build_parser().parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        err = {"error": "usage", "message": str(exc)}
    except io.ParseError as exc:
        err = {"error": "parse", "message": str(exc), "location": exc.location}
    except (GraphError, ValueError) as exc:
        err = {"error": "input", "message": str(exc)}
    except ListColouringError as exc:
        err = {"error": type(exc).__name__, "message": str(exc), "remaining": list(exc.remaining)[:50]}
    except OSError as exc:
        err = {"error": "io", "message": str(exc)}
    sys.stderr.write(json.dumps(err) + "\n")
    return ERROR


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
