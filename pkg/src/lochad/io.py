"""JSON documents for graphs, list assignments, colourings and minor witnesses.

Formats::

    graph      {"n": 4, "edges": [[0, 1], [1, 2]], "meta": {...}}   # meta optional
    lists      {"universe": 8, "lists": {"0": [1, 5], ...}}
    colouring  {"colors": {"0": 3, ...}}
    minor      {"pattern": "K5", "branch_sets": [[...], ...]}
"""
from __future__ import annotations

import json
from pathlib import Path
from typing import Any, IO

from .graph import Colouring, Graph, GraphError, ListAssignment


class ParseError(ValueError):
    """Malformed document; ``location`` is a JSON-pointer-like path."""

    def __init__(self, message: str, location: str = ""):
        super().__init__(f"{location}: {message}" if location else message)
        self.location = location


def _read(src) -> Any:
    if isinstance(src, (str, Path)):
        with open(src) as fh:
            text = fh.read()
    elif hasattr(src, "read"):
        text = src.read()
    else:
        return src
    try:
        return json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, f"line {exc.lineno} col {exc.colno}") from None


def _write(doc: dict, dst) -> str:
    text = json.dumps(doc, sort_keys=False, separators=(", ", ": ")) + "\n"
    if dst is None:
        return text
    if isinstance(dst, (str, Path)):
        Path(dst).write_text(text)
    else:
        dst.write(text)
    return text


def graph_to_doc(g: Graph, meta: dict | None = None) -> dict:
    doc: dict[str, Any] = {"n": g.n, "edges": [[u, v] for u, v in g.edges]}
    if meta is not None:
        doc["meta"] = meta
    return doc


def graph_from_doc(doc: Any) -> Graph:
    if not isinstance(doc, dict):
        raise ParseError("expected an object", "/")
    n = doc.get("n")
    if not isinstance(n, int) or isinstance(n, bool) or n < 0:
        raise ParseError("'n' must be a non-negative integer", "/n")
    edges = doc.get("edges")
    if not isinstance(edges, list):
        raise ParseError("'edges' must be a list", "/edges")
    seen = set()
    pairs = []
    for i, e in enumerate(edges):
        loc = f"/edges/{i}"
        if not (isinstance(e, list) and len(e) == 2 and all(isinstance(x, int) and not isinstance(x, bool) for x in e)):
            raise ParseError("edge must be a pair of integers", loc)
        u, v = e
        if u == v:
            raise ParseError(f"loop at vertex {u}", loc)
        if not (0 <= u < n and 0 <= v < n):
            raise ParseError(f"vertex out of range for n={n}", loc)
        key = (min(u, v), max(u, v))
        if key in seen:
            raise ParseError(f"duplicate edge {list(key)}", loc)
        seen.add(key)
        pairs.append(key)
    try:
        return Graph(n, pairs)
    except GraphError as exc:  # pragma: no cover - checks above are stricter
        raise ParseError(str(exc), "/edges") from None


def load_graph(src) -> Graph:
    return graph_from_doc(_read(src))


def load_graph_with_meta(src) -> tuple[Graph, dict | None]:
    doc = _read(src)
    return graph_from_doc(doc), doc.get("meta") if isinstance(doc, dict) else None


def save_graph(g: Graph, dst=None, meta: dict | None = None) -> str:
    return _write(graph_to_doc(g, meta), dst)


def lists_to_doc(lists: ListAssignment) -> dict:
    return {
        "universe": lists.universe,
        "lists": {str(v): list(lists.lists[v]) for v in sorted(lists.lists)},
    }


def lists_from_doc(doc: Any) -> ListAssignment:
    if not isinstance(doc, dict):
        raise ParseError("expected an object", "/")
    universe = doc.get("universe")
    if not isinstance(universe, int) or universe < 0:
        raise ParseError("'universe' must be a non-negative integer", "/universe")
    raw = doc.get("lists")
    if not isinstance(raw, dict):
        raise ParseError("'lists' must be an object", "/lists")
    out = {}
    for key, cols in raw.items():
        loc = f"/lists/{key}"
        try:
            v = int(key)
        except ValueError:
            raise ParseError("vertex key must be an integer", loc) from None
        if not isinstance(cols, list) or not all(isinstance(c, int) for c in cols):
            raise ParseError("list must be an array of integers", loc)
        if len(set(cols)) != len(cols):
            raise ParseError("repeated colour", loc)
        if any(c < 0 or c >= universe for c in cols):
            raise ParseError(f"colour outside universe {universe}", loc)
        out[v] = tuple(cols)
    return ListAssignment(out, universe)


def load_lists(src) -> ListAssignment:
    return lists_from_doc(_read(src))


def save_lists(lists: ListAssignment, dst=None) -> str:
    return _write(lists_to_doc(lists), dst)


def colouring_to_doc(phi: Colouring) -> dict:
    return {"colors": {str(v): phi.colors[v] for v in sorted(phi.colors)}}


def colouring_from_doc(doc: Any) -> Colouring:
    if not isinstance(doc, dict) or not isinstance(doc.get("colors"), dict):
        raise ParseError("expected {'colors': {...}}", "/colors")
    out = {}
    for key, c in doc["colors"].items():
        try:
            v = int(key)
        except ValueError:
            raise ParseError("vertex key must be an integer", f"/colors/{key}") from None
        if not isinstance(c, int):
            raise ParseError("colour must be an integer", f"/colors/{key}")
        out[v] = c
    return Colouring(out)


def load_colouring(src) -> Colouring:
    return colouring_from_doc(_read(src))


def save_colouring(phi: Colouring, dst=None) -> str:
    return _write(colouring_to_doc(phi), dst)


def dump_json(doc: dict, dst: IO | str | Path | None = None) -> str:
    return _write(doc, dst)
