import json
import subprocess
import sys

import pytest

from lochad import io
from lochad.cli import ERROR, FAIL, OK, UNKNOWN, fit_log, main, run_scaling
from lochad.generators import complete, random_lists
from lochad.graph import Colouring


def _gen(tmp_path, name, *args):
    out = tmp_path / name
    assert main(["gen", *args, "-o", str(out)]) == OK
    return out


def _err(capsys):
    return json.loads(capsys.readouterr().err.strip().splitlines()[-1])


def test_v8_is_k5_free(tmp_path, capsys):
    g = _gen(tmp_path, "v8.json", "--family", "v8")
    meta = json.loads(g.read_text())
    assert json.dumps(meta).count("certified_minor_free")
    assert main(["check", "minor-free", "--t", "5", str(g)]) == OK
    assert json.loads(capsys.readouterr().out)["verdict"] == "free"


def test_has_minor_prints_witness(tmp_path, capsys):
    g = tmp_path / "k5.json"
    io.save_graph(complete(5), g)
    assert main(["check", "minor-free", "--t", "4", str(g)]) == FAIL
    doc = json.loads(capsys.readouterr().out)
    assert doc["verdict"] == "has-minor" and len(doc["witness"]["branch_sets"]) == 4


def test_unknown_exit_code(tmp_path, capsys):
    g = _gen(tmp_path, "pl.json", "--family", "planar", "--n", "40", "--seed", "2")
    assert main(["check", "minor-free", "--t", "5", "--budget", "3", str(g)]) == UNKNOWN
    assert json.loads(capsys.readouterr().out)["verdict"] == "unknown"


def test_necklace_local_check(tmp_path, capsys):
    g = _gen(tmp_path, "neck.json", "--family", "necklace", "--t", "4", "--n", "5")
    assert main(["check", "local", "--t", "4", "--radius", "2", str(g)]) == OK
    assert main(["check", "local", "--t", "4", "--radius", "5", str(g)]) == FAIL
    capsys.readouterr()
    assert main(["check", "local", "--t", "4", str(g)]) == ERROR


def test_color_and_verify(tmp_path, capsys):
    g_path = _gen(tmp_path, "sp.json", "--family", "sp", "--n", "500", "--seed", "3")
    g = io.load_graph(g_path)
    lists = tmp_path / "l.json"
    io.save_lists(random_lists(g, 4, 8, 4), lists)
    phi, stats = tmp_path / "phi.json", tmp_path / "stats.json"
    assert main(["color", str(g_path), "--lists", str(lists), "--t", "4", "-o", str(phi), "--stats", str(stats)]) == OK
    s = json.loads(stats.read_text())
    assert s["verified"] is True and s["rounds"] > 0 and s["levels"]
    assert main(["verify", str(g_path), "--coloring", str(phi), "--lists", str(lists)]) == OK
    # break the colouring along an edge
    col = io.load_colouring(phi).colors
    u, v = g.edges[0]
    col[u] = col[v]
    bad = tmp_path / "bad.json"
    io.save_colouring(Colouring(col), bad)
    capsys.readouterr()
    assert main(["verify", str(g_path), "--coloring", str(bad)]) == FAIL
    assert json.loads(capsys.readouterr().out)["kind"] == "edge"


def test_color_needs_params(tmp_path, capsys):
    g_path = _gen(tmp_path, "p.json", "--family", "path", "--n", "5")
    lists = tmp_path / "l.json"
    io.save_lists(random_lists(io.load_graph(g_path), 3, 3, 0), lists)
    assert main(["color", str(g_path), "--lists", str(lists), "--c", "3"]) == ERROR
    assert "missing" in _err(capsys)["message"]
    assert main(["color", str(g_path), "--lists", str(lists), "--c", "3", "--cap", "2", "--size-cap", "1"]) == OK


def test_usage_errors(tmp_path, capsys):
    assert main(["gen", "--family", "sp", "--n", "10"]) == ERROR
    assert _err(capsys)["error"] == "usage"
    assert main(["frobnicate"]) == ERROR
    bad = tmp_path / "bad.json"
    bad.write_text("{not json")
    assert main(["check", "minor-free", "--t", "4", str(bad)]) == ERROR
    assert _err(capsys)["error"] == "parse"
    assert main(["check", "minor-free", "--t", "4", str(tmp_path / "missing.json")]) == ERROR


def test_fit_log():
    fit = fit_log([2**10, 2**12, 2**14], [30, 40, 50])
    assert fit["a"] == pytest.approx(5.0) and fit["b"] == pytest.approx(-20.0)
    assert max(fit["residuals"]) < 1e-9


def test_scaling_experiment(tmp_path, capsys):
    cfg = {"family": "sp", "t": 4, "sizes": [64, 128], "trials": 2, "seed": 5}
    path = tmp_path / "e.json"
    path.write_text(json.dumps(cfg))
    out = tmp_path / "r.json"
    assert main(["experiment", "scaling", "--config", str(path), "-o", str(out)]) == OK
    first = out.read_text()
    assert main(["experiment", "scaling", "--config", str(path), "-o", str(out)]) == OK
    assert out.read_text() == first
    doc = json.loads(first)
    assert [row["n"] for row in doc["table"]] == [64, 128]
    assert len(doc["runs"]) == 4 and all(r["verified"] for r in doc["runs"])
    assert set(doc["fit"]) == {"a", "b", "residuals"}
    path.write_text(json.dumps({**cfg, "sizes": [128, 64]}))
    assert main(["experiment", "scaling", "--config", str(path)]) == ERROR
    with pytest.raises(Exception):
        run_scaling({**cfg, "trials": 0})


def test_module_entry_point(tmp_path):
    r = subprocess.run([sys.executable, "-m", "lochad", "gen", "--family", "cycle", "--n", "5"],
                       capture_output=True, text=True, check=True)
    assert json.loads(r.stdout)["n"] == 5
