#!/usr/bin/env python3
"""
FeynLab Command Line Test Suite
Exit codes, output formats and reproducible reruns
"""

import json
import os
import sys

import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..'))
sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

import main as cli  # noqa: E402
from data.graph_io import save_graph  # noqa: E402
from data.graph_library import banana  # noqa: E402

FAST = ["--nodes", "6"]


def _run(tmp_path, name, *argv):
    out = tmp_path / name
    code = cli.main([*argv, "--out", str(out)])
    return code, out


def test_graph_info(tmp_path):
    code, out = _run(tmp_path, "info.json", "graph-info", "--graph", "triangle")
    assert code == cli.EXIT_OK
    records = json.loads(out.read_text())
    assert len(records) == 7
    assert {r["betti_1"] for r in records} == {1}
    assert {r["spanning_trees"] for r in records} == {3}


def test_graph_info_from_file(tmp_path):
    path = tmp_path / "banana.json"
    save_graph(banana(), str(path), "banana")
    code, out = _run(tmp_path, "info.csv", "graph-info", "--graph", str(path), "--format", "csv")
    assert code == cli.EXIT_OK
    header = out.read_text().splitlines()[0].split(",")
    assert "laman_slack" in header and "witness" in header


def test_bad_input_exit_code(tmp_path):
    assert cli.main(["graph-info"]) == cli.EXIT_BAD_INPUT
    assert cli.main(["graph-info", "--graph", str(tmp_path / "missing.json")]) == cli.EXIT_BAD_INPUT
    assert cli.main(["integrate", "--graph", "triangle"]) == cli.EXIT_BAD_INPUT
    assert cli.main(["verify", "--suite", "everything"]) == cli.EXIT_BAD_INPUT
    config = tmp_path / "run.json"
    config.write_text('{"colour": "red"}')
    assert cli.main(["graph-info", "--graph", "triangle", "--config", str(config)]) == cli.EXIT_BAD_INPUT
    broken = tmp_path / "broken.json"
    broken.write_text('{"vertices": 2,\n "edges": [[1, 2]]')
    assert cli.main(["graph-info", "--graph", str(broken)]) == cli.EXIT_BAD_INPUT


def test_argparse_rejects_unknown_format():
    with pytest.raises(SystemExit) as info:
        cli.main(["graph-info", "--graph", "triangle", "--format", "xml"])
    assert info.value.code == 2


def test_integrate_reruns_are_byte_identical(tmp_path):
    argv = ["integrate", "--graph", "single_edge", "--d", "1", "--dprime", "0", "--eps-grid", "2", *FAST]
    code, first = _run(tmp_path, "first.json", *argv)
    assert code == cli.EXIT_OK
    _, second = _run(tmp_path, "second.json", *argv)
    assert first.read_bytes() == second.read_bytes()
    records = json.loads(first.read_text())
    assert [r["eps"] for r in records] == [0.25, 0.0625, 0.0]
    assert "wall_time" not in records[0]
    assert len({r["problem_hash"] for r in records}) == 1


def test_integrate_plot_data(tmp_path):
    argv = ["integrate", "--graph", "single_edge", "--d", "1", "--dprime", "0", "--eps-grid", "1",
            "--format", "plot-data", "--wall-time", *FAST]
    code, out = _run(tmp_path, "sweep.dat", *argv)
    assert code == cli.EXIT_OK
    lines = out.read_text().splitlines()
    assert lines[0] == "# x y yerr"
    assert len(lines) == 3
    assert lines[1].startswith("0.25 ")


def test_verify_suite(tmp_path):
    code, out = _run(tmp_path, "verify.json", "verify", "--suite", "kirchhoff")
    assert code == cli.EXIT_OK
    records = json.loads(out.read_text())
    assert records[0]["check"] == "matrix-tree determinant"
    assert records[0]["passed"]


def test_kernel_eval(tmp_path):
    code, out = _run(tmp_path, "kernel.json", "kernel-eval", "--d", "1", "--dprime", "1",
                     "--point", "0.3,0.2,0.5", "--L", "0.5")
    assert code == cli.EXIT_OK
    records = json.loads(out.read_text())
    quantities = {r["quantity"] for r in records}
    assert {"H", "P_t", "BM[heat]", "BM[displayed]"} <= quantities
    assert records[0]["re"] > 0
    assert cli.main(["kernel-eval", "--d", "1", "--dprime", "1", "--point", "0.3,0.2"]) == cli.EXIT_BAD_INPUT
    assert cli.main(["kernel-eval", "--d", "1", "--dprime", "1", "--point", "a,b,c"]) == cli.EXIT_BAD_INPUT


def main():
    from runner import run_module
    return run_module("FEYNLAB COMMAND LINE TEST SUITE", globals())


if __name__ == "__main__":
    main()
