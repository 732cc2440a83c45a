#!/usr/bin/env python3
"""
FeynLab Data Test Suite
Graph files, the graph library, the results store and run configuration
"""

import json
import logging
import os
import sys

import numpy as np
import pytest

sys.path.append(os.path.join(os.path.dirname(__file__), '..', 'src'))

from data.graph_io import graph_to_dict, load_graph, parse_graph, save_graph  # noqa: E402
from data.graph_library import get_graph, graph_names, path_tree, triangle  # noqa: E402
from data.results_store import store  # noqa: E402
from utils.config import QuadratureSpec, RunConfig  # noqa: E402
from utils.errors import ConfigError, GraphError, GraphFormatError  # noqa: E402
from utils.logger import logger  # noqa: E402
from utils.parallel import parallel_map  # noqa: E402

TRIANGLE_JSON = """{
  "name": "triangle",
  "vertices": 3,
  "edges": [
    [1, 2],
    {"tail": 2, "head": 3, "decoration": [1]},
    [1, 3]
  ]
}
"""


def test_parse_graph():
    graph, metadata = parse_graph(TRIANGLE_JSON)
    assert metadata["name"] == "triangle"
    assert graph.vertex_count == 3
    assert [(e.tail, e.head) for e in graph.edges] == [(1, 2), (2, 3), (1, 3)]
    assert graph.edges[1].decoration == (1,)


def test_parse_errors_name_field_and_line():
    with pytest.raises(GraphFormatError) as info:
        parse_graph('{\n  "vertices": 2,\n  "edges": [[1, 2]],\n  "colour": 1\n}')
    assert info.value.field == "colour"
    assert info.value.line == 4

    with pytest.raises(GraphFormatError) as info:
        parse_graph('{\n  "vertices": 2,\n  "edges": [\n    [1, 2, 3]\n  ]\n}')
    assert info.value.field == "edges[0]"
    assert info.value.line == 4

    with pytest.raises(GraphFormatError) as info:
        parse_graph('{"vertices": 2,\n "edges": [[1, 2]]')
    assert info.value.line is not None

    with pytest.raises(GraphFormatError) as info:
        parse_graph('{"vertices": "two", "edges": []}')
    assert info.value.field == "vertices"


def test_parse_rejects_bad_graphs():
    with pytest.raises(GraphFormatError, match="no edges"):
        parse_graph('{"vertices": 2, "edges": []}')
    with pytest.raises(GraphFormatError, match="disconnected"):
        parse_graph('{"vertices": 4, "edges": [[1, 2], [3, 4]]}')
    with pytest.raises(GraphFormatError):
        parse_graph('{"vertices": 2, "edges": [[1, 5]]}')
    with pytest.raises(GraphFormatError):
        parse_graph('{"vertices": 2, "edges": [{"tail": 1}]}')


def test_graph_file_round_trip(tmp_path):
    target = tmp_path / "graphs" / "triangle.json"
    save_graph(triangle(), str(target), "triangle")
    graph, metadata = load_graph(str(target))
    assert metadata["name"] == "triangle"
    assert graph_to_dict(graph) == graph_to_dict(triangle())
    with pytest.raises(GraphFormatError):
        load_graph(str(tmp_path / "missing.json"))


def test_graph_library():
    assert "theta" in graph_names()
    assert get_graph("square").edge_count == 4
    assert path_tree(4).edge_count == 3
    with pytest.raises(GraphError):
        get_graph("petersen")
    with pytest.raises(GraphError):
        path_tree(1)


def test_results_are_deterministic():
    records = [{"value_re": 0.5, "value_im": np.float64(0.0), "nodes": np.int64(12), "wall_time": 1.25,
                "witness": [0, 1]}]
    text = store.to_json(records)
    assert "wall_time" not in text
    assert text == store.to_json(records)
    assert json.loads(text)[0]["nodes"] == 12
    assert "wall_time" in store.to_json(records, include_time=True)
    csv = store.to_csv(records)
    assert csv.splitlines()[0] == "nodes,value_im,value_re,witness"
    assert store.plot_data([{"eps": 0.25, "value_re": 1.0, "error": 0.01}], "eps") == \
        "# x y yerr\n0.25 1 0.01\n"


def test_results_store_save_and_load(tmp_path):
    previous = store.directory
    try:
        assert store.connect(str(tmp_path))
        records = [{"eps": 0.25, "value_re": 1.0}, {"eps": 0.0625, "value_re": 1.5}]
        assert store.save(records, "sweep.csv", fmt="csv")
        assert (tmp_path / "sweep.csv").exists()
        frame = store.load("sweep.csv")
        assert list(frame["value_re"]) == [1.0, 1.5]
        assert store.save(records, "sweep.json")
        assert len(store.load("sweep.json")) == 2
        assert store.load("nothing.json").empty
    finally:
        store.connect(str(previous) if previous else None)


def test_quadrature_spec():
    spec = QuadratureSpec()
    assert spec.nodes_per_axis == 12 and spec.richardson_levels == 5
    assert spec.halved().nodes_per_axis == 6
    assert QuadratureSpec(nodes_per_axis=3).halved().nodes_per_axis == 2
    with pytest.raises(ConfigError):
        QuadratureSpec(nodes_per_axis=1)
    with pytest.raises(ConfigError):
        QuadratureSpec(richardson_levels=1)
    with pytest.raises(ConfigError):
        QuadratureSpec.from_dict({"nodes": 4})


def test_run_config_merges_file_and_flags(tmp_path):
    path = tmp_path / "run.json"
    path.write_text(json.dumps({"L": 2.0, "eps_grid": 4, "quadrature": {"nodes_per_axis": 6, "seed": 3}}))
    config = RunConfig.from_sources("integrate", str(path), {"eps_grid": 2, "d": None,
                                                             "quadrature": {"nodes_per_axis": 10, "seed": None}})
    assert config.L == 2.0
    assert config.eps_grid == 2
    assert config.quadrature.nodes_per_axis == 10
    assert config.quadrature.seed == 3


def test_run_config_errors(tmp_path):
    with pytest.raises(ConfigError):
        RunConfig.from_sources("integrate", None, {"colour": "red"})
    with pytest.raises(ConfigError):
        RunConfig.from_sources("simulate")
    with pytest.raises(ConfigError):
        RunConfig.from_sources("integrate", str(tmp_path / "absent.json"))
    with pytest.raises(ConfigError):
        RunConfig("integrate", format="xml")
    with pytest.raises(ConfigError):
        RunConfig("integrate", L=-1.0)


def test_parallel_map_keeps_order():
    assert parallel_map(abs, range(-3, 2)) == [3, 2, 1, 0, 1]
    assert parallel_map(abs, range(-20, 20), jobs=2) == [abs(x) for x in range(-20, 20)]


def test_extrapolation_logging_levels():
    class Collect(logging.Handler):
        def __init__(self):
            super().__init__(logging.DEBUG)
            self.records = []

        def emit(self, record):
            self.records.append(record)

    collect = Collect()
    logger.logger.addHandler(collect)
    try:
        logger.extrapolation("uv_limit", 5, "ok")
        logger.extrapolation("uv_limit", 5, "flagged")
    finally:
        logger.logger.removeHandler(collect)
    assert [r.levelno for r in collect.records] == [logging.DEBUG, logging.WARNING]
    assert collect.records[0].getMessage().endswith("levels=5 - ok")


def main():
    from runner import run_module
    return run_module("FEYNLAB DATA TEST SUITE", globals())


if __name__ == "__main__":
    main()
