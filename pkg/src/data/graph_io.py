"""Graph JSON files.

    {"name": "triangle", "vertices": 3,
     "edges": [{"tail": 1, "head": 2, "decoration": [0]}, [2, 3], ...]}

An edge is either an object or a [tail, head] pair. The last vertex is the base.
"""
import json
from pathlib import Path
from typing import Any, Dict, Optional, Tuple

try:
    from ..graphs.decorated_graph import DecoratedGraph, Edge
    from ..utils.errors import GraphError, GraphFormatError
    from ..utils.logger import logger
except ImportError:
    from graphs.decorated_graph import DecoratedGraph, Edge
    from utils.errors import GraphError, GraphFormatError
    from utils.logger import logger


def _line_of(text: str, token: str, occurrence: int = 0) -> Optional[int]:
    """1-based line of the n-th occurrence of token, if any."""
    position = -1
    for _ in range(occurrence + 1):
        position = text.find(token, position + 1)
        if position < 0:
            return None
    return text.count("\n", 0, position) + 1


def _as_int(value: Any, field: str, text: str, occurrence: int = 0) -> int:
    if isinstance(value, bool) or not isinstance(value, int):
        raise GraphFormatError(f"expected an integer, got {value!r}", field,
                               _line_of(text, f'"{field.split(".")[-1]}"', occurrence))
    return value


def _parse_edge(raw: Any, index: int, text: str) -> Edge:
    field = f"edges[{index}]"
    line = _line_of(text, "[", index + 1) if not isinstance(raw, dict) else _line_of(text, "{", index + 1)
    if isinstance(raw, list):
        if len(raw) != 2:
            raise GraphFormatError("an edge pair must be [tail, head]", field, line)
        tail, head = raw
        decoration: Tuple[int, ...] = ()
    elif isinstance(raw, dict):
        unknown = set(raw) - {"tail", "head", "decoration"}
        if unknown:
            raise GraphFormatError(f"unknown edge keys {sorted(unknown)}", field, line)
        if "tail" not in raw or "head" not in raw:
            raise GraphFormatError("an edge needs 'tail' and 'head'", field, line)
        tail, head = raw["tail"], raw["head"]
        decoration = raw.get("decoration", [])
        if not isinstance(decoration, list):
            raise GraphFormatError("decoration must be a list of integers", f"{field}.decoration", line)
        decoration = tuple(_as_int(n, f"{field}.decoration", text) for n in decoration)
    else:
        raise GraphFormatError("an edge must be an object or a [tail, head] pair", field, line)
    if any(isinstance(v, bool) or not isinstance(v, int) for v in (tail, head)):
        raise GraphFormatError("edge endpoints must be integers", field, line)
    return Edge(head=head, tail=tail, decoration=decoration)


def parse_graph(text: str) -> Tuple[DecoratedGraph, Dict[str, Any]]:
    """Parse graph JSON text; returns the graph and the remaining metadata."""
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise GraphFormatError(f"invalid JSON: {e.msg}", None, e.lineno) from e
    if not isinstance(data, dict):
        raise GraphFormatError("the top level must be an object", None, 1)
    unknown = set(data) - {"name", "vertices", "edges", "metadata"}
    if unknown:
        key = sorted(unknown)[0]
        raise GraphFormatError(f"unknown keys {sorted(unknown)}", key, _line_of(text, f'"{key}"'))
    if "vertices" not in data:
        raise GraphFormatError("missing vertex count", "vertices")
    vertices = _as_int(data["vertices"], "vertices", text)
    edges_raw = data.get("edges")
    if not isinstance(edges_raw, list):
        raise GraphFormatError("edges must be a list", "edges", _line_of(text, '"edges"'))
    edges = tuple(_parse_edge(raw, i, text) for i, raw in enumerate(edges_raw))
    try:
        graph = DecoratedGraph(vertices, edges)
    except GraphError as e:
        raise GraphFormatError(str(e), "edges", _line_of(text, '"edges"')) from e
    if not edges:
        raise GraphFormatError("graph has no edges", "edges", _line_of(text, '"edges"'))
    if not graph.is_connected():
        raise GraphFormatError("graph is disconnected", "edges", _line_of(text, '"edges"'))
    metadata = {"name": data.get("name", ""), **data.get("metadata", {})}
    return graph, metadata


def load_graph(path: str) -> Tuple[DecoratedGraph, Dict[str, Any]]:
    try:
        text = Path(path).read_text()
    except OSError as e:
        raise GraphFormatError(f"cannot read {path}: {e}") from e
    graph, metadata = parse_graph(text)
    metadata.setdefault("name", Path(path).stem)
    if not metadata["name"]:
        metadata["name"] = Path(path).stem
    logger.debug(f"loaded graph {metadata['name']} from {path}: {graph.vertex_count} vertices, "
                 f"{graph.edge_count} edges")
    return graph, metadata


def graph_to_dict(graph: DecoratedGraph, name: str = "") -> Dict[str, Any]:
    edges = []
    for edge in graph.edges:
        record = {"tail": edge.tail, "head": edge.head}
        if edge.decoration:
            record["decoration"] = list(edge.decoration)
        edges.append(record)
    return {"name": name, "vertices": graph.vertex_count, "edges": edges}


def save_graph(graph: DecoratedGraph, path: str, name: str = ""):
    Path(path).parent.mkdir(parents=True, exist_ok=True)
    Path(path).write_text(json.dumps(graph_to_dict(graph, name), indent=2) + "\n")
