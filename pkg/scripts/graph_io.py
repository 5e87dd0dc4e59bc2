#!/usr/bin/env python3
"""
Graph artifacts: JSON and DOT serialization of crystals.

The JSON artifact lists every element with its serialization, weight and
string lengths, plus every f-edge. Ids are dense and follow the canonical
order of the crystal, so rebuilding a crystal and saving it again gives
byte-identical output.
"""

import contextlib
import json
import logging
import os
import pathlib
import tempfile
from fractions import Fraction
from typing import Any, Dict, Optional, Union

import config
from cartan import AffineType, ClassicalType, format_weight
from crystal_core import CrystalGraph
from errors import CrystalStructureError

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)


def graph_to_dict(graph: CrystalGraph, spec: Optional[Dict[str, Any]] = None) -> Dict[str, Any]:
    """Serializable artifact of a crystal graph.

    Args:
        graph (CrystalGraph): the crystal
        spec (dict, optional): KR label fields stored alongside, e.g. family, n, r, s

    Returns:
        dict: schema_version, spec, types, index_set, nodes (serialization, weight,
        eps, phi) and colored edges
    """
    nodes = []
    for b in range(len(graph)):
        nodes.append({
            "id": b,
            "serialization": graph.key(b),
            "weight": format_weight(graph.weight(b)),
            "eps": {str(i): graph.epsilon(i, b) for i in graph.index_set},
            "phi": {str(i): graph.phi(i, b) for i in graph.index_set},
        })
    edges = [{"from": s, "to": t, "color": c} for s, t, c in graph.edges()]
    return {
        "schema_version": config.SCHEMA_VERSION,
        "spec": spec or {},
        "name": graph.name,
        "classical_type": ({"letter": graph.ctype.letter, "n": graph.ctype.n}
                           if graph.ctype else None),
        "affine_type": graph.affine.tag if graph.affine else None,
        "index_set": list(graph.index_set),
        "nodes": nodes,
        "edges": edges,
    }


def graph_to_json(graph: CrystalGraph, spec: Optional[Dict[str, Any]] = None) -> str:
    return json.dumps(graph_to_dict(graph, spec), indent=2, ensure_ascii=False) + "\n"


def graph_from_dict(data: Dict[str, Any]) -> CrystalGraph:
    """Rebuild a CrystalGraph from its artifact; string data is re-checked.

    Raises:
        CrystalStructureError: schema mismatch or inconsistent eps/phi
    """
    version = data.get("schema_version")
    if version != config.SCHEMA_VERSION:
        raise CrystalStructureError(
            f"artifact schema {version} does not match {config.SCHEMA_VERSION}")
    index_set = tuple(data["index_set"])
    nodes = sorted(data["nodes"], key=lambda node: node["id"])
    if [node["id"] for node in nodes] != list(range(len(nodes))):
        raise CrystalStructureError("artifact ids are not dense")
    f_edges = {i: [None] * len(nodes) for i in index_set}
    for edge in data["edges"]:
        f_edges[edge["color"]][edge["from"]] = edge["to"]
    ctype = None
    if data.get("classical_type"):
        ctype = ClassicalType(data["classical_type"]["letter"], data["classical_type"]["n"])
    affine = None
    if data.get("affine_type"):
        family, _, rank = data["affine_type"].partition(":")
        affine = AffineType(family, int(rank))
    graph = CrystalGraph([node["serialization"] for node in nodes],
                         [tuple(Fraction(c) for c in node["weight"]) for node in nodes],
                         f_edges, index_set, ctype, affine, name=data.get("name", ""))
    for node in nodes:
        for i in index_set:
            b = node["id"]
            if (graph.epsilon(i, b), graph.phi(i, b)) != (node["eps"][str(i)], node["phi"][str(i)]):
                raise CrystalStructureError(
                    f"artifact: recorded strings of {node['serialization']} disagree with edges")
    return graph


def graph_to_dot(graph: CrystalGraph) -> str:
    """DOT digraph: element serializations as labels, colors as edge labels."""

    def quote(text: str) -> str:
        return '"' + text.replace("\\", "\\\\").replace('"', '\\"') + '"'

    lines = [f"digraph {quote(graph.name or 'crystal')} {{", "  node [shape=box];"]
    for b in range(len(graph)):
        lines.append(f"  {b} [label={quote(graph.key(b))}];")
    for source, target, color in graph.edges():
        lines.append(f"  {source} -> {target} [label=\"{color}\"];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def write_atomic(path: Union[str, pathlib.Path], text: str) -> pathlib.Path:
    """Write text through a temp file in the same directory, then rename."""
    path = pathlib.Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        with contextlib.suppress(FileNotFoundError):
            os.unlink(tmp)
        raise
    log.debug(f"📁 Wrote {path}")
    return path


def save_graph(graph: CrystalGraph, path: Union[str, pathlib.Path],
               spec: Optional[Dict[str, Any]] = None, fmt: str = "json") -> pathlib.Path:
    """Write a graph as a JSON artifact or a DOT digraph.

    Raises:
        ValueError: fmt is neither "json" nor "dot"
    """
    if fmt == "json":
        text = graph_to_json(graph, spec)
    elif fmt == "dot":
        text = graph_to_dot(graph)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    return write_atomic(path, text)


def load_graph(path: Union[str, pathlib.Path]) -> CrystalGraph:
    """Read a JSON artifact back; see graph_from_dict."""
    text = pathlib.Path(path).read_text(encoding="utf-8")
    return graph_from_dict(json.loads(text))


def graphs_equal(first: CrystalGraph, second: CrystalGraph) -> bool:
    """Same keys, weights, index set and edges."""
    return (first.keys == second.keys
            and tuple(map(tuple, first.weights)) == tuple(map(tuple, second.weights))
            and first.index_set == second.index_set
            and sorted(first.edges()) == sorted(second.edges()))
