import json

import pytest

import config
from errors import CrystalStructureError
from graph_io import (graph_from_dict, graph_to_dict, graph_to_dot, graph_to_json, graphs_equal,
                      load_graph, save_graph, write_atomic)
from kr import KRSpec, build_kr, clear_memo


def kr_graph(type_string, r, s):
    spec = KRSpec.parse(type_string, r, s)
    return spec, build_kr(spec).graph


@pytest.mark.parametrize("type_string, r, s", [
    ("A1:3", 1, 1),
    ("C1:2", 1, 2),
    ("B1:2", 2, 1),
    ("A2e:2", 1, 1),
])
def test_save_and_load(tmp_path, type_string, r, s):
    spec, graph = kr_graph(type_string, r, s)
    path = save_graph(graph, tmp_path / "crystal.json", spec.to_dict())
    loaded = load_graph(path)
    assert graphs_equal(graph, loaded)
    assert loaded.affine == graph.affine
    assert loaded.ctype == graph.ctype
    data = json.loads(path.read_text(encoding="utf-8"))
    assert data["schema_version"] == config.SCHEMA_VERSION
    assert data["spec"] == spec.to_dict()
    assert len(data["nodes"]) == len(graph)


def test_artifact_records_strings():
    _, graph = kr_graph("A1:3", 1, 1)
    data = graph_to_dict(graph)
    assert data["index_set"] == [0, 1, 2]
    assert len(data["edges"]) == 3
    top = data["nodes"][graph.highest(graph.classical_index_set)[0]]
    assert top["eps"]["1"] == 0
    assert top["phi"]["1"] == 1


def test_json_is_deterministic():
    spec, graph = kr_graph("C1:2", 2, 1)
    first = graph_to_json(graph, spec.to_dict())
    clear_memo()
    again = build_kr(spec).graph
    assert graph_to_json(again, spec.to_dict()) == first


def test_dot_output():
    _, graph = kr_graph("A1:3", 1, 1)
    dot = graph_to_dot(graph)
    assert dot.startswith('digraph "B^{1,1}[A1:3]" {')
    assert dot.count("[label=\"") == len(graph) + 3
    assert dot.rstrip().endswith("}")


def test_save_rejects_unknown_format(tmp_path):
    _, graph = kr_graph("A1:3", 1, 1)
    with pytest.raises(ValueError):
        save_graph(graph, tmp_path / "crystal.txt", fmt="xml")


def test_write_atomic_leaves_no_temp_files(tmp_path):
    target = tmp_path / "nested" / "out.json"
    write_atomic(target, "first\n")
    write_atomic(target, "second\n")
    assert target.read_text(encoding="utf-8") == "second\n"
    assert [p.name for p in target.parent.iterdir()] == ["out.json"]


def test_schema_mismatch_is_rejected():
    _, graph = kr_graph("A1:3", 1, 1)
    data = graph_to_dict(graph)
    data["schema_version"] = config.SCHEMA_VERSION + 1
    with pytest.raises(CrystalStructureError):
        graph_from_dict(data)


def test_tampered_strings_are_rejected():
    _, graph = kr_graph("A1:3", 1, 1)
    data = graph_to_dict(graph)
    data["nodes"][0]["eps"]["1"] += 1
    with pytest.raises(CrystalStructureError):
        graph_from_dict(data)


def test_sparse_ids_are_rejected():
    _, graph = kr_graph("A1:3", 1, 1)
    data = graph_to_dict(graph)
    data["nodes"][-1]["id"] = len(graph) + 5
    with pytest.raises(CrystalStructureError):
        graph_from_dict(data)
