import pytest

from analysis import (Verdict, check_connected, check_decomposition, check_regular, check_sigma,
                      check_simple, check_tensor_connected, check_witness, extremal_elements,
                      is_extremal, partitions_up_to, summarize, verify_map, witness_all,
                      witness_nonextremal)
from cartan import ClassicalType, Partition
from crystal_core import disjoint_union
from errors import KRSpecError
from kr import KRSpec, build_kr, similarity_map
from tableaux import build_classical

C2 = ClassicalType("C", 2)


def spec(type_string, r, s):
    return KRSpec.parse(type_string, r, s)


@pytest.mark.parametrize("type_string, r, s", [
    ("A1:3", 1, 2),
    ("C1:2", 1, 2),
    ("B1:2", 2, 1),
    ("D2:2", 1, 1),
    ("A2o:2", 2, 1),
])
def test_kr_crystals_are_simple(type_string, r, s):
    kr = build_kr(spec(type_string, r, s))
    verdict = check_simple(kr.graph, kr.spec)
    assert verdict.passed, verdict.counterexample
    assert verdict.detail["fiber"] == 1


def test_classical_crystal_extremal_elements():
    graph = build_classical(C2, Partition((1,)))
    assert extremal_elements(graph) == list(range(len(graph)))
    assert all(is_extremal(graph, b)[0] for b in range(len(graph)))
    assert sorted(is_extremal(graph, 0)[1]) == list(range(len(graph)))


def test_disjoint_union_is_not_simple():
    union = disjoint_union([build_classical(C2, Partition((1,))),
                            build_classical(C2, Partition(()))])
    verdict = check_simple(union)
    assert not verdict.passed
    assert verdict.counterexample["reason"] == "extremal weights lie in several Weyl orbits"


@pytest.mark.parametrize("type_string, r, s", [
    ("C1:2", 1, 2),
    ("C1:2", 2, 2),
    ("D1:4", 2, 1),
    ("D1:4", 4, 2),
    ("A2e:2", 1, 2),
    ("D2:2", 2, 2),
])
def test_check_decomposition(type_string, r, s):
    verdict = check_decomposition(build_kr(spec(type_string, r, s)))
    assert verdict.passed, verdict.counterexample
    assert verdict.to_json()["verdict"] == "pass"


def test_check_connected():
    verdict = check_connected(build_kr(spec("B1:2", 1, 1)))
    assert verdict.passed
    assert verdict.detail == {"size": 5}


def test_tensor_products_are_connected():
    verdict = check_tensor_connected([spec("A1:3", 1, 1), spec("A1:3", 2, 1)], simple=True)
    assert verdict.passed
    assert verdict.detail["size"] == 9
    assert verdict.detail["simple"]
    assert check_tensor_connected([spec("C1:2", 1, 1), spec("C1:2", 1, 1)]).passed


@pytest.mark.parametrize("type_string, factors, size", [
    ("A1:3", [(1, 2), (2, 1)], 6 * 3),
    ("A1:4", [(1, 1), (3, 2)], 4 * 10),
    ("B1:2", [(1, 1), (2, 1)], 5 * 4),
    ("C1:2", [(2, 1), (1, 2)], 5 * 11),
    ("D1:4", [(4, 1), (3, 1)], 8 * 8),
    ("D1:4", [(1, 1), (4, 1)], 8 * 8),
    ("A2e:2", [(1, 1), (1, 1)], 5 * 5),
    ("A2o:2", [(1, 1), (2, 1)], 4 * 6),
    ("D2:2", [(1, 1), (2, 1)], 6 * 4),
    ("D2:2", [(2, 1), (1, 1)], 4 * 6),
    ("C1:2", [(1, 1), (2, 1), (1, 1)], 4 * 5 * 4),
])
def test_mixed_tensor_products_are_connected_and_simple(type_string, factors, size):
    verdict = check_tensor_connected([spec(type_string, r, s) for r, s in factors], simple=True)
    assert verdict.passed, verdict.counterexample
    assert verdict.detail["size"] == size
    assert verdict.detail["simple"]


def test_tensor_check_needs_factors():
    with pytest.raises(KRSpecError):
        check_tensor_connected([])


@pytest.mark.parametrize("type_string, r, s", [
    ("A1:3", 1, 1),
    ("A1:3", 2, 2),
    ("B1:3", 2, 1),
    ("C1:2", 1, 2),
])
def test_check_regular(type_string, r, s):
    kr = build_kr(spec(type_string, r, s))
    verdict = check_regular(kr.graph, kr.spec)
    assert verdict.passed, verdict.counterexample


def test_check_regular_skips_double_bonds_at_zero():
    kr = build_kr(spec("C1:2", 1, 1))
    verdict = check_regular(kr.graph, kr.spec)
    assert "0,1" in verdict.detail["skipped_pairs"]
    assert check_regular(build_kr(spec("A1:3", 1, 1)).graph).detail["skipped_pairs"] == []


def test_verify_map_accepts_similarity():
    cmap = similarity_map(spec("C1:2", 1, 1), 2)
    report = verify_map(cmap)
    assert report.ok, report.violations
    assert report.checked == len(cmap.source) * len(cmap.source.index_set)


def test_verify_map_catches_broken_assignment():
    cmap = similarity_map(spec("A1:3", 1, 1), 2)
    first, second = sorted(cmap.assignment)[:2]
    cmap.assignment[first], cmap.assignment[second] = (cmap.assignment[second],
                                                       cmap.assignment[first])
    assert not verify_map(cmap).ok


@pytest.mark.parametrize("type_string, r, s", [
    ("B1:2", 1, 1),
    ("A2o:2", 2, 1),
    ("D1:4", 4, 1),
    ("D1:4", 3, 2),
    ("C1:2", 2, 1),
    ("D2:2", 2, 2),
])
def test_check_sigma(type_string, r, s):
    verdict = check_sigma(build_kr(spec(type_string, r, s)))
    assert verdict.passed, verdict.counterexample


def test_check_sigma_needs_sigma_data():
    with pytest.raises(KRSpecError):
        check_sigma(build_kr(spec("A1:3", 1, 1)))


def test_witness_for_c_route():
    kr_spec = spec("C1:2", 1, 2)
    reports = witness_all(kr_spec)
    assert len(reports) == 1
    report = reports[0]
    assert report.shape == "()"
    assert report.strings == (1, 1)
    assert report.pairing == 0
    assert report.ok


def test_witness_for_sigma_route():
    reports = witness_all(spec("A2o:2", 2, 1))
    assert [r.strings for r in reports] == [(1, 1)]
    assert all(r.ok for r in reports)


def test_witness_rejects_rectangular_weight():
    kr_spec = spec("C1:2", 1, 2)
    graph = build_kr(kr_spec).graph
    top = [b for b in graph.highest(graph.classical_index_set)
           if tuple(graph.weight(b)) == (2, 0)][0]
    with pytest.raises(KRSpecError):
        witness_nonextremal(kr_spec, top)


@pytest.mark.parametrize("type_string, r, s", [
    ("C1:2", 1, 2),
    ("C1:3", 2, 2),
    ("B1:3", 2, 2),
    ("D1:4", 2, 2),
    ("A2o:3", 2, 2),
])
def test_check_witness(type_string, r, s):
    verdict = check_witness(spec(type_string, r, s))
    assert verdict.passed, verdict.counterexample
    assert verdict.detail["witnesses"]


def test_witness_needs_a_supported_family():
    with pytest.raises(KRSpecError):
        check_witness(spec("A2e:2", 1, 1))


def test_partitions_up_to():
    shapes = partitions_up_to(3, 2)
    assert len(shapes) == 5
    assert Partition((2, 1)) in shapes
    assert Partition((1, 1, 1)) not in shapes


def test_summarize():
    verdicts = [Verdict("simple", {}, True), Verdict("simple", {}, False)]
    assert summarize(verdicts) == {"total": 2, "passed": 1, "failed": 1}


@pytest.mark.slow
@pytest.mark.parametrize("type_string", ["B1:3", "C1:3", "D1:4", "A2o:3"])
def test_witness_sweep(type_string):
    n = KRSpec.parse(type_string, 1, 1).n
    for r in range(1, n - 1):
        for s in (1, 2, 3):
            assert check_witness(spec(type_string, r, s)).passed, (r, s)
