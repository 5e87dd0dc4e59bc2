import pytest

import config
from cartan import AffineType, Partition, parse_type
from crystal_core import structure_violations
from errors import BudgetExceeded, CrystalStructureError, KRSpecError
from kr import (VARIATIONS, KRSpec, build_kr, column_counts, diagram_of_triple,
                exceptional_shape, iota_columns, plan_route, promotion_kr, promotion_kr_inverse,
                sigma_invariance, sigma_spin, similarity_map, triple_of, triple_op,
                variation_map, variation_target)
from pm_diagrams import MINUS, NONE, PAIR, PLUS


def spec(type_string, r, s):
    return KRSpec.parse(type_string, r, s)


def test_spec_validation():
    assert str(spec("C1:2", 1, 2)) == "B^{1,2}[C1:2]"
    assert spec("D1:4", 2, 1).to_dict() == {"family": "D1", "n": 4, "r": 2, "s": 1}
    with pytest.raises(KRSpecError):
        spec("C1:2", 3, 1)
    with pytest.raises(KRSpecError):
        spec("C1:2", 1, 0)
    with pytest.raises(KRSpecError):
        spec("A1:3", 3, 1)


@pytest.mark.parametrize("type_string, r, route", [
    ("A1:3", 1, "a"),
    ("B1:3", 1, "b"),
    ("B1:3", 3, "e"),
    ("C1:3", 2, "c"),
    ("C1:3", 3, "f"),
    ("D1:4", 2, "b"),
    ("D1:4", 3, "f"),
    ("A2e:2", 1, "d"),
    ("A2e:2", 2, "d"),
    ("A2o:2", 2, "b"),
    ("D2:3", 1, "d"),
    ("D2:3", 3, "f"),
])
def test_plan_route(type_string, r, route):
    assert plan_route(spec(type_string, r, 1)) == route


@pytest.mark.parametrize("type_string, r, s, size", [
    ("A1:3", 1, 1, 3),
    ("A1:3", 2, 1, 3),
    ("A1:3", 1, 2, 6),
    ("B1:2", 1, 1, 5),
    ("B1:2", 2, 1, 4),
    ("B1:2", 2, 2, 11),
    ("C1:2", 1, 1, 4),
    ("C1:2", 1, 2, 11),
    ("C1:2", 2, 1, 5),
    ("D1:4", 1, 1, 8),
    ("D1:4", 4, 1, 8),
    ("D1:4", 3, 1, 8),
    ("A2e:2", 1, 1, 5),
    ("A2o:2", 1, 1, 4),
    ("A2o:2", 2, 1, 6),
    ("D2:2", 1, 1, 6),
    ("D2:2", 2, 1, 4),
])
def test_sizes(type_string, r, s, size):
    kr = build_kr(spec(type_string, r, s))
    assert len(kr.graph) == size
    assert kr.graph.index_set == kr.spec.affine.index_set


@pytest.mark.parametrize("type_string, r, s", [
    ("A1:3", 2, 2),
    ("B1:2", 1, 2),
    ("B1:2", 2, 2),
    ("C1:2", 1, 2),
    ("C1:2", 2, 2),
    ("D1:4", 2, 1),
    ("D1:4", 3, 2),
    ("A2e:2", 1, 2),
    ("A2e:2", 2, 1),
    ("A2o:2", 2, 2),
    ("D2:2", 1, 2),
    ("D2:2", 2, 2),
])
def test_kr_crystals_are_consistent_and_connected(type_string, r, s):
    graph = build_kr(spec(type_string, r, s)).graph
    assert structure_violations(graph) == []
    assert graph.is_connected()


def test_build_is_memoized_and_budgeted():
    first = build_kr(spec("C1:2", 1, 1))
    assert build_kr(spec("C1:2", 1, 1)) is first
    with pytest.raises(BudgetExceeded):
        build_kr(spec("C1:2", 1, 1), budget=2)


def test_promotion_has_order_n():
    kr = build_kr(spec("A1:3", 1, 2))
    for b in range(len(kr.graph)):
        c = b
        for _ in range(3):
            c = promotion_kr(kr, c)
        assert c == b
        assert promotion_kr_inverse(kr, promotion_kr(kr, b)) == b
        f0 = kr.graph.f(0, b)
        lifted = kr.graph.f(1, promotion_kr(kr, b))
        assert f0 == (None if lifted is None else promotion_kr_inverse(kr, lifted))


def test_promotion_only_in_type_a():
    with pytest.raises(KRSpecError):
        promotion_kr(build_kr(spec("C1:2", 1, 1)), 0)


def test_sigma_exchanges_zero_and_one_strings():
    kr = build_kr(spec("B1:3", 2, 1))
    graph = kr.graph
    for b in range(len(graph)):
        image = kr.sigma[b]
        assert kr.sigma[image] == b
        assert graph.epsilon(0, b) == graph.epsilon(1, image)
        assert graph.phi(0, b) == graph.phi(1, image)


def test_spin_sigma_pairs_the_spin_nodes():
    kr = build_kr(spec("D1:4", 4, 1))
    other = build_kr(spec("D1:4", 3, 1))
    for b in range(len(kr.graph)):
        image = other.graph.id_of(kr.partner.key(sigma_spin(kr, b)))
        assert other.partner.key(sigma_spin(other, image)) == kr.graph.key(b)
        assert kr.graph.weight(b)[1:] == other.graph.weight(image)[1:]
    with pytest.raises(KRSpecError):
        sigma_spin(build_kr(spec("D1:4", 1, 1)), 0)


def test_column_counts_and_iota():
    assert column_counts(Partition((2, 1)), 3) == {2: 1, 1: 1, 0: 1}
    assert iota_columns(2, 2, Partition(())) == [(0, PAIR), (0, NONE)]
    assert iota_columns(1, 2, Partition(())) == [(0, PLUS), (0, MINUS)]
    with pytest.raises(KRSpecError):
        iota_columns(2, 1, Partition(()))
    with pytest.raises(KRSpecError):
        column_counts(Partition((3,)), 2)


def test_c_triples():
    assert triple_op("C1", (2, 1, 0), 3, "e") == (1, 2, 0)
    assert triple_op("C1", (1, 2, 0), 3, "f") == (2, 1, 0)
    assert triple_op("C1", (0, 1, 2), 3, "e") is None
    assert triple_op("C1", (1, 0, 2), 3, "f") is None


def test_d2_triples():
    assert triple_op("D2", (1, 0, 0), 3, "e") == (1, 2, 0)
    assert triple_op("D2", (1, 0, 0), 3, "f") == (3, 0, 0)
    assert triple_op("D2", (1, 0, 2), 3, "e") == (0, 1, 2)
    assert triple_op("D2", (1, 0, 2), 3, "f") is None
    assert triple_op("D2", (0, 0, 0), 2, "e") == (0, 2, 0)
    assert triple_op("D2", (2, 0, 0), 2, "e") == (0, 0, 0)


def test_d2_triples_follow_the_short_case_for_any_parity():
    assert triple_op("D2", (0, 0, 1), 3, "e") == (0, 2, 1)
    assert triple_op("D2", (0, 0, 1), 3, "f") == (2, 0, 1)
    assert triple_op("D2", (0, 1, 2), 3, "e") is None
    assert triple_op("D2", (0, 1, 2), 3, "f") == (1, 0, 2)


def test_triples_reject_inconsistent_input():
    with pytest.raises(CrystalStructureError):
        triple_op("C1", (1, 1, 0), 3, "e")
    with pytest.raises(CrystalStructureError):
        triple_op("D2", (0, 0, 0), 3, "e")
    with pytest.raises(CrystalStructureError):
        triple_op("D2", (0, -1, 2), 3, "f")
    with pytest.raises(KRSpecError):
        triple_op("B1", (0, 0, 0), 0, "e")


@pytest.mark.parametrize("triple", [(2, 0, 0), (1, 1, 0), (0, 2, 0), (1, 0, 1), (0, 1, 1), (0, 0, 2)])
def test_triple_diagram_round_trip(triple):
    ct = parse_type("C1:2").classical
    assert triple_of(diagram_of_triple(ct, triple, 2)) == triple


@pytest.mark.parametrize("triple", [(0, 0, 1), (1, 1, 1), (0, 1, 1)])
def test_odd_triples_encode_no_type_b_diagram(triple):
    with pytest.raises(CrystalStructureError):
        diagram_of_triple(parse_type("D2:2").classical, triple, 3)


def test_exceptional_shapes():
    assert exceptional_shape(spec("C1:2", 2, 3)) == Partition((3, 3))
    assert exceptional_shape(spec("D1:4", 3, 1)) == Partition((), True, -1)
    assert exceptional_shape(spec("D2:2", 2, 3)) == Partition((1, 1), True)


def test_sigma_invariance_report():
    report = sigma_invariance(build_kr(spec("C1:2", 1, 1)))
    assert report["size"] == 4
    assert set(report) == {"size", "fixed", "escaped", "invariant"}
    with pytest.raises(KRSpecError):
        sigma_invariance(build_kr(spec("B1:2", 1, 1)))


def test_virtual_routes_keep_their_ambient():
    kr = build_kr(spec("A2e:2", 1, 1))
    assert kr.route == "d"
    assert kr.ambient.spec == KRSpec(AffineType("A2o", 3), 1, 2)
    assert kr.color_map[0] == ((0, 1), (1, 1))
    assert kr.color_map[1] == ((2, 2),)


@pytest.mark.parametrize("type_string, r, s, m", [
    ("A1:3", 1, 1, 2),
    ("A1:3", 2, 1, 3),
    ("C1:2", 1, 1, 2),
    ("B1:2", 1, 1, 2),
    ("A2o:2", 1, 1, 2),
    ("D2:2", 2, 1, 2),
    ("C1:2", 1, 1, 3),
    ("C1:2", 2, 1, 3),
    ("B1:2", 1, 1, 3),
    ("B1:2", 2, 1, 3),
    ("D1:4", 4, 1, 3),
    ("A2e:2", 1, 1, 3),
    ("A2o:2", 1, 1, 3),
    ("D2:2", 2, 1, 3),
])
def test_similarity_scales_strings(type_string, r, s, m):
    cmap = similarity_map(spec(type_string, r, s), m)
    assert cmap.is_total()
    assert cmap.kind == f"similarity:{m}"
    assert cmap.multipliers == {i: m for i in cmap.source.index_set}
    assert len(set(cmap.assignment.values())) == len(cmap.source)
    for b, image in cmap.assignment.items():
        for i in cmap.source.index_set:
            assert cmap.target.phi(i, image) == m * cmap.source.phi(i, b)


def test_similarity_needs_positive_multiplier():
    with pytest.raises(KRSpecError):
        similarity_map(spec("A1:3", 1, 1), 0)


def test_variation_targets():
    assert variation_target("1-i", spec("B1:2", 1, 1)) == [KRSpec(AffineType("A2o", 2), 1, 2)]
    assert variation_target("1-i", spec("B1:2", 2, 2)) == [KRSpec(AffineType("A2o", 2), 2, 2)]
    assert variation_target("1-iii", spec("C1:2", 2, 1)) == [KRSpec(AffineType("D2", 2), 2, 2)]
    assert variation_target("2-ii", spec("A2o:3", 3, 1)) == [
        KRSpec(AffineType("D1", 4), 3, 1), KRSpec(AffineType("D1", 4), 4, 1)]
    assert variation_target("2-iii", spec("D2:2", 1, 1)) == [
        KRSpec(AffineType("A1", 4), 1, 1), KRSpec(AffineType("A1", 4), 3, 1)]


@pytest.mark.parametrize("kind, type_string", [
    ("1-iv", "A2e:2"),
    ("2-i", "C1:2"),
])
def test_variations_exclude_node_n(kind, type_string):
    with pytest.raises(KRSpecError):
        variation_target(kind, spec(type_string, 2, 1))


def test_variation_checks_source_family():
    with pytest.raises(KRSpecError):
        variation_target("1-ii", spec("B1:2", 1, 1))
    with pytest.raises(KRSpecError):
        variation_target("3-i", spec("B1:2", 1, 1))


@pytest.mark.parametrize("kind, type_string, r, s", [
    ("1-i", "B1:2", 1, 1),
    ("1-ii", "C1:2", 1, 1),
    ("1-iii", "C1:2", 1, 1),
    ("1-vi", "A2o:2", 1, 1),
    ("2-i", "C1:2", 1, 1),
    ("1-i", "B1:2", 1, 2),
    ("1-ii", "C1:2", 1, 2),
    ("1-iii", "C1:2", 1, 2),
    ("1-vi", "A2o:2", 1, 2),
    ("2-i", "C1:2", 1, 2),
    ("1-iv", "A2e:2", 1, 1),
    ("1-v", "A2e:2", 1, 1),
    ("1-vii", "D2:2", 1, 1),
    ("1-viii", "D2:2", 1, 1),
])
def test_variation_maps(kind, type_string, r, s):
    cmap = variation_map(kind, spec(type_string, r, s))
    assert cmap.is_total()
    assert cmap.kind == f"variation:{kind}"
    assert len(set(cmap.assignment.values())) == len(cmap.source)
    assert any(note.startswith("target ") for note in cmap.notes)


def test_every_configured_variation_is_built():
    assert tuple(VARIATIONS) == config.VARIATION_KINDS
