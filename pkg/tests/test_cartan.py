from fractions import Fraction

import pytest

from cartan import (AffineType, ClassicalType, Partition, affine_pairing, classical_pairing,
                    decomposition_shapes, dominant_representative, exceptional_nodes,
                    fundamental_weight, highest_weight, normalize_weight, parse_type,
                    weight_from_pairings, weyl_dimension)
from errors import KRSpecError

HALF = Fraction(1, 2)


def test_parse_type():
    at = parse_type("C1:3")
    assert at == AffineType("C1", 3)
    assert at.classical == ClassicalType("C", 3)
    assert at.index_set == (0, 1, 2, 3)
    assert at.tag == "C1:3"


def test_type_a_index_set_has_n_minus_one_nodes():
    at = parse_type("A1:3")
    assert at.classical.index_set == (1, 2)
    assert str(at.classical) == "A2"


@pytest.mark.parametrize("text", ["C1-3", "C1:", "X1:3", "D1:3", "A2e:0"])
def test_parse_type_rejects(text):
    with pytest.raises(KRSpecError):
        parse_type(text)


def test_normalize_weight_type_a():
    ct = ClassicalType("A", 3)
    assert normalize_weight(ct, (2, 1, 1)) == (1, 0, 0)


def test_pairings():
    b2 = ClassicalType("B", 2)
    assert classical_pairing(b2, 2, (0, HALF)) == 1
    assert classical_pairing(ClassicalType("C", 2), 2, (0, 1)) == 1
    assert classical_pairing(ClassicalType("D", 4), 4, (0, 0, 1, 1)) == 2
    assert affine_pairing(parse_type("C1:2"), 0, (1, 0)) == -1
    assert affine_pairing(parse_type("A2o:2"), 0, (1, 1)) == -2
    assert affine_pairing(parse_type("D2:2"), 0, (1, 0)) == -2
    assert affine_pairing(parse_type("A1:3"), 0, (1, 0, 0)) == -1


def test_fundamental_weights_of_spin_nodes():
    d4 = ClassicalType("D", 4)
    assert fundamental_weight(d4, 3) == (HALF, HALF, HALF, -HALF)
    assert fundamental_weight(d4, 4) == (HALF,) * 4
    assert fundamental_weight(ClassicalType("B", 3), 3) == (HALF,) * 3


def test_weight_from_pairings_inverts_pairing():
    ct = ClassicalType("B", 3)
    wt = (Fraction(3, 2), HALF, HALF)
    pairings = {i: classical_pairing(ct, i, wt) for i in ct.index_set}
    assert weight_from_pairings(ct, pairings) == wt


def test_dominant_representative():
    assert dominant_representative(ClassicalType("C", 2), (0, -2)) == (2, 0)
    assert dominant_representative(ClassicalType("D", 4), (1, 0, 0, -1)) == (1, 1, 0, 0)
    assert dominant_representative(ClassicalType("D", 4), (-1, 1, 1, 1)) == (1, 1, 1, -1)


def test_partition_basics():
    assert Partition((3, 1)).conjugate() == (2, 1, 1)
    assert Partition((2, 0, 0)).parts == (2,)
    with pytest.raises(KRSpecError):
        Partition((1, 2))
    b3 = ClassicalType("B", 3)
    spin = Partition.from_weight(b3, (HALF, HALF, HALF))
    assert spin == Partition((), True)
    assert str(spin) == "()+spin"
    d4 = ClassicalType("D", 4)
    assert Partition.from_weight(d4, (1, 1, 1, -1)) == Partition((1, 1, 1, 1), False, -1)


def test_exceptional_nodes():
    assert exceptional_nodes(parse_type("C1:3")) == {3}
    assert exceptional_nodes(parse_type("D1:5")) == {4, 5}
    assert exceptional_nodes(parse_type("D2:2")) == {2}
    assert exceptional_nodes(parse_type("B1:3")) == set()


@pytest.mark.parametrize("type_string, r, s, expected", [
    ("A1:3", 2, 2, [Partition((2, 2))]),
    ("C1:2", 1, 2, [Partition(()), Partition((2,))]),
    ("C1:2", 1, 1, [Partition((1,))]),
    ("D1:4", 2, 1, [Partition(()), Partition((1, 1))]),
    ("B1:3", 1, 2, [Partition((2,))]),
    ("A2o:2", 2, 1, [Partition(()), Partition((1, 1))]),
    ("A2e:2", 1, 1, [Partition(()), Partition((1,))]),
    ("D2:3", 2, 1, [Partition(()), Partition((1,)), Partition((1, 1))]),
    ("B1:2", 2, 1, [Partition((), True)]),
    ("B1:2", 2, 2, [Partition(()), Partition((1, 1))]),
])
def test_decomposition_shapes(type_string, r, s, expected):
    assert decomposition_shapes(parse_type(type_string), r, s) == expected


def test_decomposition_rejects_exceptional_node():
    with pytest.raises(KRSpecError):
        decomposition_shapes(parse_type("C1:2"), 2, 1)


def test_highest_weight():
    assert highest_weight(parse_type("C1:3"), 2, 3) == (3, 3, 0)


@pytest.mark.parametrize("ct, wt, dim", [
    (ClassicalType("A", 3), (1, 0, 0), 3),
    (ClassicalType("A", 3), (2, 0, 0), 6),
    (ClassicalType("C", 2), (1, 0), 4),
    (ClassicalType("C", 2), (1, 1), 5),
    (ClassicalType("C", 2), (2, 0), 10),
    (ClassicalType("B", 2), (1, 0), 5),
    (ClassicalType("B", 3), (HALF, HALF, HALF), 8),
    (ClassicalType("D", 4), (1, 0, 0, 0), 8),
    (ClassicalType("D", 4), (1, 1, 0, 0), 28),
])
def test_weyl_dimension(ct, wt, dim):
    assert weyl_dimension(ct, wt) == dim


def test_weyl_dimension_needs_dominant_weight():
    with pytest.raises(KRSpecError):
        weyl_dimension(ClassicalType("C", 2), (0, 1))
