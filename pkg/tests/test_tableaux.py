import itertools
from fractions import Fraction

import pytest

from cartan import ClassicalType, Partition, weyl_dimension
from errors import KRSpecError
from tableaux import (KNTableau, alphabet, build_classical, crystal_op, highest_tableau,
                      is_valid, jdt_promotion, jdt_promotion_inverse, parse_tableau, signature,
                      split_column, vector_f)

A2 = ClassicalType("A", 3)
A3 = ClassicalType("A", 4)
B2 = ClassicalType("B", 2)
B3 = ClassicalType("B", 3)
C2 = ClassicalType("C", 2)
C3 = ClassicalType("C", 3)
D4 = ClassicalType("D", 4)


def test_alphabets():
    assert alphabet(A2) == (1, 2, 3)
    assert alphabet(B2) == (1, 2, 0, -2, -1)
    assert alphabet(C2) == (1, 2, -2, -1)


def test_vector_operators_at_node_n():
    assert vector_f(C2, 2, 2) == -2
    assert vector_f(B2, 2, 2) == 0
    assert vector_f(B2, 2, 0) == -2
    assert vector_f(D4, 4, 3) == -4
    assert vector_f(D4, 4, 4) == -3
    assert vector_f(D4, 3, 3) == 4
    assert vector_f(C2, 1, -2) == -1


def test_signature_cancels_brackets():
    assert signature([(0, 1), (1, 0)]) == ([], [])
    assert signature([(1, 0), (0, 1)]) == ([0], [1])


def test_highest_tableau():
    t = highest_tableau(C2, Partition((2, 1)))
    assert t.columns == ((1, 2), (1,))
    assert t.spin is None
    spin = highest_tableau(B2, Partition((1,), True))
    assert spin.spin == (1, 1)
    assert spin.weight() == (Fraction(3, 2), Fraction(1, 2))


def test_serialize_round_trip():
    t = KNTableau(C3, ((1, -3), (2,)))
    assert parse_tableau(t.serialize()) == t
    s = KNTableau(B3, ((1,),), (1, -1, 1))
    assert parse_tableau(s.serialize()) == s


def test_reading_word_goes_right_to_left_and_down_each_column():
    assert KNTableau(A2, ((1, 2), (3,))).reading_word() == [3, 1, 2]
    assert KNTableau(C2, ((1, -1), (2, -2))).reading_word() == [2, -2, 1, -1]
    assert KNTableau(B3, ((1,),), (1, -1, 1)).reading_word() == [1]


def test_is_valid():
    assert is_valid(KNTableau(C2, ((1, -2), (2,))))
    assert not is_valid(KNTableau(C2, ((2, 1),)))
    assert not is_valid(KNTableau(C2, ((-1,), (1,))))


@pytest.mark.parametrize("ct, column, ok", [
    (C2, (1, -1), False),
    (C2, (2, -2), True),
    (C3, (1, 2, -2), False),
    (C3, (2, 3, -2), True),
    (B3, (1, -1), False),
    (B3, (2, 0, -2), True),
    (D4, (1, -1), False),
    (D4, (3, -3), True),
    (D4, (4, -4), True),
])
def test_column_pair_condition(ct, column, ok):
    assert is_valid(KNTableau(ct, (column,))) is ok


def test_row_conditions_for_zero_and_spin_letters():
    assert not is_valid(KNTableau(B2, ((0,), (0,))))
    assert is_valid(KNTableau(B2, ((0,), (-2,))))
    assert not is_valid(KNTableau(D4, ((4,), (-4,))))
    assert not is_valid(KNTableau(D4, ((-4,), (4,))))
    assert is_valid(KNTableau(D4, ((4,), (4,))))


def test_split_column():
    assert split_column(C2, (2, -2)) == ((1, -2), (2, -1))
    assert split_column(C2, (1, 2)) == ((1, 2), (1, 2))
    assert split_column(C3, (1, -1)) is None


def test_split_rows_between_adjacent_columns():
    assert not is_valid(KNTableau(C2, ((2, -2), (2, -2))))
    assert is_valid(KNTableau(C2, ((1, 2), (-2, -1))))
    assert is_valid(KNTableau(C2, ((1, -2), (2, -1))))


@pytest.mark.parametrize("ct, parts", [
    (C2, (1, 1)),
    (C2, (2, 1)),
    (C2, (2, 2)),
    (C3, (1, 1, 1)),
])
def test_valid_tableaux_count_the_module(ct, parts):
    shape = Partition(parts)
    columns = [list(itertools.combinations(alphabet(ct), h)) for h in shape.conjugate()]
    count = sum(1 for cols in itertools.product(*columns) if is_valid(KNTableau(ct, cols)))
    assert count == weyl_dimension(ct, shape.to_weight(ct))


def test_crystal_op_rejects_foreign_color():
    with pytest.raises(KRSpecError):
        crystal_op(highest_tableau(C2, Partition((1,))), 3, "f")


@pytest.mark.parametrize("ct, parts, half", [
    (A2, (2, 1), False),
    (A3, (2, 2), False),
    (B2, (1,), False),
    (B2, (), True),
    (B2, (1,), True),
    (B3, (1, 1), False),
    (C2, (2,), False),
    (C2, (2, 1), False),
    (C3, (1, 1), False),
    (D4, (1,), False),
    (D4, (1, 1), False),
    (D4, (), True),
])
def test_sizes_match_weyl_dimension(ct, parts, half):
    shape = Partition(parts, half)
    graph = build_classical(ct, shape)
    assert len(graph) == weyl_dimension(ct, shape.to_weight(ct))
    assert len(graph.highest()) == 1


@pytest.mark.parametrize("ct, parts", [
    (A2, (1,)),
    (A2, (2,)),
    (A2, (1, 1)),
    (A2, (2, 2)),
    (A3, (1, 1)),
    (A3, (2, 2)),
])
def test_promotion_order_on_rectangles(ct, parts):
    graph = build_classical(ct, Partition(parts))
    for b in range(len(graph)):
        t = graph.payload(b)
        u = t
        for _ in range(ct.n):
            u = jdt_promotion(u)
        assert u == t
        assert jdt_promotion_inverse(jdt_promotion(t)) == t
        assert is_valid(jdt_promotion(t))


def test_promotion_shifts_single_letters():
    assert jdt_promotion(KNTableau(A2, ((1,),))).columns == ((2,),)
    assert jdt_promotion(KNTableau(A2, ((3,),))).columns == ((1,),)


def test_promotion_needs_rectangle():
    with pytest.raises(KRSpecError):
        jdt_promotion(highest_tableau(A2, Partition((2, 1))))
    with pytest.raises(KRSpecError):
        jdt_promotion(highest_tableau(C2, Partition((1,))))


def test_highest_tableau_rows():
    t = highest_tableau(A2, Partition((2, 1)))
    assert t.english_rows() == [[1, 1], [2]]
