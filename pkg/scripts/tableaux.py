#!/usr/bin/env python3
"""
Classical crystals B(lambda) on Kashiwara-Nakashima tableaux.

Letters are integers: k for k, -k for k-bar and 0 for the type-B letter 0.
Tableaux are stored in the French convention as a tuple of columns, left to
right, each column listed bottom to top (increasing). Crystal operators act
on the reading word (columns right to left, each column bottom to top, the
spin column last) through the signature rule.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, List, Optional, Sequence, Tuple

from cartan import HALF, ClassicalType, Partition, Weight, normalize_weight
from crystal_core import CrystalGraph, generate
from errors import CrystalStructureError, KRSpecError

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)

Column = Tuple[int, ...]
Spin = Tuple[int, ...]


# ---------------------------------------------------------------------------
# Letters and the vector crystal
# ---------------------------------------------------------------------------

def alphabet(ct: ClassicalType) -> Tuple[int, ...]:
    """Letters of the vector crystal in crystal order."""
    n = ct.n
    up = tuple(range(1, n + 1))
    if ct.letter == "A":
        return up
    down = tuple(-k for k in range(n, 0, -1))
    if ct.letter == "B":
        return up + (0,) + down
    return up + down


def letter_rank(ct: ClassicalType, letter: int) -> int:
    """Position in the type order; in type D, n and n-bar share a rank."""
    n = ct.n
    if letter > 0:
        return letter
    if letter == 0:
        return n + 1
    k = -letter
    if ct.letter == "B":
        return 2 * n + 2 - k
    if ct.letter == "C":
        return 2 * n + 1 - k
    return n if k == n else 2 * n - k


def letter_str(letter: int) -> str:
    return f"{-letter}b" if letter < 0 else str(letter)


def vector_f(ct: ClassicalType, i: int, letter: int) -> Optional[int]:
    n = ct.n
    if ct.letter == "A" or i < n:
        if letter == i:
            return i + 1
        if ct.letter != "A" and letter == -(i + 1):
            return -i
        return None
    if ct.letter == "B":
        return {n: 0, 0: -n}.get(letter)
    if ct.letter == "C":
        return -n if letter == n else None
    return {n - 1: -n, n: -(n - 1)}.get(letter)


@lru_cache(maxsize=None)
def _vector_e_table(ct: ClassicalType, i: int) -> Dict[int, int]:
    table = {}
    for letter in alphabet(ct):
        target = vector_f(ct, i, letter)
        if target is not None:
            table[target] = letter
    return table


def vector_e(ct: ClassicalType, i: int, letter: int) -> Optional[int]:
    return _vector_e_table(ct, i).get(letter)


@lru_cache(maxsize=None)
def letter_string(ct: ClassicalType, i: int, letter: int) -> Tuple[int, int]:
    """(eps_i, phi_i) of a letter."""
    eps, x = 0, vector_e(ct, i, letter)
    while x is not None:
        eps, x = eps + 1, vector_e(ct, i, x)
    phi, x = 0, vector_f(ct, i, letter)
    while x is not None:
        phi, x = phi + 1, vector_f(ct, i, x)
    return eps, phi


def letter_weight(ct: ClassicalType, letter: int) -> List[Fraction]:
    w = [Fraction(0)] * ct.n
    if letter > 0:
        w[letter - 1] += 1
    elif letter < 0:
        w[-letter - 1] -= 1
    return w


# spin representation: a +-1 vector of length n with weight v/2

def spin_f(ct: ClassicalType, i: int, spin: Spin) -> Optional[Spin]:
    n = ct.n
    v = list(spin)
    if i < n:
        if v[i - 1] == 1 and v[i] == -1:
            v[i - 1], v[i] = -1, 1
            return tuple(v)
        return None
    if ct.letter == "B":
        if v[n - 1] == 1:
            v[n - 1] = -1
            return tuple(v)
        return None
    if v[n - 2] == 1 and v[n - 1] == 1:
        v[n - 2], v[n - 1] = -1, -1
        return tuple(v)
    return None


def spin_e(ct: ClassicalType, i: int, spin: Spin) -> Optional[Spin]:
    n = ct.n
    v = list(spin)
    if i < n:
        if v[i - 1] == -1 and v[i] == 1:
            v[i - 1], v[i] = 1, -1
            return tuple(v)
        return None
    if ct.letter == "B":
        if v[n - 1] == -1:
            v[n - 1] = 1
            return tuple(v)
        return None
    if v[n - 2] == -1 and v[n - 1] == -1:
        v[n - 2], v[n - 1] = 1, 1
        return tuple(v)
    return None


def spin_string(ct: ClassicalType, i: int, spin: Spin) -> Tuple[int, int]:
    return (1 if spin_e(ct, i, spin) else 0), (1 if spin_f(ct, i, spin) else 0)


def vector_crystal(ct: ClassicalType) -> CrystalGraph:
    """The crystal of the vector representation."""
    return build_classical(ct, Partition((1,)))


# ---------------------------------------------------------------------------
# Tableaux
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class KNTableau:
    """A KN tableau: columns left to right, each smallest letter first; optional spin column."""

    ct: ClassicalType
    columns: Tuple[Column, ...]
    spin: Optional[Spin] = None

    @property
    def heights(self) -> Tuple[int, ...]:
        return tuple(len(c) for c in self.columns)

    @property
    def shape(self) -> Partition:
        heights = self.heights
        if not heights:
            return Partition((), self.spin is not None)
        parts = tuple(sum(1 for h in heights if h > k) for k in range(max(heights)))
        return Partition(parts, self.spin is not None)

    def reading_word(self) -> List[int]:
        """Letters in tensor order (the spin factor is reported separately).

        Columns go right to left and each column is read from its smallest
        letter up; in English notation that is top to bottom.
        """
        word = []
        for column in reversed(self.columns):
            word.extend(column)
        return word

    def weight(self) -> Weight:
        w = [Fraction(0)] * self.ct.n
        for column in self.columns:
            for letter in column:
                if letter > 0:
                    w[letter - 1] += 1
                elif letter < 0:
                    w[-letter - 1] -= 1
        if self.spin is not None:
            w = [c + HALF * s for c, s in zip(w, self.spin)]
        return normalize_weight(self.ct, w)

    def serialize(self) -> str:
        body = "/".join(",".join(str(x) for x in col) for col in self.columns)
        if self.spin is not None:
            body += "|" + "".join("+" if s > 0 else "-" for s in self.spin)
        return f"{self.ct}:{body}"

    def english_rows(self) -> List[List[int]]:
        """Rows top-aligned (row 0 holds the bottom French row)."""
        depth = max(self.heights, default=0)
        return [[col[k] for col in self.columns if len(col) > k] for k in range(depth)]

    def __str__(self) -> str:
        cols = " ".join("[" + " ".join(letter_str(x) for x in col) + "]" for col in self.columns)
        if self.spin is not None:
            cols = "<" + "".join("+" if s > 0 else "-" for s in self.spin) + "> " + cols
        return cols.strip()


def parse_tableau(text: str) -> KNTableau:
    """Inverse of KNTableau.serialize."""
    tag, _, body = text.partition(":")
    ct = ClassicalType(tag[0], int(tag[1:]) + (1 if tag[0] == "A" else 0))
    spin = None
    if "|" in body:
        body, _, signs = body.partition("|")
        spin = tuple(1 if c == "+" else -1 for c in signs)
    columns = tuple(tuple(int(x) for x in col.split(",")) for col in body.split("/") if col)
    return KNTableau(ct, columns, spin)


def _column_admissible(ct: ClassicalType, column: Column) -> bool:
    """N(z) <= z for every z, N(z) counting the letters x with x <= z or x >= z-bar."""
    top = ct.n - 1 if ct.letter == "D" else ct.n
    for z in range(1, top + 1):
        if sum(1 for x in column if x != 0 and abs(x) <= z) > z:
            return False
    return True


def split_column(ct: ClassicalType, column: Column) -> Optional[Tuple[Column, Column]]:
    """(lC, rC) of a type C column, or None if the column cannot be split.

    Each pair z, z-bar in the column is matched, largest z first, with the
    greatest t below z (and below the previous t) such that neither t nor
    t-bar occurs. lC replaces z by t, rC replaces z-bar by t-bar.
    """
    present = set(column)
    left, right = list(column), list(column)
    bound = ct.n + 1
    for z in sorted((x for x in present if x > 0 and -x in present), reverse=True):
        t = next((t for t in range(min(bound, z) - 1, 0, -1)
                  if t not in present and -t not in present), None)
        if t is None:
            return None
        left[left.index(z)] = t
        right[right.index(-z)] = -t
        bound = t

    def order(letters):
        return tuple(sorted(letters, key=lambda x: letter_rank(ct, x)))

    return order(left), order(right)


def _rows_admissible(ct: ClassicalType, left: Column, right: Column) -> bool:
    n = ct.n
    for a, b in zip(left, right):
        if letter_rank(ct, a) > letter_rank(ct, b):
            return False
        if ct.letter == "B" and a == 0 and b == 0:
            return False
        if ct.letter == "D" and abs(a) == n and a == -b:
            return False
    if ct.letter != "C":
        return True
    left_split, right_split = split_column(ct, left), split_column(ct, right)
    if left_split is None or right_split is None:
        return False
    return all(letter_rank(ct, a) <= letter_rank(ct, b)
               for a, b in zip(left_split[1], right_split[0]))


def is_valid(t: KNTableau) -> bool:
    """Whether t is a KN tableau of its type.

    Checks column strictness in the type order, the column condition on
    pairs z, z-bar, and the row conditions between adjacent columns: weak
    rows, no 0 0 (type B), no n next to n-bar (type D) and, in type C, weak
    rows of the split tableau lC1 rC1 lC2 rC2 ...
    """
    ct = t.ct
    for column in t.columns:
        if len(column) > ct.n:
            return False
        for a, b in zip(column, column[1:]):
            ra, rb = letter_rank(ct, a), letter_rank(ct, b)
            if ra < rb:
                continue
            if ct.letter == "B" and a == 0 and b == 0:
                continue
            if ct.letter == "D" and ra == rb and a == -b:
                continue
            return False
        if ct.letter != "A" and not _column_admissible(ct, column):
            return False
    for left, right in zip(t.columns, t.columns[1:]):
        if len(right) > len(left) or not _rows_admissible(ct, left, right):
            return False
    return True


def highest_tableau(ct: ClassicalType, shape: Partition) -> KNTableau:
    """The I_0-highest tableau of B(shape)."""
    n = ct.n
    if shape.length > n:
        raise KRSpecError(f"{shape} has more than {n} rows for {ct}")
    if (shape.half or shape.sign == -1) and ct.letter not in ("B", "D"):
        raise KRSpecError(f"{shape} needs type B or D")
    if ct.letter == "B" and shape.sign == -1:
        raise KRSpecError(f"{shape}: negated shapes only exist in type D")
    columns = []
    for height in shape.conjugate():
        column = tuple(range(1, height + 1))
        if ct.letter == "D" and shape.sign == -1 and height == n:
            column = tuple(range(1, n)) + (-n,)
        columns.append(column)
    if shape.sign == -1 and not shape.half and shape.length < n:
        raise KRSpecError(f"{shape}: a negated shape needs n rows or a spin column")
    spin = None
    if shape.half:
        spin = (1,) * n
        if shape.sign == -1:
            spin = (1,) * (n - 1) + (-1,)
    return KNTableau(ct, tuple(columns), spin)


def _factor_strings(t: KNTableau, i: int) -> List[Tuple[int, int]]:
    ct = t.ct
    strings = [letter_string(ct, i, x) for x in t.reading_word()]
    if t.spin is not None:
        strings.append(spin_string(ct, i, t.spin))
    return strings


def signature(strings: Sequence[Tuple[int, int]]) -> Tuple[List[int], List[int]]:
    """Unmatched (minus, plus) factor positions under the tensor rule."""
    minus: List[int] = []
    plus: List[int] = []
    for pos, (eps, phi) in enumerate(strings):
        for _ in range(eps):
            if plus:
                plus.pop()
            else:
                minus.append(pos)
        plus.extend([pos] * phi)
    return minus, plus


def crystal_op(t: KNTableau, i: int, direction: str) -> Optional[KNTableau]:
    """Apply e_i or f_i to a tableau; None when the result is zero."""
    ct = t.ct
    if i not in ct.index_set:
        raise KRSpecError(f"color {i} not in I_0 of {ct}")
    minus, plus = signature(_factor_strings(t, i))
    if direction == "f":
        if not plus:
            return None
        pos = plus[0]
    else:
        if not minus:
            return None
        pos = minus[-1]
    word_len = sum(t.heights)
    if pos == word_len:
        spin = spin_f(ct, i, t.spin) if direction == "f" else spin_e(ct, i, t.spin)
        result = KNTableau(ct, t.columns, spin)
    else:
        columns = [list(c) for c in t.columns]
        offset = 0
        for cidx in range(len(columns) - 1, -1, -1):
            if pos < offset + len(columns[cidx]):
                row = pos - offset
                letter = columns[cidx][row]
                new = vector_f(ct, i, letter) if direction == "f" else vector_e(ct, i, letter)
                columns[cidx][row] = new
                break
            offset += len(columns[cidx])
        result = KNTableau(ct, tuple(tuple(c) for c in columns), t.spin)
    if not is_valid(result):
        raise CrystalStructureError(f"{direction}_{i} on {t} produced invalid tableau {result}")
    return result


def tableau_oracle(t: KNTableau, i: int, direction: str) -> Optional[KNTableau]:
    return crystal_op(t, i, direction)


def build_classical(ct: ClassicalType, shape: Partition, budget: Optional[int] = None) -> CrystalGraph:
    """B(shape) generated from its highest tableau."""
    top = highest_tableau(ct, shape)
    return generate([top], tableau_oracle, ct.index_set, key=KNTableau.serialize,
                    weight=KNTableau.weight, ctype=ct, budget=budget, name=f"B{shape}[{ct}]")


# ---------------------------------------------------------------------------
# Promotion on rectangular type-A tableaux
# ---------------------------------------------------------------------------

def _grid(t: KNTableau) -> List[List[Optional[int]]]:
    heights = set(t.heights)
    if len(heights) != 1:
        raise KRSpecError(f"promotion needs a rectangular tableau, got heights {t.heights}")
    depth = heights.pop()
    return [[col[k] for col in t.columns] for k in range(depth)]


def _from_grid(ct: ClassicalType, grid: List[List[int]]) -> KNTableau:
    width = len(grid[0]) if grid else 0
    return KNTableau(ct, tuple(tuple(grid[k][j] for k in range(len(grid))) for j in range(width)))


def jdt_promotion(t: KNTableau) -> KNTableau:
    """Promotion pr: remove the letters n, add one to the rest, slide, fill with 1s."""
    ct = t.ct
    if ct.letter != "A":
        raise KRSpecError("promotion is defined for type A only")
    n = ct.n
    grid = _grid(t)
    rows, width = len(grid), len(grid[0]) if grid else 0
    grid = [[None if x == n else x + 1 for x in row] for row in grid]
    filled = [sum(1 for x in row if x is not None) for row in grid]
    while True:
        corner = next((k for k in range(rows)
                       if filled[k] < width and (k == 0 or filled[k - 1] > filled[k])), None)
        if corner is None:
            break
        hi, hj = corner, filled[corner]
        filled[corner] += 1
        while True:
            up = grid[hi - 1][hj] if hi > 0 else None
            left = grid[hi][hj - 1] if hj > 0 else None
            if up is None and left is None:
                break
            if left is None or (up is not None and up >= left):
                grid[hi][hj], hi = up, hi - 1
            else:
                grid[hi][hj], hj = left, hj - 1
            grid[hi][hj] = None
    return _from_grid(ct, [[1 if x is None else x for x in row] for row in grid])


def jdt_promotion_inverse(t: KNTableau) -> KNTableau:
    """Inverse promotion: remove the 1s, subtract one, slide outward, fill with n."""
    ct = t.ct
    if ct.letter != "A":
        raise KRSpecError("promotion is defined for type A only")
    n = ct.n
    grid = _grid(t)
    rows, width = len(grid), len(grid[0]) if grid else 0
    grid = [[None if x == 1 else x - 1 for x in row] for row in grid]
    holes = [sum(1 for x in row if x is None) for row in grid]
    while True:
        corner = next((k for k in range(rows - 1, -1, -1)
                       if holes[k] > 0 and (k == rows - 1 or holes[k + 1] < holes[k])), None)
        if corner is None:
            break
        holes[corner] -= 1
        hi, hj = corner, holes[corner]
        while True:
            down = grid[hi + 1][hj] if hi + 1 < rows else None
            right = grid[hi][hj + 1] if hj + 1 < width else None
            if down is None and right is None:
                break
            if right is None or (down is not None and down <= right):
                grid[hi][hj], hi = down, hi + 1
            else:
                grid[hi][hj], hj = right, hj + 1
            grid[hi][hj] = None
    return _from_grid(ct, [[n if x is None else x for x in row] for row in grid])
