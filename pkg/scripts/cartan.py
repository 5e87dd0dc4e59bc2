#!/usr/bin/env python3
"""
Dynkin and Cartan data for the seven nonexceptional affine families.

Weights of the classical subalgebra live in the orthogonal epsilon basis:
a weight is a tuple of length n (Fractions, so that spin weights of types
B and D are exact). Type A weights are length-n compositions taken modulo
the all-ones vector and are normalized so that the last coordinate is 0.
"""

import itertools
import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import config
from errors import KRSpecError

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)

HALF = Fraction(1, 2)

# Affine family tag -> classical type letter of the subalgebra g_0
CLASSICAL_LETTER = {
    "A1": "A",
    "B1": "B",
    "C1": "C",
    "D1": "D",
    "A2e": "C",
    "A2o": "C",
    "D2": "B",
}

FAMILY_NAMES = {
    "A1": "A_{n-1}^{(1)}",
    "B1": "B_n^{(1)}",
    "C1": "C_n^{(1)}",
    "D1": "D_n^{(1)}",
    "A2e": "A_{2n}^{(2)}",
    "A2o": "A_{2n-1}^{(2)}",
    "D2": "D_{n+1}^{(2)}",
}

Weight = Tuple[Fraction, ...]


@dataclass(frozen=True)
class ClassicalType:
    """Classical type X_n; `n` is the number of epsilon coordinates.

    For letter A the Lie algebra is A_{n-1} (letters 1..n, I_0 = 1..n-1).
    """

    letter: str
    n: int

    @property
    def index_set(self) -> Tuple[int, ...]:
        top = self.n - 1 if self.letter == "A" else self.n
        return tuple(range(1, top + 1))

    @property
    def rank(self) -> int:
        return len(self.index_set)

    def __str__(self) -> str:
        return f"{self.letter}{self.rank}"


@dataclass(frozen=True)
class AffineType:
    """An affine family together with its classical rank n."""

    family: str
    n: int

    def __post_init__(self):
        if self.family not in config.FAMILY_TAGS:
            raise KRSpecError(f"unknown family {self.family!r}")
        if self.n < config.MIN_RANK[self.family]:
            raise KRSpecError(
                f"{self.family} needs n >= {config.MIN_RANK[self.family]}, got {self.n}")

    @property
    def classical(self) -> ClassicalType:
        return ClassicalType(CLASSICAL_LETTER[self.family], self.n)

    @property
    def index_set(self) -> Tuple[int, ...]:
        return (0,) + self.classical.index_set

    @property
    def tag(self) -> str:
        return f"{self.family}:{self.n}"

    def __str__(self) -> str:
        return self.tag


def parse_type(text: str) -> AffineType:
    """Parse a type string such as "C1:3" into an AffineType."""
    family, sep, rank = text.strip().partition(":")
    if not sep or not rank.strip().isdigit():
        raise KRSpecError(f"malformed type string {text!r} (expected e.g. 'C1:3')")
    return AffineType(family, int(rank))


def _frac_weight(wt: Iterable) -> Weight:
    return tuple(Fraction(c) for c in wt)


def _as_int(value: Fraction):
    return int(value) if value.denominator == 1 else value


def normalize_weight(ct: ClassicalType, wt: Iterable) -> Weight:
    """Bring a weight into canonical form (type A: last coordinate 0)."""
    w = _frac_weight(wt)
    if len(w) != ct.n:
        raise KRSpecError(f"weight {w} has wrong length for {ct}")
    if ct.letter == "A":
        shift = w[-1]
        w = tuple(c - shift for c in w)
    return w


def classical_pairing(ct: ClassicalType, i: int, wt: Sequence):
    """Return <h_i, wt> for i in I_0.

    Args:
        ct: classical type
        i: node in I_0
        wt: weight in epsilon coordinates

    Returns:
        int (or Fraction for non-integral input)
    """
    if i not in ct.index_set:
        raise KRSpecError(f"index {i} not in I_0 = {ct.index_set} of {ct}")
    w = _frac_weight(wt)
    n = ct.n
    if ct.letter == "A" or i < n:
        value = w[i - 1] - w[i]
    elif ct.letter == "B":
        value = 2 * w[n - 1]
    elif ct.letter == "C":
        value = w[n - 1]
    else:
        value = w[n - 2] + w[n - 1]
    return _as_int(value)


def affine_pairing(at: AffineType, i: int, wt: Sequence):
    """Level-zero pairing <h_i, wt> for every i in I, including 0."""
    if i != 0:
        return classical_pairing(at.classical, i, wt)
    w = _frac_weight(wt)
    if at.family == "A1":
        value = w[-1] - w[0]
    elif at.family in ("B1", "D1", "A2o"):
        value = -(w[0] + w[1])
    elif at.family == "C1":
        value = -w[0]
    else:  # A2e, D2
        value = -2 * w[0]
    return _as_int(value)


@lru_cache(maxsize=None)
def simple_root(ct: ClassicalType, i: int) -> Weight:
    if i not in ct.index_set:
        raise KRSpecError(f"index {i} not in I_0 of {ct}")
    n = ct.n
    v = [Fraction(0)] * n
    if ct.letter == "A" or i < n:
        v[i - 1], v[i] = Fraction(1), Fraction(-1)
    elif ct.letter == "B":
        v[n - 1] = Fraction(1)
    elif ct.letter == "C":
        v[n - 1] = Fraction(2)
    else:
        v[n - 2], v[n - 1] = Fraction(1), Fraction(1)
    return normalize_weight(ct, v)


@lru_cache(maxsize=None)
def fundamental_weight(ct: ClassicalType, i: int) -> Weight:
    if i not in ct.index_set:
        raise KRSpecError(f"index {i} not in I_0 of {ct}")
    n = ct.n
    v = [Fraction(1) if k < i else Fraction(0) for k in range(n)]
    if ct.letter == "B" and i == n:
        v = [HALF] * n
    elif ct.letter == "D" and i == n - 1:
        v = [HALF] * (n - 1) + [-HALF]
    elif ct.letter == "D" and i == n:
        v = [HALF] * n
    return normalize_weight(ct, v)


def add_weights(a: Sequence, b: Sequence) -> Weight:
    return tuple(Fraction(x) + Fraction(y) for x, y in zip(a, b))


def scale_weight(wt: Sequence, factor) -> Weight:
    return tuple(Fraction(x) * factor for x in wt)


def weight_from_pairings(ct: ClassicalType, pairings: Dict[int, int]) -> Weight:
    """Recover a weight from its pairings, sum of pairings[i] * Lambda_i over I_0."""
    total = [Fraction(0)] * ct.n
    for i in ct.index_set:
        coeff = pairings.get(i, 0)
        if coeff:
            total = [t + coeff * c for t, c in zip(total, fundamental_weight(ct, i))]
    return normalize_weight(ct, total)


def is_dominant(ct: ClassicalType, wt: Sequence) -> bool:
    return all(classical_pairing(ct, i, wt) >= 0 for i in ct.index_set)


def dominant_representative(ct: ClassicalType, wt: Sequence) -> Weight:
    """The dominant weight in the Weyl orbit of wt."""
    w = normalize_weight(ct, wt)
    if ct.letter == "A":
        return normalize_weight(ct, sorted(w, reverse=True))
    mags = sorted((abs(c) for c in w), reverse=True)
    if ct.letter == "D":
        negatives = sum(1 for c in w if c < 0)
        if negatives % 2 == 1 and mags[-1] != 0:
            mags[-1] = -mags[-1]
    return tuple(mags)


# ---------------------------------------------------------------------------
# Partitions and shapes
# ---------------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Partition:
    """A shape: integer parts plus an optional half column of height n.

    `half` marks a spin column (types B, D); `sign = -1` marks a type-D
    shape whose last coordinate is negated (color 2 / Lambda_{n-1} side).
    """

    parts: Tuple[int, ...] = ()
    half: bool = False
    sign: int = 1

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        while parts and parts[-1] == 0:
            parts = parts[:-1]
        if any(a < b for a, b in zip(parts, parts[1:])) or any(p < 0 for p in parts):
            raise KRSpecError(f"parts {parts} are not a partition")
        object.__setattr__(self, "parts", parts)

    @property
    def size(self) -> int:
        return sum(self.parts)

    @property
    def length(self) -> int:
        return len(self.parts)

    def conjugate(self) -> Tuple[int, ...]:
        """Column heights, left to right."""
        if not self.parts:
            return ()
        return tuple(sum(1 for p in self.parts if p > j) for j in range(self.parts[0]))

    def to_weight(self, ct: ClassicalType) -> Weight:
        if self.length > ct.n:
            raise KRSpecError(f"{self} has more than {ct.n} rows")
        if (self.half or self.sign == -1) and ct.letter not in ("B", "D"):
            raise KRSpecError(f"{self} is only meaningful in types B and D")
        w = [Fraction(p) for p in self.parts] + [Fraction(0)] * (ct.n - self.length)
        if self.half:
            w = [c + HALF for c in w]
        if self.sign == -1:
            w[-1] = -w[-1]
        return normalize_weight(ct, w)

    @classmethod
    def from_weight(cls, ct: ClassicalType, wt: Sequence) -> "Partition":
        """Inverse of to_weight for dominant weights."""
        w = list(normalize_weight(ct, wt))
        if not is_dominant(ct, w):
            raise KRSpecError(f"weight {tuple(w)} is not dominant for {ct}")
        sign = 1
        if ct.letter == "D" and w[-1] < 0:
            sign = -1
            w[-1] = -w[-1]
        half = any(c.denominator != 1 for c in w)
        if half:
            w = [c - HALF for c in w]
        return cls(tuple(int(c) for c in w), half, sign)

    def __str__(self) -> str:
        body = "(" + ",".join(str(p) for p in self.parts) + ")"
        if self.half:
            body += "+spin"
        if self.sign == -1:
            body += "'"
        return body


def exceptional_nodes(at: AffineType) -> frozenset:
    n = at.n
    if at.family == "C1":
        return frozenset({n})
    if at.family == "D1":
        return frozenset({n - 1, n})
    if at.family == "D2":
        return frozenset({n})
    return frozenset()


def removal_shape(at: AffineType) -> str:
    if at.family == "A1":
        return "none"
    if at.family in ("B1", "D1", "A2o"):
        return "vertical_domino"
    if at.family == "C1":
        return "horizontal_domino"
    return "box"


def check_node(at: AffineType, r: int, s: int):
    if r not in at.classical.index_set:
        raise KRSpecError(f"r={r} is not a classical node of {at}")
    if s < 1:
        raise KRSpecError(f"s must be positive, got {s}")


def _columns_to_partition(heights: Iterable[int], half: bool = False) -> Partition:
    cols = sorted((h for h in heights if h > 0), reverse=True)
    if not cols:
        return Partition((), half)
    parts = tuple(sum(1 for h in cols if h > k) for k in range(cols[0]))
    return Partition(parts, half)


def _height_multisets(heights: Sequence[int], width: int) -> List[Tuple[int, ...]]:
    return list(itertools.combinations_with_replacement(sorted(heights, reverse=True), width))


def decomposition_shapes(at: AffineType, r: int, s: int) -> List[Partition]:
    """Classical highest weights of B^{r,s} at a nonexceptional node.

    Args:
        at: affine type
        r: classical node
        s: width

    Returns:
        list of Partition, sorted
    """
    check_node(at, r, s)
    if r in exceptional_nodes(at):
        raise KRSpecError(f"r={r} is exceptional for {at}; B^{{r,s}} is B(s Lambda_r)")
    shape = removal_shape(at)
    found = set()
    if shape == "none":
        found.add(Partition((s,) * r))
    elif at.family == "B1" and r == at.n:
        allowed = [h for h in range(0, r + 1) if (r - h) % 2 == 0]
        for cols in _height_multisets(allowed, s // 2):
            found.add(_columns_to_partition(cols, half=bool(s % 2)))
    elif shape == "vertical_domino":
        allowed = [h for h in range(0, r + 1) if (r - h) % 2 == 0]
        for cols in _height_multisets(allowed, s):
            found.add(_columns_to_partition(cols))
    elif shape == "horizontal_domino":
        allowed = [k for k in range(0, s + 1) if (s - k) % 2 == 0]
        for rows in itertools.combinations_with_replacement(sorted(allowed, reverse=True), r):
            found.add(Partition(tuple(rows)))
    else:
        for rows in itertools.combinations_with_replacement(range(s, -1, -1), r):
            found.add(Partition(tuple(rows)))
    return sorted(found)


def highest_weight(at: AffineType, r: int, s: int) -> Weight:
    """The classical weight s * Lambda_r."""
    check_node(at, r, s)
    return scale_weight(fundamental_weight(at.classical, r), s)


# ---------------------------------------------------------------------------
# Weyl dimension formula
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def positive_roots(ct: ClassicalType) -> Tuple[Weight, ...]:
    n = ct.n
    roots = []

    def vec(entries):
        v = [Fraction(0)] * n
        for k, c in entries:
            v[k] += c
        return tuple(v)

    for a in range(n):
        for b in range(a + 1, n):
            roots.append(vec([(a, 1), (b, -1)]))
            if ct.letter != "A":
                roots.append(vec([(a, 1), (b, 1)]))
        if ct.letter == "B":
            roots.append(vec([(a, 1)]))
        elif ct.letter == "C":
            roots.append(vec([(a, 2)]))
    return tuple(roots)


def rho(ct: ClassicalType) -> Weight:
    n = ct.n
    if ct.letter == "B":
        return tuple(Fraction(2 * (n - k) - 1, 2) for k in range(n))
    if ct.letter == "D":
        return tuple(Fraction(n - 1 - k) for k in range(n))
    return tuple(Fraction(n - k) for k in range(n))


def weyl_dimension(ct: ClassicalType, wt: Sequence) -> int:
    """Dimension of the irreducible module of dominant highest weight wt."""
    w = _frac_weight(wt)
    if not is_dominant(ct, w):
        raise KRSpecError(f"weight {w} is not dominant for {ct}")
    rh = rho(ct)
    num, den = Fraction(1), Fraction(1)
    for alpha in positive_roots(ct):
        num *= sum((x + y) * a for x, y, a in zip(w, rh, alpha))
        den *= sum(y * a for y, a in zip(rh, alpha))
    dim = num / den
    if dim.denominator != 1:
        raise KRSpecError(f"non-integral Weyl dimension {dim} for {w}")
    return int(dim)


def format_weight(wt: Optional[Sequence]) -> List[str]:
    """Weight coordinates as strings, for JSON."""
    return [str(Fraction(c)) for c in wt] if wt is not None else []
