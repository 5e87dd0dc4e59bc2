#!/usr/bin/env python3
"""
±-diagrams: X_n -> X_{n-1} branching, the bijection Phi onto
{2,...,n}-highest tableaux and the involution frak-S behind sigma.

A diagram is a triple of row-length sequences inner ⊆ middle ⊆ outer with
horizontal-strip differences: cells of middle/inner carry +, cells of
outer/middle carry -. Types B and C keep n entries in outer and middle and
n-1 in inner; type D uses the Gelfand-Tsetlin form (n, n-1, n-1 entries,
half-integers and a signed last entry allowed).
"""

import itertools
import logging
from collections import Counter
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Dict, Iterator, List, Optional, Sequence, Tuple

from cartan import ClassicalType, Partition
from crystal_core import CrystalGraph
from errors import CrystalStructureError, KRSpecError, PhiError
from tableaux import KNTableau, build_classical, is_valid

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)

# Column patterns, bottom to top above the inner part
NONE, PLUS, MINUS, PAIR = "", "+", "-", "-+"


def _conjugate(rows: Sequence[int], depth: int = 0) -> List[int]:
    width = max((int(r) for r in rows), default=0)
    return [sum(1 for r in rows if r > j) for j in range(max(width, depth))]


def _steps(lo: Fraction, hi: Fraction) -> Iterator[Fraction]:
    value = lo
    while value <= hi:
        yield value
        value += 1


@dataclass(frozen=True, order=True)
class PMDiagram:
    """A ±-diagram of type B, C or D.

    Attributes:
        outer, middle, inner: row lengths (see module docstring)
        zero: type B, a 0 replaces the leftmost - at height n
        spin: type B, sign (+1/-1) carried by the half-width spin column, 0 if none
    """

    ct: ClassicalType
    outer: Tuple[Fraction, ...]
    middle: Tuple[Fraction, ...]
    inner: Tuple[Fraction, ...]
    zero: bool = False
    spin: int = 0

    @property
    def j_type(self) -> ClassicalType:
        return ClassicalType(self.ct.letter, self.ct.n - 1)

    @property
    def outer_shape(self) -> Partition:
        if self.ct.letter == "D":
            return Partition.from_weight(self.ct, self.outer)
        return Partition(tuple(int(x) for x in self.outer), self.spin != 0)

    @property
    def inner_shape(self) -> Partition:
        if self.ct.letter == "D":
            return Partition.from_weight(self.j_type, self.inner)
        return Partition(tuple(int(x) for x in self.inner), self.spin != 0)

    @property
    def epsilon1(self) -> Optional[Fraction]:
        """First weight coordinate of Phi(P); None for type D."""
        if self.ct.letter == "D":
            return None
        plus = sum(self.middle) - sum(self.inner)
        minus = sum(self.outer) - sum(self.middle) - (1 if self.zero else 0)
        return Fraction(plus - minus) + Fraction(self.spin, 2)

    def columns(self) -> List[Tuple[int, str]]:
        """(inner height, pattern) per column, left to right (integral diagrams only)."""
        if any(Fraction(x).denominator != 1 or x < 0 for x in self.outer + self.middle + self.inner):
            raise KRSpecError("column data needs an integral diagram")
        depth = len(self.outer)
        big = _conjugate(self.outer, 0)
        mid = _conjugate(self.middle, len(big))
        low = _conjugate(self.inner, len(big))
        cols = []
        for j in range(len(big)):
            pattern = (PLUS if mid[j] > low[j] else "") + (MINUS if big[j] > mid[j] else "")
            pattern = {"+-": PAIR}.get(pattern, pattern)
            cols.append((low[j], pattern))
        return cols

    def to_json(self) -> Dict:
        return {
            "type": str(self.ct),
            "outer": [str(x) for x in self.outer],
            "middle": [str(x) for x in self.middle],
            "inner": [str(x) for x in self.inner],
            "zero": self.zero,
            "spin": self.spin,
        }

    def __str__(self) -> str:
        text = ",".join(f"{h}{p or '.'}" for h, p in self.columns()) if self.ct.letter != "D" or \
            all(Fraction(x).denominator == 1 and x >= 0 for x in self.outer) else str(self.outer)
        extra = (" 0" if self.zero else "") + ({1: " <+>", -1: " <->"}.get(self.spin, ""))
        return f"[{text}]{extra}"


def from_columns(ct: ClassicalType, columns: Sequence[Tuple[int, str]], zero: bool = False,
                 spin: int = 0) -> PMDiagram:
    """Assemble a diagram from column data, in canonical column order."""
    triples = []
    for height, pattern in columns:
        if pattern not in (NONE, PLUS, MINUS, PAIR):
            raise KRSpecError(f"unknown column pattern {pattern!r}")
        mid = height + (1 if pattern in (PLUS, PAIR) else 0)
        top = mid + (1 if pattern in (MINUS, PAIR) else 0)
        if top > 0:
            triples.append((top, mid, height))
    triples.sort(reverse=True)
    for k in range(3):
        seq = [t[k] for t in triples]
        if any(a < b for a, b in zip(seq, seq[1:])):
            raise CrystalStructureError(f"columns {list(columns)} do not form a ±-diagram")
    n = ct.n
    rows = []
    for k in range(3):
        seq = [t[k] for t in triples]
        rows.append(tuple(Fraction(sum(1 for h in seq if h > r)) for r in range(n)))
    outer, middle, inner = rows
    if ct.letter == "D":
        middle = middle[: n - 1]
    inner = inner[: n - 1]
    if any(x for x in rows[2][n - 1:]):
        raise CrystalStructureError("inner shape reaches height n")
    return PMDiagram(ct, outer, middle, inner, zero, spin)


# ---------------------------------------------------------------------------
# Enumeration
# ---------------------------------------------------------------------------

def _check_outer(ct: ClassicalType, outer: Partition):
    if ct.letter not in ("B", "C", "D"):
        raise KRSpecError(f"±-diagrams are defined for types B, C, D, not {ct}")
    if outer.length > ct.n:
        raise KRSpecError(f"{outer} has more than {ct.n} rows")
    if outer.half and ct.letter == "C":
        raise KRSpecError(f"{outer} is not a type C weight")


def enumerate_pm(ct: ClassicalType, outer: Partition) -> List[PMDiagram]:
    """All ±-diagrams with the given outer shape.

    In type D the diagrams come in Gelfand-Tsetlin form, including columns
    of height n-1 that Phi does not reach.

    Raises:
        KRSpecError: not a type B, C or D outer shape of at most n rows
    """
    _check_outer(ct, outer)
    n = ct.n
    result = []
    if ct.letter == "D":
        big = outer.to_weight(ct)
        for mid in _gt_middle(big):
            for low in _gt_inner(mid):
                result.append(PMDiagram(ct, big, mid, low))
        return sorted(result)
    big = tuple(Fraction(p) for p in outer.parts) + (Fraction(0),) * (n - outer.length)
    spins = (1, -1) if outer.half else (0,)
    mid_ranges = [range(int(big[k + 1]) if k + 1 < n else 0, int(big[k]) + 1) for k in range(n)]
    for mid in itertools.product(*mid_ranges):
        low_ranges = [range(mid[k + 1], mid[k] + 1) for k in range(n - 1)]
        for low in itertools.product(*low_ranges):
            mid_f = tuple(Fraction(x) for x in mid)
            low_f = tuple(Fraction(x) for x in low)
            for spin in spins:
                result.append(PMDiagram(ct, big, mid_f, low_f, False, spin))
                if ct.letter == "B" and spin == 0 and _zero_allowed(big, mid, low, n):
                    result.append(PMDiagram(ct, big, mid_f, low_f, True, 0))
    return sorted(result)


def _zero_allowed(big, mid, low, n) -> bool:
    if big[n - 1] - mid[n - 1] < 1:
        return False
    below = low[n - 2] if n >= 2 else 0
    return mid[n - 1] + 1 <= below


def _gt_middle(big: Tuple[Fraction, ...]) -> Iterator[Tuple[Fraction, ...]]:
    n = len(big)
    ranges = []
    for k in range(n - 1):
        lo = abs(big[n - 1]) if k == n - 2 else big[k + 1]
        ranges.append(list(_steps(lo, big[k])))
    for mid in itertools.product(*ranges):
        yield tuple(mid)


def _gt_inner(mid: Tuple[Fraction, ...]) -> Iterator[Tuple[Fraction, ...]]:
    m = len(mid)
    ranges = []
    for k in range(m):
        if k == m - 1:
            ranges.append(list(_steps(-mid[k], mid[k])))
        else:
            ranges.append(list(_steps(mid[k + 1], mid[k])))
    for low in itertools.product(*ranges):
        yield tuple(low)


# ---------------------------------------------------------------------------
# Phi
# ---------------------------------------------------------------------------

def phi(P: PMDiagram) -> KNTableau:
    """The {2,...,n}-highest tableau of J-weight inner(P) attached to P.

    Raises:
        PhiError: unsupported input or an invalid resulting tableau
    """
    ct = P.ct
    n = ct.n
    if ct.letter == "D" and (any(Fraction(x).denominator != 1 for x in P.outer)
                             or P.outer[n - 2] != 0):
        raise PhiError("Phi in type D is only available for columns of height at most n-2")
    big = _conjugate(P.outer)
    mid = _conjugate(P.middle, len(big))
    low = _conjugate(P.inner, len(big))
    columns: List[List[int]] = []
    candidates: List[Tuple[str, int]] = []
    spin = None
    if P.spin:
        spin = [1] * n if P.spin > 0 else [-1] + [1] * (n - 1)
        if P.spin < 0:
            candidates.append(("spin", -1))
    zero_col = int(P.middle[n - 1]) if P.zero else None
    pluses: List[int] = []
    for j, height in enumerate(big):
        if height == n and mid[j] == n and low[j] == n - 1:
            columns.append(list(range(1, n + 1)))
            continue
        cells: List[int] = [0] * height
        has_top = height > mid[j]
        if has_top:
            cells[height - 1] = 0 if j == zero_col else -1
            if j != zero_col:
                candidates.append(("bar", j))
        length = height - (1 if has_top else 0)
        cells[:length] = list(range(2, length + 2))
        if length:
            candidates.append(("str", j))
        columns.append(cells)
        if mid[j] > low[j]:
            pluses.append(mid[j])
    for h in pluses:
        if not candidates:
            raise PhiError(f"{P}: no 1-bar or 2-string left for + at height {h}")
        kind, j = candidates.pop(0)
        if kind == "spin":
            spin = [1] * n
            spin[h] = -1
        elif kind == "bar":
            columns[j][-1] = -(h + 1)
        else:
            cells = columns[j]
            length = sum(1 for x in cells if x > 0)
            if h > length:
                raise PhiError(f"{P}: string in column {j} too short for + at height {h}")
            cells[:length] = list(range(1, h + 1)) + list(range(h + 2, length + 2))
    result = KNTableau(ct, tuple(tuple(c) for c in columns), tuple(spin) if spin else None)
    if not is_valid(result):
        raise PhiError(f"Phi({P}) = {result} is not a valid tableau")
    return result


@lru_cache(maxsize=None)
def phi_table(ct: ClassicalType, outer: Partition) -> Dict[str, PMDiagram]:
    """Serialized Phi(P) -> P for every diagram of the given outer shape."""
    table = {}
    for P in enumerate_pm(ct, outer):
        key = phi(P).serialize()
        if key in table:
            raise PhiError(f"Phi is not injective on {outer}: {P} and {table[key]}")
        table[key] = P
    return table


def phi_inverse(ct: ClassicalType, b: KNTableau, outer: Partition) -> PMDiagram:
    """The diagram P with Phi(P) = b; b must be {2,...,n}-highest in B(outer)."""
    table = phi_table(ct, outer)
    key = b.serialize()
    if key not in table:
        raise PhiError(f"{b} is not a {{2..n}}-highest element of B{outer}")
    return table[key]


# ---------------------------------------------------------------------------
# frak-S
# ---------------------------------------------------------------------------

def involution_frakS(P: PMDiagram, r: int, s: int) -> PMDiagram:
    """The involution on diagrams of B^{r,s} that realizes sigma.

    Args:
        P: diagram whose inner shape fits r x s
        r, s: the KR node and width

    Returns:
        PMDiagram with the same inner shape
    """
    if P.zero or P.spin:
        raise KRSpecError("frak-S is not defined for diagrams with a 0 or a spin column")
    cols = P.columns()
    inner_cols = _conjugate(P.inner)
    width = int(P.inner[0]) if P.inner else 0
    counts: Dict[int, Counter] = {}
    for height, pattern in cols:
        counts.setdefault(height, Counter())[pattern] += 1
    c = Counter(h for h in inner_cols if h > 0)
    c[0] = s - width
    new_cols: List[Tuple[int, str]] = []
    for height, tally in counts.items():
        if height >= r:
            if any(p != NONE for p in tally if tally[p]):
                raise CrystalStructureError(f"{P}: signs above a column of height {height} >= r")
            new_cols.extend([(height, NONE)] * tally[NONE])
    for i in range(r):
        tally = counts.get(i, Counter())
        total = c[i]
        if i > 0 and tally[NONE] + tally[PLUS] + tally[MINUS] + tally[PAIR] != total:
            raise CrystalStructureError(f"{P}: column count mismatch at inner height {i}")
        if (r - 1 - i) % 2 == 0:
            if tally[NONE] or tally[PAIR]:
                raise CrystalStructureError(f"{P}: expected a single sign above height {i}")
            plus, minus = tally[PLUS], tally[MINUS]
            if plus + minus != total:
                raise CrystalStructureError(f"{P}: {total - plus - minus} unsigned columns at height {i}")
            new_cols.extend([(i, PLUS)] * minus + [(i, MINUS)] * plus)
        else:
            if tally[PLUS] or tally[MINUS]:
                raise CrystalStructureError(f"{P}: single signs above height {i} (parity of r)")
            pairs = tally[PAIR]
            if pairs > total:
                raise CrystalStructureError(f"{P}: c_{i}={total} < p_{i}={pairs}")
            new_cols.extend([(i, PAIR)] * (total - pairs) + [(i, NONE)] * pairs)
    return from_columns(P.ct, new_cols)


# ---------------------------------------------------------------------------
# Branching
# ---------------------------------------------------------------------------

@dataclass
class BranchingReport:
    ok: bool
    from_diagrams: List
    from_crystal: List
    missing: List
    extra: List


def branching_check(ct: ClassicalType, outer: Partition, graph: Optional[CrystalGraph] = None) -> BranchingReport:
    """Compare diagram inner shapes with the {2..n}-components of B(outer).

    Args:
        ct (ClassicalType): type B, C or D with n >= 3
        outer (Partition): the shape lambda
        graph (CrystalGraph, optional): a prebuilt B(lambda), built when absent

    Returns:
        BranchingReport: inner shapes from the diagrams and from the crystal, with the differences
    """
    _check_outer(ct, outer)
    if ct.n < 3:
        raise KRSpecError("branching_check needs n >= 3")
    graph = graph or build_classical(ct, outer)
    j_colors = tuple(range(2, ct.n + 1))
    j_type = ClassicalType(ct.letter, ct.n - 1)
    with_eps = ct.letter != "D"
    crystal_side = []
    for b in graph.highest(j_colors):
        wt = graph.weight(b)
        shape = Partition.from_weight(j_type, wt[1:])
        crystal_side.append((wt[0], shape) if with_eps else shape)
    diagram_side = [(P.epsilon1, P.inner_shape) if with_eps else P.inner_shape
                    for P in enumerate_pm(ct, outer)]
    have, want = Counter(crystal_side), Counter(diagram_side)
    missing = sorted((want - have).elements(), key=str)
    extra = sorted((have - want).elements(), key=str)
    ok = not missing and not extra
    if not ok:
        log.warning(f"⚠️ Branching mismatch for {ct} {outer}: missing={missing} extra={extra}")
    return BranchingReport(ok, sorted(diagram_side, key=str), sorted(crystal_side, key=str),
                           missing, extra)
