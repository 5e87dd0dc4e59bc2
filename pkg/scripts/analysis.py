#!/usr/bin/env python3
"""
Checks run against built crystals: extremal elements, simplicity,
connectedness of tensor products, regularity, maps between KR crystals,
sigma and the non-extremal witnesses of I_0-highest elements.

Every check returns a Verdict (or a small report) instead of raising, so
that the CLI can aggregate many of them into one JSON summary.
"""

import logging
import time
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

from cartan import (ClassicalType, Partition, affine_pairing, decomposition_shapes,
                    dominant_representative, format_weight, weight_from_pairings)
from crystal_core import (CrystalGraph, CrystalMap, apply_mapped, classical_decomposition,
                          structure_violations, tensor_all, weyl_reflection)
from errors import KRSpecError
from kr import (KRCrystal, KRSpec, build_kr, column_counts, exceptional_shape, j_colors,
                triple_of)
from pm_diagrams import phi_inverse
from tableaux import build_classical

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)


@dataclass
class Verdict:
    """Machine-readable outcome of one check."""

    check: str
    spec: Dict
    passed: bool
    detail: Dict = field(default_factory=dict)
    counterexample: Optional[Dict] = None
    seconds: float = 0.0

    def to_json(self) -> Dict:
        data = {
            "check": self.check,
            "spec": self.spec,
            "verdict": "pass" if self.passed else "fail",
            "detail": self.detail,
            "timings": {"seconds": round(self.seconds, 3)},
        }
        if self.counterexample is not None:
            data["counterexample"] = self.counterexample
        return data


def _spec_dict(spec) -> Dict:
    if spec is None:
        return {}
    if isinstance(spec, KRSpec):
        return spec.to_dict()
    return dict(spec)


# ---------------------------------------------------------------------------
# Extremal elements and simplicity
# ---------------------------------------------------------------------------

def weyl_orbit(graph: CrystalGraph, b: int, colors: Optional[Sequence[int]] = None) -> List[int]:
    """Orbit of b under the simple reflections S_i for i in colors."""
    colors = tuple(graph.index_set if colors is None else colors)
    seen = {b}
    queue = deque([b])
    while queue:
        c = queue.popleft()
        for i in colors:
            d = weyl_reflection(graph, i, c)
            if d not in seen:
                seen.add(d)
                queue.append(d)
    return sorted(seen)


def _at_string_ends(graph: CrystalGraph, c: int, colors: Sequence[int]) -> bool:
    return all(min(graph.epsilon(i, c), graph.phi(i, c)) == 0 for i in colors)


def is_extremal(graph: CrystalGraph, b: int,
                colors: Optional[Sequence[int]] = None) -> Tuple[bool, List[int]]:
    """Whether every element of the Weyl orbit of b sits at an end of each string.

    Returns:
        (extremal, orbit)
    """
    colors = tuple(graph.index_set if colors is None else colors)
    orbit = weyl_orbit(graph, b, colors)
    return all(_at_string_ends(graph, c, colors) for c in orbit), orbit


def extremal_elements(graph: CrystalGraph, colors: Optional[Sequence[int]] = None) -> List[int]:
    colors = tuple(graph.index_set if colors is None else colors)
    done = [False] * len(graph)
    extremal: List[int] = []
    for b in range(len(graph)):
        if done[b]:
            continue
        orbit = weyl_orbit(graph, b, colors)
        for c in orbit:
            done[c] = True
        if all(_at_string_ends(graph, c, colors) for c in orbit):
            extremal.extend(orbit)
    return sorted(extremal)


def check_simple(graph: CrystalGraph, spec=None) -> Verdict:
    """Extremal weights form one Weyl orbit whose dominant weight has a single element."""
    start = time.time()
    ct = graph.ctype
    extremal = extremal_elements(graph)
    dominants = sorted({dominant_representative(ct, graph.weight(b)) for b in extremal})
    detail = {"size": len(graph), "extremal": len(extremal)}
    verdict = Verdict("simple", _spec_dict(spec), False, detail)
    if not extremal:
        verdict.counterexample = {"reason": "no extremal elements"}
    elif len(dominants) != 1:
        verdict.counterexample = {"reason": "extremal weights lie in several Weyl orbits",
                                  "dominant_weights": [format_weight(w) for w in dominants]}
    else:
        lam = dominants[0]
        fiber = [b for b in range(len(graph)) if tuple(graph.weight(b)) == lam]
        detail["lambda"] = format_weight(lam)
        detail["fiber"] = len(fiber)
        if len(fiber) != 1:
            verdict.counterexample = {"reason": f"{len(fiber)} elements of weight lambda",
                                      "elements": [graph.key(b) for b in fiber[:5]]}
        else:
            verdict.passed = True
    verdict.seconds = time.time() - start
    return verdict


def check_decomposition(kr: KRCrystal) -> Verdict:
    """I_0-highest weights of B^{r,s} against the expected shapes."""
    start = time.time()
    spec = kr.spec
    if kr.route == "f":
        expected = [exceptional_shape(spec)]
    else:
        expected = decomposition_shapes(spec.affine, spec.r, spec.s)
    found = classical_decomposition(kr.graph)
    passed = sorted(map(str, found)) == sorted(map(str, expected))
    detail = {"size": len(kr.graph), "route": kr.route, "shapes": [str(p) for p in found]}
    verdict = Verdict("decomp", spec.to_dict(), passed, detail)
    if not passed:
        verdict.counterexample = {"expected": [str(p) for p in expected],
                                  "found": [str(p) for p in found]}
    verdict.seconds = time.time() - start
    return verdict


def check_connected(kr: KRCrystal) -> Verdict:
    """Whether the affine graph of B^{r,s} is connected."""
    start = time.time()
    passed = kr.graph.is_connected()
    return Verdict("connected", kr.spec.to_dict(), passed, {"size": len(kr.graph)},
                   seconds=time.time() - start)


def check_tensor_connected(specs: Sequence[KRSpec], budget: Optional[int] = None,
                           simple: bool = False) -> Verdict:
    """Build B^{r1,s1} ⊗ ... and test connectedness, and simplicity on request.

    Args:
        specs (Sequence[KRSpec]): the factors, left to right, all of one affine type
        budget (int, optional): element budget for the product
        simple (bool): also run check_simple on the product

    Returns:
        Verdict: check "tensor", detail carries the product size and factor labels

    Raises:
        KRSpecError: no factors
        BudgetExceeded: the product is larger than the budget
    """
    start = time.time()
    if not specs:
        raise KRSpecError("tensor check needs at least one factor")
    product = tensor_all([build_kr(spec, budget).graph for spec in specs], budget)
    detail = {"size": len(product), "factors": [str(s) for s in specs]}
    connected = product.is_connected()
    passed = connected
    if simple:
        simple_verdict = check_simple(product)
        detail["simple"] = simple_verdict.passed
        passed = passed and simple_verdict.passed
    verdict = Verdict("tensor", {"factors": [s.to_dict() for s in specs]}, passed, detail)
    if not connected:
        verdict.counterexample = {"components": len(product.restrict(product.index_set))}
    verdict.seconds = time.time() - start
    return verdict


# ---------------------------------------------------------------------------
# Regularity
# ---------------------------------------------------------------------------

def _rank_two(ct: ClassicalType, family: Optional[str], i: int, j: int):
    """(rank-2 type, color relabeling) for adjacent nodes i < j, "skip" for
    adjacent pairs without a tableau model here, None when not adjacent."""
    n = ct.n
    a2 = ClassicalType("A", 3)
    if i == 0:
        if family == "A1":
            neighbors = {1, n - 1}
            simple_bond = n >= 3
        elif family in ("B1", "D1", "A2o"):
            neighbors = {2}
            simple_bond = n >= 3
        else:
            neighbors = {1}
            simple_bond = False
        if j not in neighbors:
            return None
        return (a2, {0: 1, j: 2}) if simple_bond else "skip"
    if ct.letter == "D":
        if j == n and i == n - 2:
            return a2, {i: 1, j: 2}
        if j == i + 1 and j < n:
            return a2, {i: 1, j: 2}
        return None
    if j != i + 1:
        return None
    if j == n and ct.letter in ("B", "C"):
        return ClassicalType(ct.letter, 2), {i: 1, j: 2}
    return a2, {i: 1, j: 2}


def _commute_violations(graph: CrystalGraph, i: int, j: int, limit: int) -> List[str]:
    problems = []
    for b in range(len(graph)):
        fi, fj = graph.f(i, b), graph.f(j, b)
        if fi is not None and graph.epsilon(j, fi) != graph.epsilon(j, b):
            problems.append(f"{graph.key(b)}: f_{i} changes eps_{j}")
        if fi is not None and fj is not None and graph.f(j, fi) != graph.f(i, fj):
            problems.append(f"{graph.key(b)}: f_{i} and f_{j} do not commute")
        if len(problems) >= limit:
            break
    return problems


def check_regular(graph: CrystalGraph, spec=None, limit: int = 20) -> Verdict:
    """Seminormality plus every two-color restriction against its rank-2 model."""
    start = time.time()
    problems = list(structure_violations(graph, limit))
    family = graph.affine.family if graph.affine else None
    models: Dict[Tuple, nx.MultiDiGraph] = {}
    matcher = isomorphism.categorical_multiedge_match("color", None)
    skipped = []
    colors = graph.index_set
    for x, i in enumerate(colors):
        for j in colors[x + 1:]:
            kind = _rank_two(graph.ctype, family, i, j)
            if kind is None:
                problems.extend(_commute_violations(graph, i, j, limit))
                continue
            if kind == "skip":
                skipped.append(f"{i},{j}")
                continue
            small, relabel = kind
            for component in graph.restrict((i, j)):
                members = set(component)
                tops = [b for b in component if graph.e(i, b) is None and graph.e(j, b) is None]
                if len(tops) != 1:
                    problems.append(f"{{{i},{j}}}-component of {graph.key(component[0])} "
                                    f"has {len(tops)} highest elements")
                    continue
                top = tops[0]
                pairings = {relabel[i]: graph.phi(i, top), relabel[j]: graph.phi(j, top)}
                shape = Partition.from_weight(small, weight_from_pairings(small, pairings))
                if (small, shape) not in models:
                    models[(small, shape)] = build_classical(small, shape).to_networkx()
                piece = nx.MultiDiGraph()
                piece.add_nodes_from(component)
                for b in component:
                    for c in (i, j):
                        target = graph.f(c, b)
                        if target is not None and target in members:
                            piece.add_edge(b, target, color=relabel[c])
                if not nx.is_isomorphic(piece, models[(small, shape)], edge_match=matcher):
                    problems.append(f"{{{i},{j}}}-component of {graph.key(top)} is not B{shape}")
            if len(problems) >= limit:
                break
    detail = {"size": len(graph), "skipped_pairs": skipped}
    verdict = Verdict("regular", _spec_dict(spec), not problems, detail)
    if problems:
        verdict.counterexample = {"problems": problems[:limit]}
    verdict.seconds = time.time() - start
    return verdict


# ---------------------------------------------------------------------------
# Maps
# ---------------------------------------------------------------------------

@dataclass
class MapReport:
    kind: str
    checked: int
    violations: List[str]

    @property
    def ok(self) -> bool:
        return not self.violations


def verify_map(cmap: CrystalMap, limit: int = 50) -> MapReport:
    """Check the defining relations of a map at every element and color.

    Args:
        cmap (CrystalMap): the map, total on its source
        limit (int): stop collecting violations after this many

    Returns:
        MapReport: number of (element, color) pairs checked and the violations found
    """
    source, target = cmap.source, cmap.target
    violations: List[str] = []
    missing = [source.key(b) for b in range(len(source)) if b not in cmap.assignment]
    violations.extend(f"{key}: not mapped" for key in missing[:limit])
    checked = 0
    for b, image in sorted(cmap.assignment.items()):
        for i in source.index_set:
            images = cmap.color_map.get(i)
            if images is None:
                violations.append(f"color {i} has no image")
                continue
            checked += 1
            for j, power in images:
                if target.epsilon(j, image) != power * source.epsilon(i, b):
                    violations.append(f"{source.key(b)}: eps_{j}(S b) != {power} eps_{i}(b)")
                if target.phi(j, image) != power * source.phi(i, b):
                    violations.append(f"{source.key(b)}: phi_{j}(S b) != {power} phi_{i}(b)")
            for direction in ("f", "e"):
                nxt = source.f(i, b) if direction == "f" else source.e(i, b)
                expected = cmap.assignment.get(nxt) if nxt is not None else None
                if apply_mapped(target, image, images, direction) != expected:
                    violations.append(f"{source.key(b)}: S({direction}_{i} b) != "
                                      f"{direction}-image of S(b)")
            if len(violations) >= limit:
                return MapReport(cmap.kind, checked, violations)
    return MapReport(cmap.kind, checked, violations)


def map_verdict(cmap: CrystalMap, spec, check: str, start: float) -> Verdict:
    report = verify_map(cmap)
    detail = {"kind": cmap.kind, "checked": report.checked, "source": len(cmap.source),
              "target": len(cmap.target), "notes": list(cmap.notes)}
    verdict = Verdict(check, _spec_dict(spec), report.ok and cmap.is_total(), detail)
    if not verdict.passed:
        verdict.counterexample = {"violations": report.violations[:10]}
    verdict.seconds = time.time() - start
    return verdict


# ---------------------------------------------------------------------------
# sigma and the exceptional 0-arrows
# ---------------------------------------------------------------------------

def check_sigma(kr: KRCrystal, budget: Optional[int] = None) -> Verdict:
    """sigma^2 = id and (eps_0, phi_0)(b) = (eps_1, phi_1)(sigma b); triple weights."""
    start = time.time()
    graph = kr.graph
    problems: List[str] = []
    detail: Dict = {"route": kr.route, "size": len(graph)}
    if kr.sigma is not None:
        if kr.partner is None:
            partner, back = graph, kr.sigma
        else:
            other = KRSpec(kr.spec.affine, 2 * kr.spec.n - 1 - kr.spec.r, kr.spec.s)
            partner, back = kr.partner, build_kr(other, budget).sigma
        for b in range(len(graph)):
            image = kr.sigma[b]
            if back[image] != b:
                problems.append(f"sigma^2 moves {graph.key(b)}")
            if (graph.epsilon(0, b), graph.phi(0, b)) != (partner.epsilon(1, image),
                                                         partner.phi(1, image)):
                problems.append(f"{graph.key(b)}: 0-string differs from the 1-string of sigma(b)")
    elif kr.route == "f":
        ct = graph.ctype
        outer = exceptional_shape(kr.spec)
        triples = 0
        for u in graph.highest(j_colors(ct)):
            triple = triple_of(phi_inverse(ct, graph.payload(u), outer))
            triples += 1
            scale = Fraction(1) if ct.letter == "C" else Fraction(1, 2)
            if graph.weight(u)[0] != scale * (triple[0] - triple[1]):
                problems.append(f"{graph.key(u)}: weight does not match triple {triple}")
        detail["triples"] = triples
    else:
        raise KRSpecError(f"{kr.spec} carries no sigma or triple data (route {kr.route})")
    verdict = Verdict("sigma", kr.spec.to_dict(), not problems, detail)
    if problems:
        verdict.counterexample = {"problems": problems[:10]}
    verdict.seconds = time.time() - start
    return verdict


# ---------------------------------------------------------------------------
# Non-extremal witnesses
# ---------------------------------------------------------------------------

@dataclass
class WitnessReport:
    element: str
    shape: str
    k: int
    s_k: int
    witness: str
    strings: Tuple[int, int]
    expected: Tuple[int, int]
    pairing: int
    expected_pairing: int

    @property
    def ok(self) -> bool:
        return (self.strings == self.expected and self.pairing == self.expected_pairing
                and min(self.strings) > 0)

    def to_json(self) -> Dict:
        return {"element": self.element, "shape": self.shape, "k": self.k, "s_k": self.s_k,
                "witness": self.witness, "eps0_phi0": list(self.strings),
                "expected": list(self.expected), "pairing": self.pairing,
                "expected_pairing": self.expected_pairing, "ok": self.ok}


def _witness_case(spec: KRSpec) -> str:
    family, r, n = spec.family, spec.r, spec.n
    if family == "C1" and r < n:
        return "C"
    if (family == "B1" and r < n) or (family == "D1" and r <= n - 2) or family == "A2o":
        return "sigma"
    raise KRSpecError(f"no non-extremal witness for {spec}")


def witness_nonextremal(spec: KRSpec, b: int, budget: Optional[int] = None) -> WitnessReport:
    """Walk from an I_0-highest b of non-rectangular weight to a b' with both
    eps_0(b') and phi_0(b') positive.

    sigma route: b' = S_2 S_1 . S_3 S_2 ... S_{k+1} S_k b,
    expected (eps_0, phi_0) = (2s - s_k, s_k).
    C route: b' = S_1 S_2 ... S_k b, expected (s - s_k/2, s_k/2).
    """
    case = _witness_case(spec)
    kr = build_kr(spec, budget)
    graph = kr.graph
    if any(graph.e(i, b) is not None for i in graph.classical_index_set):
        raise KRSpecError(f"{graph.key(b)} is not I_0-highest")
    shape = Partition.from_weight(graph.ctype, graph.weight(b))
    counts = column_counts(shape, spec.s)
    k = min(h for h in range(spec.r + 1) if counts.get(h, 0) > 0)
    if k == spec.r:
        raise KRSpecError(f"{graph.key(b)} has the rectangular weight {shape}")
    s, s_k = spec.s, counts[k]
    witness = b
    for j in range(k, 0, -1):
        witness = weyl_reflection(graph, j, witness)
        if case == "sigma":
            witness = weyl_reflection(graph, j + 1, witness)
    if case == "sigma":
        expected = (2 * s - s_k, s_k)
        expected_pairing = 2 * (s_k - s)
    else:
        expected = (s - s_k // 2, s_k // 2)
        expected_pairing = s_k - s
    strings = (graph.epsilon(0, witness), graph.phi(0, witness))
    pairing = affine_pairing(spec.affine, 0, graph.weight(witness))
    return WitnessReport(graph.key(b), str(shape), k, s_k, graph.key(witness), strings,
                         expected, pairing, expected_pairing)


def witness_all(spec: KRSpec, budget: Optional[int] = None) -> List[WitnessReport]:
    graph = build_kr(spec, budget).graph
    rectangle = Partition((spec.s,) * spec.r)
    return [witness_nonextremal(spec, b, budget)
            for b in graph.highest(graph.classical_index_set)
            if Partition.from_weight(graph.ctype, graph.weight(b)) != rectangle]


def check_witness(spec: KRSpec, budget: Optional[int] = None) -> Verdict:
    start = time.time()
    reports = witness_all(spec, budget)
    failed = [r for r in reports if not r.ok]
    verdict = Verdict("witness", spec.to_dict(), not failed,
                      {"witnesses": [r.to_json() for r in reports]})
    if failed:
        verdict.counterexample = failed[0].to_json()
    verdict.seconds = time.time() - start
    return verdict


# ---------------------------------------------------------------------------
# Branching sweep helpers
# ---------------------------------------------------------------------------

def partitions_up_to(size: int, rows: int) -> List[Partition]:
    """Nonempty partitions with at most `size` boxes and `rows` rows."""
    found: List[Partition] = []

    def grow(prefix: Tuple[int, ...], remaining: int, cap: int):
        if prefix:
            found.append(Partition(prefix))
        if len(prefix) == rows:
            return
        for part in range(min(cap, remaining), 0, -1):
            grow(prefix + (part,), remaining - part, part)

    grow((), size, size)
    return sorted(found)


def summarize(verdicts: Iterable[Verdict]) -> Dict:
    """Totals for a run: total, passed, failed."""
    verdicts = list(verdicts)
    passed = sum(1 for v in verdicts if v.passed)
    return {"total": len(verdicts), "passed": passed, "failed": len(verdicts) - passed}
