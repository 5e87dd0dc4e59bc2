#!/usr/bin/env python3
"""
Affine Kirillov-Reshetikhin crystals B^{r,s}.

Every family is assembled from classical tableau crystals plus a rule for
the 0-arrows:

  a  A_{n-1}^{(1)}                     f_0 = pr^-1 f_1 pr
  b  B_n^{(1)} r<n, D_n^{(1)} r<=n-2,  f_0 = sigma f_1 sigma, sigma from frak-S
     A_{2n-1}^{(2)}
  c  C_n^{(1)} r<n                     virtual inside A_{2n+1}^{(2)} B^{r,s}
  d  A_{2n}^{(2)}, D_{n+1}^{(2)} r<n   virtual inside A_{2n+1}^{(2)} B^{r,2s}
  e  B_n^{(1)} r=n                     virtual inside A_{2n-1}^{(2)} B^{n,s}
  f  exceptional nodes                 triples (C, D^{(2)}) or spin sigma (D)

Maps between KR crystals (similarity S_m and the multiplier/folding
variations) are seeded on I_0-highest elements and extended along paths.
"""

import logging
from collections import Counter
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from cartan import (AffineType, ClassicalType, Partition, decomposition_shapes,
                    exceptional_nodes, parse_type, scale_weight)
from crystal_core import (ColorMap, CrystalGraph, CrystalMap, disjoint_union, extend_map,
                          generate_virtual, multiplier_map, resolve_budget, tensor)
from errors import BudgetExceeded, CrystalStructureError, KRSpecError, MapExtensionError
from pm_diagrams import (MINUS, NONE, PAIR, PLUS, PMDiagram, from_columns, involution_frakS,
                         phi, phi_inverse)
from tableaux import build_classical, jdt_promotion, jdt_promotion_inverse

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)

ROUTES = {
    "a": "promotion",
    "b": "sigma",
    "c": "virtual in A2o",
    "d": "virtual in A2o (doubled)",
    "e": "virtual in A2o (spin)",
    "f": "exceptional node",
}

Triple = Tuple[int, int, int]


@dataclass(frozen=True)
class KRSpec:
    """A KR crystal label: affine type, classical node r, width s."""

    affine: AffineType
    r: int
    s: int

    def __post_init__(self):
        if self.r not in self.affine.classical.index_set:
            raise KRSpecError(f"r={self.r} is not a classical node of {self.affine}")
        if self.s < 1:
            raise KRSpecError(f"s must be positive, got {self.s}")

    @classmethod
    def parse(cls, type_string: str, r: int, s: int) -> "KRSpec":
        return cls(parse_type(type_string), int(r), int(s))

    @property
    def n(self) -> int:
        return self.affine.n

    @property
    def family(self) -> str:
        return self.affine.family

    def with_width(self, s: int) -> "KRSpec":
        return KRSpec(self.affine, self.r, s)

    def to_dict(self) -> Dict:
        return {"family": self.family, "n": self.n, "r": self.r, "s": self.s}

    def __str__(self) -> str:
        return f"B^{{{self.r},{self.s}}}[{self.affine.tag}]"


@dataclass
class KRCrystal:
    """A built KR crystal together with the data its 0-arrows came from.

    Attributes:
        graph: the affine crystal (index set I)
        route: construction route letter, see ROUTES
        sigma: route b, the involution on graph ids; route f (D), ids in `partner`
        partner: route f (D), the classical crystal of the other spin node
        ambient: routes c, d, e, the crystal the virtual image lives in
        color_map: routes c, d, e, virtual color -> ambient (color, power)
    """

    spec: KRSpec
    graph: CrystalGraph
    route: str
    sigma: Optional[Tuple[Optional[int], ...]] = None
    partner: Optional[CrystalGraph] = None
    ambient: Optional["KRCrystal"] = None
    color_map: Optional[ColorMap] = None
    notes: List[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.graph)


def plan_route(spec: KRSpec) -> str:
    """Pick the construction route for a KR label.

    Args:
        spec (KRSpec): family, rank and node

    Returns:
        str: one of "a" (promotion), "b" (sigma), "c"/"d"/"e" (virtual)
        or "f" (exceptional node)
    """
    family, r, n = spec.family, spec.r, spec.n
    if family == "A1":
        return "a"
    if r in exceptional_nodes(spec.affine):
        return "f"
    if family == "B1" and r == n:
        return "e"
    if family in ("B1", "D1", "A2o"):
        return "b"
    if family == "C1":
        return "c"
    return "d"


# ---------------------------------------------------------------------------
# Path replay along J = {2, ..., n}
# ---------------------------------------------------------------------------

def j_colors(ct: ClassicalType) -> Tuple[int, ...]:
    return tuple(i for i in ct.index_set if i >= 2)


def raise_to_highest(graph: CrystalGraph, b: int, colors: Sequence[int]) -> Tuple[int, List[int]]:
    """Apply e_j (smallest j first) until b is J-highest; return it with the path."""
    path: List[int] = []
    while True:
        for j in colors:
            up = graph.e(j, b)
            if up is not None:
                b = up
                path.append(j)
                break
        else:
            return b, path


def lower_along(graph: CrystalGraph, u: int, path: Sequence[int]) -> int:
    """Undo a raise_to_highest path from u by applying f_j in reverse order."""
    for j in reversed(path):
        nxt = graph.f(j, u)
        if nxt is None:
            raise CrystalStructureError(
                f"{graph.name}: path replay failed at {graph.key(u)} (f_{j} is zero)")
        u = nxt
    return u


def transport(source: CrystalGraph, target: CrystalGraph, colors: Sequence[int],
              on_highest: Callable[[int], Optional[int]]) -> List[Optional[int]]:
    """Extend a map on J-highest elements to all of source by commuting with e_j, f_j.

    Args:
        source (CrystalGraph): domain
        target (CrystalGraph): codomain
        colors (Sequence[int]): the colors J the map commutes with
        on_highest (Callable): image of each J-highest source element, or None

    Returns:
        List[Optional[int]]: target id (or None) for every source id

    Raises:
        CrystalStructureError: a lowering path cannot be replayed in target
    """
    images: List[Optional[int]] = []
    cache: Dict[int, Optional[int]] = {}
    for b in range(len(source)):
        u, path = raise_to_highest(source, b, colors)
        if u not in cache:
            cache[u] = on_highest(u)
        v = cache[u]
        images.append(None if v is None else lower_along(target, v, path))
    return images


def _attach_zero(graph: CrystalGraph, affine: AffineType, f0: Sequence[Optional[int]],
                 name: str) -> CrystalGraph:
    f_edges = {0: list(f0)}
    for i in graph.index_set:
        f_edges[i] = [graph.f(i, b) for b in range(len(graph))]
    return CrystalGraph(graph.keys, graph.weights, f_edges, affine.index_set, graph.ctype,
                        affine, graph.payloads, name)


def _classical_union(ct: ClassicalType, shapes: Sequence[Partition], budget: Optional[int],
                     name: str) -> CrystalGraph:
    limit = resolve_budget(budget)
    graphs = []
    total = 0
    for shape in shapes:
        g = build_classical(ct, shape, limit)
        total += len(g)
        if total > limit:
            raise BudgetExceeded(limit, name)
        graphs.append(g)
    return disjoint_union(graphs, name)


# ---------------------------------------------------------------------------
# Route a: promotion
# ---------------------------------------------------------------------------

def _promotion_table(graph: CrystalGraph, inverse: bool = False) -> List[int]:
    op = jdt_promotion_inverse if inverse else jdt_promotion
    return [graph.id_of(op(graph.payload(b)).serialize()) for b in range(len(graph))]


def _build_promotion(spec: KRSpec, budget: Optional[int]) -> KRCrystal:
    """Route a: f_0 = pr^-1 f_1 pr on the rectangle B(s^r)."""
    ct = spec.affine.classical
    classical = build_classical(ct, Partition((spec.s,) * spec.r), budget)
    pr = _promotion_table(classical)
    pr_inv = _promotion_table(classical, inverse=True)
    f0 = []
    for b in range(len(classical)):
        target = classical.f(1, pr[b])
        f0.append(None if target is None else pr_inv[target])
    return KRCrystal(spec, _attach_zero(classical, spec.affine, f0, str(spec)), "a")


def promotion_kr(kr: KRCrystal, b: int) -> int:
    """Promotion on a type-A KR crystal, as a map on element ids."""
    if kr.route != "a":
        raise KRSpecError(f"promotion is only defined for type A, not {kr.spec}")
    return kr.graph.id_of(jdt_promotion(kr.graph.payload(b)).serialize())


def promotion_kr_inverse(kr: KRCrystal, b: int) -> int:
    """Inverse of promotion_kr.

    Raises:
        KRSpecError: kr was not built by promotion
    """
    if kr.route != "a":
        raise KRSpecError(f"promotion is only defined for type A, not {kr.spec}")
    return kr.graph.id_of(jdt_promotion_inverse(kr.graph.payload(b)).serialize())


# ---------------------------------------------------------------------------
# Route b: sigma from frak-S
# ---------------------------------------------------------------------------

def sigma_on_crystal(graph: CrystalGraph, ct: ClassicalType, r: int, s: int) -> List[int]:
    """The involution sigma on a union of classical crystals B(lambda).

    On {2..n}-highest elements sigma is Phi o frak-S o Phi^-1; elsewhere it
    commutes with e_j, f_j for j >= 2.
    """
    colors = j_colors(ct)

    def on_highest(u: int) -> int:
        tableau = graph.payload(u)
        diagram = phi_inverse(ct, tableau, tableau.shape)
        image = phi(involution_frakS(diagram, r, s))
        key = image.serialize()
        if not graph.has_key(key):
            raise CrystalStructureError(f"sigma sends {tableau} outside the crystal ({image})")
        return graph.id_of(key)

    sigma = transport(graph, graph, colors, on_highest)
    for b, image in enumerate(sigma):
        if sigma[image] != b:
            raise CrystalStructureError(f"sigma is not an involution at {graph.key(b)}")
    return sigma


def _build_sigma(spec: KRSpec, budget: Optional[int]) -> KRCrystal:
    """Route b: f_0 = sigma f_1 sigma on the classical decomposition."""
    ct = spec.affine.classical
    shapes = decomposition_shapes(spec.affine, spec.r, spec.s)
    classical = _classical_union(ct, shapes, budget, str(spec))
    sigma = sigma_on_crystal(classical, ct, spec.r, spec.s)
    f0 = []
    for b in range(len(classical)):
        target = classical.f(1, sigma[b])
        f0.append(None if target is None else sigma[target])
    graph = _attach_zero(classical, spec.affine, f0, str(spec))
    return KRCrystal(spec, graph, "b", sigma=tuple(sigma))


# ---------------------------------------------------------------------------
# Routes c, d, e: virtual crystals inside A_{2n+1}^{(2)} / A_{2n-1}^{(2)}
# ---------------------------------------------------------------------------

def ambient_color_map(family: str, n: int) -> ColorMap:
    """Virtual colors of C_n^{(1)}, A_{2n}^{(2)}, D_{n+1}^{(2)} inside A_{2n+1}^{(2)}."""
    cmap: ColorMap = {0: ((0, 1), (1, 1))}
    for i in range(1, n + 1):
        if family == "C1" or (family == "D2" and i == n):
            power = 1
        else:
            power = 2
        cmap[i] = ((i + 1, power),)
    return cmap


def spin_color_map(n: int) -> ColorMap:
    """B_n^{(1)} inside A_{2n-1}^{(2)}: (m_i) = (2, ..., 2, 1)."""
    cmap: ColorMap = {i: ((i, 2),) for i in range(n)}
    cmap[n] = ((n, 1),)
    return cmap


def column_counts(shape: Partition, width: int) -> Dict[int, int]:
    """s_h: number of columns of height h, with s_0 = width - (number of columns)."""
    heights = shape.conjugate()
    counts = Counter(heights)
    counts[0] = width - len(heights)
    if counts[0] < 0:
        raise KRSpecError(f"{shape} is wider than {width}")
    return dict(counts)


def iota_columns(r: int, width: int, shape: Partition) -> List[Tuple[int, str]]:
    """Column data of the ambient {2..n+1}-highest element attached to shape.

    For h < r there are s_h/2 columns of inner height h carrying each of
    (-+, none) when r-h is even and (+, -) when r-h is odd; the s_r
    columns of height r carry no sign.
    """
    counts = column_counts(shape, width)
    columns: List[Tuple[int, str]] = []
    for h in range(r):
        count = counts.get(h, 0)
        if count % 2:
            raise KRSpecError(f"{shape}: odd number {count} of columns of height {h}")
        pair = (PAIR, NONE) if (r - h) % 2 == 0 else (PLUS, MINUS)
        for pattern in pair:
            columns.extend([(h, pattern)] * (count // 2))
    columns.extend([(r, NONE)] * counts.get(r, 0))
    if any(h > r for h in counts if counts[h]):
        raise KRSpecError(f"{shape} has columns taller than r={r}")
    return columns


def iota_highest(ambient: KRCrystal, r: int, width: int, shape: Partition) -> int:
    """Ambient id of the image of the I_0-highest element of weight `shape`.

    Args:
        ambient (KRCrystal): the A_{2n+1}^{(2)} crystal hosting the image
        r (int): node of the KR label
        width (int): s of the ambient crystal
        shape (Partition): already scaled by the virtual multiplier

    Returns:
        int: element id in ambient.graph

    Raises:
        KRSpecError: shape has an odd count of short columns
        CrystalStructureError: the tableau is missing from the ambient crystal
    """
    ct = ambient.spec.affine.classical
    diagram = from_columns(ct, iota_columns(r, width, shape))
    key = phi(diagram).serialize()
    if not ambient.graph.has_key(key):
        raise CrystalStructureError(f"iota({shape}) = {key} is not in {ambient.spec}")
    return ambient.graph.id_of(key)


def _build_virtual(spec: KRSpec, budget: Optional[int]) -> KRCrystal:
    """Routes c and d: generate the image inside A_{2n+1}^{(2)} B^{r,s} or B^{r,2s}."""
    n, r, s = spec.n, spec.r, spec.s
    shapes = decomposition_shapes(spec.affine, r, s)
    if spec.family == "C1":
        ambient = build_kr(KRSpec(AffineType("A2o", n + 1), r, s), budget)
        width, factor, route = s, 1, "c"
    else:
        ambient = build_kr(KRSpec(AffineType("A2o", n + 1), r, 2 * s), budget)
        width, factor, route = 2 * s, 2, "d"
    cmap = ambient_color_map(spec.family, n)
    seeds = []
    for shape in shapes:
        doubled = Partition(tuple(factor * p for p in shape.parts))
        seeds.append(iota_highest(ambient, r, width, doubled))
    graph = generate_virtual(ambient.graph, seeds, cmap, spec.affine.classical, spec.affine,
                             budget, str(spec))
    return KRCrystal(spec, graph, route, ambient=ambient, color_map=cmap)


def _build_spin_virtual(spec: KRSpec, budget: Optional[int]) -> KRCrystal:
    # route e: seeds are the ambient I_0-highest elements of doubled weight
    n, s = spec.n, spec.s
    ct = spec.affine.classical
    ambient = build_kr(KRSpec(AffineType("A2o", n), n, s), budget)
    by_weight = {}
    for b in ambient.graph.highest(ambient.graph.classical_index_set):
        by_weight[tuple(ambient.graph.weight(b))] = b
    seeds = []
    for shape in decomposition_shapes(spec.affine, n, s):
        want = scale_weight(shape.to_weight(ct), 2)
        if want not in by_weight:
            raise CrystalStructureError(f"{ambient.spec} has no I_0-highest element of weight {want}")
        seeds.append(by_weight[want])
    cmap = spin_color_map(n)
    graph = generate_virtual(ambient.graph, seeds, cmap, ct, spec.affine, budget, str(spec))
    return KRCrystal(spec, graph, "e", ambient=ambient, color_map=cmap)


def sigma_invariance(kr: KRCrystal) -> Dict:
    """How the ambient sigma acts on a route-c image: setwise and pointwise."""
    if kr.route != "c" or kr.ambient is None or kr.ambient.sigma is None:
        raise KRSpecError(f"{kr.spec} is not a virtual image inside a sigma crystal")
    ambient = kr.ambient.graph
    escaped, fixed = [], 0
    for b in range(len(kr.graph)):
        a = kr.graph.payload(b)
        image = kr.ambient.sigma[a]
        if image == a:
            fixed += 1
        if not kr.graph.has_key(ambient.key(image)):
            escaped.append(kr.graph.key(b))
    return {"size": len(kr.graph), "fixed": fixed, "escaped": escaped,
            "invariant": not escaped}


# ---------------------------------------------------------------------------
# Route f: exceptional nodes
# ---------------------------------------------------------------------------

def _check_triple(family: str, triple: Triple, s: int):
    l1, l2, l3 = triple
    if min(triple) < 0:
        raise CrystalStructureError(f"negative entry in triple {triple}")
    if family == "C1":
        if l1 + l2 + l3 != s:
            raise CrystalStructureError(f"C triple {triple} does not sum to s={s}")
    elif family == "D2":
        if l1 + l2 + l3 not in (s, s - 2):
            raise CrystalStructureError(f"D2 triple {triple} is inconsistent with s={s}")
    else:
        raise KRSpecError(f"triples are defined for C1 and D2, not {family}")


def triple_op(family: str, triple: Triple, s: int, direction: str) -> Optional[Triple]:
    """e_0 or f_0 on the triple (l1, l2, l3) of a {2..n}-highest element.

    Args:
        family (str): "C1" or "D2"
        triple (Triple): nonnegative, summing to s (C1) or to s or s-2 (D2)
        s (int): width of the KR crystal
        direction (str): "e" or "f"

    Returns:
        Optional[Triple]: the moved triple, None when the operator is zero

    Raises:
        CrystalStructureError: the input or result violates the sum rule
        KRSpecError: family has no triples
    """
    _check_triple(family, triple, s)
    l1, l2, l3 = triple
    result: Optional[Triple]
    if family == "C1":
        if direction == "e":
            result = (l1 - 1, l2 + 1, l3) if l1 > 0 else None
        else:
            result = (l1 + 1, l2 - 1, l3) if l2 > 0 else None
    else:
        short = l1 + l2 + l3 < s
        if direction == "e":
            if short:
                result = (l1, l2 + 2, l3)
            elif l1 > 1:
                result = (l1 - 2, l2, l3)
            elif l1 == 1:
                result = (0, l2 + 1, l3)
            else:
                result = None
        else:
            if short:
                result = (l1 + 2, l2, l3)
            elif l2 > 1:
                result = (l1, l2 - 2, l3)
            elif l2 == 1:
                result = (l1 + 1, 0, l3)
            else:
                result = None
    if result is not None:
        _check_triple(family, result, s)
    return result


def triple_of(diagram: PMDiagram) -> Triple:
    """Triple of a diagram whose columns all have height n."""
    tally = Counter(pattern for _, pattern in diagram.columns())
    if diagram.ct.letter == "C":
        return tally[PLUS], tally[MINUS], tally[PAIR]
    minus = tally[MINUS] - (1 if diagram.zero else 0)
    return (2 * tally[PLUS] + (1 if diagram.spin > 0 else 0),
            2 * minus + (1 if diagram.spin < 0 else 0),
            2 * tally[PAIR])


def diagram_of_triple(ct: ClassicalType, triple: Triple, s: int) -> PMDiagram:
    """The height-n diagram a triple encodes; inverse of triple_of.

    In type B the entries count columns twice, so l3 is even and at most one
    of l1, l2 is odd (the odd one carries the spin column).
    """
    n = ct.n
    l1, l2, l3 = triple
    if ct.letter != "C" and (l3 % 2 or (l1 % 2 and l2 % 2)):
        raise CrystalStructureError(f"triple {triple} encodes no diagram of {ct}")
    if ct.letter == "C":
        columns = [(n - 1, PLUS)] * l1 + [(n - 1, MINUS)] * l2 + [(n - 2, PAIR)] * l3
        return from_columns(ct, columns)
    zero = l1 + l2 + l3 < s
    spin = 1 if l1 % 2 else (-1 if l2 % 2 else 0)
    columns = ([(n - 1, PLUS)] * (l1 // 2) + [(n - 1, MINUS)] * (l2 // 2 + (1 if zero else 0))
               + [(n - 2, PAIR)] * (l3 // 2))
    return from_columns(ct, columns, zero, spin)


def exceptional_shape(spec: KRSpec) -> Partition:
    """The shape of B(s Lambda_r) at an exceptional node."""
    n, s = spec.n, spec.s
    letter = spec.affine.classical.letter
    if letter == "C":
        return Partition((s,) * n)
    sign = -1 if (spec.family == "D1" and spec.r == n - 1) else 1
    return Partition((s // 2,) * n, bool(s % 2), sign)


def _build_triple(spec: KRSpec, budget: Optional[int]) -> KRCrystal:
    """Route f for C_n^{(1)} and D_{n+1}^{(2)}: f_0 read off the triples of B(s Lambda_n)."""
    ct = spec.affine.classical
    outer = exceptional_shape(spec)
    classical = build_classical(ct, outer, budget)

    def f0_on_highest(u: int) -> Optional[int]:
        diagram = phi_inverse(ct, classical.payload(u), outer)
        moved = triple_op(spec.family, triple_of(diagram), spec.s, "f")
        if moved is None:
            return None
        return classical.id_of(phi(diagram_of_triple(ct, moved, spec.s)).serialize())

    f0 = transport(classical, classical, j_colors(ct), f0_on_highest)
    return KRCrystal(spec, _attach_zero(classical, spec.affine, f0, str(spec)), "f")


def _spin_lookup(source: CrystalGraph, target: CrystalGraph, colors) -> List[Optional[int]]:
    by_weight: Dict[Tuple, int] = {}
    for v in target.highest(colors):
        wt = tuple(target.weight(v))
        if wt in by_weight:
            raise CrystalStructureError(f"{target.name}: two J-highest elements of weight {wt}")
        by_weight[wt] = v

    def on_highest(u: int) -> int:
        wt = source.weight(u)
        flipped = (-wt[0],) + tuple(wt[1:])
        if flipped not in by_weight:
            raise CrystalStructureError(f"sigma: no partner for {source.key(u)} of weight {wt}")
        return by_weight[flipped]

    return transport(source, target, colors, on_highest)


def _build_spin_sigma(spec: KRSpec, budget: Optional[int]) -> KRCrystal:
    """Route f for D_n^{(1)} at n-1, n: f_0 = sigma f_1 sigma through the partner node."""
    ct = spec.affine.classical
    partner_spec = KRSpec(spec.affine, 2 * spec.n - 1 - spec.r, spec.s)
    own = build_classical(ct, exceptional_shape(spec), budget)
    partner = build_classical(ct, exceptional_shape(partner_spec), budget)
    colors = j_colors(ct)
    forward = _spin_lookup(own, partner, colors)
    backward = _spin_lookup(partner, own, colors)
    f0 = []
    for b in range(len(own)):
        target = partner.f(1, forward[b])
        f0.append(None if target is None else backward[target])
    graph = _attach_zero(own, spec.affine, f0, str(spec))
    return KRCrystal(spec, graph, "f", sigma=tuple(forward), partner=partner)


def sigma_spin(kr: KRCrystal, b: int) -> int:
    """sigma: B^{n,s} <-> B^{n-1,s} of D_n^{(1)}; the id lives in kr.partner."""
    if kr.partner is None or kr.sigma is None:
        raise KRSpecError(f"{kr.spec} is not a spin node of D_n^(1)")
    return kr.sigma[b]


# ---------------------------------------------------------------------------
# Build dispatch
# ---------------------------------------------------------------------------

_BUILDERS = {
    "a": _build_promotion,
    "b": _build_sigma,
    "c": _build_virtual,
    "d": _build_virtual,
    "e": _build_spin_virtual,
}

_MEMO: Dict[KRSpec, KRCrystal] = {}


def clear_memo():
    """Forget every built crystal (tests use this to force rebuilds)."""
    _MEMO.clear()


def build_kr(spec: KRSpec, budget: Optional[int] = None) -> KRCrystal:
    """Build B^{r,s} as an affine crystal.

    Args:
        spec: the KR label
        budget: element budget (see resolve_budget); applies to ambients too

    Returns:
        KRCrystal

    Raises:
        BudgetExceeded: some intermediate crystal is too large
        CrystalStructureError: a construction step broke an invariant
    """
    limit = resolve_budget(budget)
    if spec in _MEMO:
        kr = _MEMO[spec]
        if len(kr.graph) > limit:
            raise BudgetExceeded(limit, str(spec))
        return kr
    route = plan_route(spec)
    if route == "f":
        builder = _build_spin_sigma if spec.family == "D1" else _build_triple
    else:
        builder = _BUILDERS[route]
    kr = builder(spec, limit)
    _MEMO[spec] = kr
    log.info(f"✅ Built {spec}: {len(kr.graph)} elements (route {route}, {ROUTES[route]})")
    return kr


# ---------------------------------------------------------------------------
# Maps between KR crystals
# ---------------------------------------------------------------------------

def match_seeds(source: CrystalGraph, target: CrystalGraph,
                color_map: ColorMap) -> Tuple[Dict[int, int], List[str]]:
    """Pair each I_0-highest source element with the target elements that carry
    the same string data through the color map.

    Unique matches become seeds; ambiguous ones are left to path extension.
    """
    classical = source.classical_index_set
    colors = sorted({j for i in classical for j, _ in color_map[i]})
    pool = target.highest(colors)
    seeds: Dict[int, int] = {}
    notes: List[str] = []
    ambiguous: Dict[int, List[int]] = {}

    def agrees(b: int, c: int) -> bool:
        for i in source.index_set:
            for j, power in color_map[i]:
                if (target.epsilon(j, c) != power * source.epsilon(i, b)
                        or target.phi(j, c) != power * source.phi(i, b)):
                    return False
        return True

    for b in source.highest(classical):
        matches = [c for c in pool if agrees(b, c)]
        if not matches:
            raise MapExtensionError(f"no target element matches {source.key(b)}", source.key(b))
        if len(matches) == 1:
            seeds[b] = matches[0]
        else:
            ambiguous[b] = matches
    if ambiguous:
        notes.append(f"{len(ambiguous)} I_0-highest elements have several candidates")
        if not seeds:
            b, matches = min(ambiguous.items())
            seeds[b] = matches[0]
            notes.append(f"seeded {source.key(b)} with the first of {len(matches)} candidates")
    return seeds, notes


def _extend(source: CrystalGraph, target: CrystalGraph, color_map: ColorMap,
            kind: str) -> CrystalMap:
    seeds, notes = match_seeds(source, target, color_map)
    cmap = extend_map(source, target, seeds, color_map, kind)
    cmap.notes.extend(notes)
    if not cmap.is_total():
        raise MapExtensionError(
            f"{kind}: extension reached {len(cmap.assignment)} of {len(source)} elements")
    return cmap


def similarity_map(spec: KRSpec, m: int, budget: Optional[int] = None) -> CrystalMap:
    """S_m: B^{r,s} -> B^{r,ms} with every string scaled by m.

    Args:
        spec (KRSpec): the source label
        m (int): positive multiplier
        budget (int, optional): element budget for both crystals

    Returns:
        CrystalMap: total on the source, kind "similarity:<m>"

    Raises:
        KRSpecError: m < 1
        MapExtensionError: no consistent seed or the extension stalls
    """
    if m < 1:
        raise KRSpecError(f"multiplier must be positive, got {m}")
    source = build_kr(spec, budget).graph
    target = build_kr(spec.with_width(m * spec.s), budget).graph
    return _extend(source, target, multiplier_map({i: m for i in source.index_set}),
                   f"similarity:{m}")


@dataclass(frozen=True)
class Variation:
    source: str
    target: str
    multipliers: Optional[Callable[[int], List[int]]] = None
    colors: Optional[Callable[[int], ColorMap]] = None
    width: Callable[[int, int, int], int] = lambda r, n, s: s
    target_rank: Callable[[int], int] = lambda n: n
    target_nodes: Callable[[int, int], Tuple[int, ...]] = lambda r, n: (r,)
    r_not_n: bool = False


def _c(r: int, n: int) -> int:
    return 2 if r == n else 1


def _fold_c_into_a2o(n: int) -> ColorMap:
    cmap: ColorMap = {0: ((0, 1), (1, 1))}
    cmap.update({i: ((i + 1, 1),) for i in range(1, n + 1)})
    return cmap


def _fold_a2o_into_d(n: int) -> ColorMap:
    cmap: ColorMap = {i: ((i, 1),) for i in range(n)}
    cmap[n] = ((n, 1), (n + 1, 1))
    return cmap


def _fold_d2_into_a(n: int) -> ColorMap:
    cmap: ColorMap = {0: ((0, 1),), n: ((n, 1),)}
    cmap.update({i: ((i, 1), (2 * n - i, 1)) for i in range(1, n)})
    return cmap


VARIATIONS: Dict[str, Variation] = {
    "1-i": Variation("B1", "A2o", lambda n: [2] * n + [1],
                     width=lambda r, n, s: 2 * s // _c(r, n)),
    "1-ii": Variation("C1", "A2e", lambda n: [2] + [1] * n),
    "1-iii": Variation("C1", "D2", lambda n: [2] + [1] * (n - 1) + [2],
                       width=lambda r, n, s: _c(r, n) * s),
    "1-iv": Variation("A2e", "C1", lambda n: [1] + [2] * n,
                      width=lambda r, n, s: 2 * s, r_not_n=True),
    "1-v": Variation("A2e", "D2", lambda n: [1] * n + [2], r_not_n=True),
    "1-vi": Variation("A2o", "B1", lambda n: [1] * n + [2]),
    "1-vii": Variation("D2", "C1", lambda n: [1] + [2] * (n - 1) + [1],
                       width=lambda r, n, s: 2 * s // _c(r, n)),
    "1-viii": Variation("D2", "A2e", lambda n: [2] * n + [1],
                        width=lambda r, n, s: 2 * s // _c(r, n)),
    "2-i": Variation("C1", "A2o", colors=_fold_c_into_a2o, target_rank=lambda n: n + 1,
                     r_not_n=True),
    "2-ii": Variation("A2o", "D1", colors=_fold_a2o_into_d, target_rank=lambda n: n + 1,
                      target_nodes=lambda r, n: (r,) if r != n else (n, n + 1)),
    "2-iii": Variation("D2", "A1", colors=_fold_d2_into_a, target_rank=lambda n: 2 * n,
                       target_nodes=lambda r, n: (r, 2 * n - r) if r != n else (n,)),
}


def variation_target(kind: str, spec: KRSpec) -> List[KRSpec]:
    """The KR labels whose tensor product is the target of a variation.

    Args:
        kind (str): a key of VARIATIONS, e.g. "1-ii"
        spec (KRSpec): the source label

    Returns:
        List[KRSpec]: one label, or two for the foldings that split node r

    Raises:
        KRSpecError: unknown kind, wrong source family, or r = n where excluded
    """
    if kind not in VARIATIONS:
        raise KRSpecError(f"unknown variation kind {kind!r}; known: {sorted(VARIATIONS)}")
    var = VARIATIONS[kind]
    if spec.family != var.source:
        raise KRSpecError(f"variation {kind} starts from {var.source}, not {spec.family}")
    if var.r_not_n and spec.r == spec.n:
        raise KRSpecError(f"variation {kind} needs r != n")
    target_type = AffineType(var.target, var.target_rank(spec.n))
    width = var.width(spec.r, spec.n, spec.s)
    return [KRSpec(target_type, node, width) for node in var.target_nodes(spec.r, spec.n)]


def variation_map(kind: str, spec: KRSpec, budget: Optional[int] = None) -> CrystalMap:
    """The injective map of a multiplier (1-*) or folding (2-*) variation.

    Args:
        kind (str): a key of VARIATIONS
        spec (KRSpec): the source label
        budget (int, optional): element budget for source and target

    Returns:
        CrystalMap: kind "variation:<kind>", with the target recorded in notes
    """
    targets = variation_target(kind, spec)
    var = VARIATIONS[kind]
    source = build_kr(spec, budget).graph
    target = build_kr(targets[0], budget).graph
    for extra in targets[1:]:
        target = tensor(target, build_kr(extra, budget).graph, budget)
    if var.multipliers is not None:
        cmap = multiplier_map(dict(enumerate(var.multipliers(spec.n))))
    else:
        cmap = var.colors(spec.n)
    result = _extend(source, target, cmap, f"variation:{kind}")
    result.notes.append(f"target {' ⊗ '.join(str(t) for t in targets)}")
    return result
