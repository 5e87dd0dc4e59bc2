#!/usr/bin/env python3
"""
Generic finite crystal machinery.

A CrystalGraph is an immutable, canonically numbered set of elements with
weights and f_i edges for every color i. Everything else in the toolkit
(classical tableau crystals, KR crystals, virtual images, tensor products)
is produced through `generate` or `tensor` and consumed through the query
methods below.
"""

import logging
import os
from collections import deque
from dataclasses import dataclass, field
from typing import Callable, Dict, Hashable, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
from networkx.algorithms import isomorphism

import config
from cartan import (AffineType, ClassicalType, Partition, Weight, add_weights, affine_pairing,
                    classical_pairing, simple_root, weight_from_pairings)
from errors import (BudgetExceeded, CrystalStructureError, KRSpecError, MapExtensionError,
                    VirtualCrystalError)

logging.basicConfig(level=logging.INFO, format="[%(levelname)s] %(message)s")
log = logging.getLogger(__name__)

TENSOR_SEP = "⊗"

# source color -> ((target color, power), ...)
ColorMap = Dict[int, Tuple[Tuple[int, int], ...]]


def resolve_budget(budget: Optional[int] = None) -> int:
    """Element budget: explicit argument, then KRKIT_BUDGET, then config."""
    if budget is not None:
        return int(budget)
    env_value = os.getenv(config.BUDGET_ENV_VAR)
    if env_value:
        try:
            return int(env_value)
        except ValueError:
            log.warning(f"⚠️ Ignoring non-integer {config.BUDGET_ENV_VAR}={env_value!r}")
    return config.ELEMENT_BUDGET


def multiplier_map(multipliers: Dict[int, int]) -> ColorMap:
    return {i: ((i, m),) for i, m in multipliers.items()}


class CrystalGraph:
    """A finite seminormal crystal with canonically ordered element ids."""

    def __init__(self, keys: Sequence[str], weights: Sequence[Weight],
                 f_edges: Dict[int, Sequence[Optional[int]]], index_set: Sequence[int],
                 ctype: Optional[ClassicalType] = None, affine: Optional[AffineType] = None,
                 payloads: Optional[Sequence] = None, name: str = ""):
        self.keys = tuple(keys)
        self.weights = tuple(weights)
        self.index_set = tuple(index_set)
        self.ctype = ctype
        self.affine = affine
        self.payloads = tuple(payloads) if payloads is not None else None
        self.name = name
        self._index = {k: n for n, k in enumerate(self.keys)}
        if len(self._index) != len(self.keys):
            raise CrystalStructureError(f"{name}: duplicate element keys")
        self._f = {i: tuple(f_edges.get(i, [None] * len(self.keys))) for i in self.index_set}
        self._e = {}
        for i in self.index_set:
            inverse: List[Optional[int]] = [None] * len(self.keys)
            for b, target in enumerate(self._f[i]):
                if target is not None:
                    if inverse[target] is not None:
                        raise CrystalStructureError(
                            f"{name}: f_{i} is not injective at {self.keys[target]}")
                    inverse[target] = b
            self._e[i] = tuple(inverse)
        self._eps: Dict[int, Tuple[int, ...]] = {}
        self._phi: Dict[int, Tuple[int, ...]] = {}

    def __len__(self) -> int:
        return len(self.keys)

    def __repr__(self) -> str:
        return f"CrystalGraph({self.name or 'anonymous'}, {len(self)} elements, I={self.index_set})"

    @property
    def classical_index_set(self) -> Tuple[int, ...]:
        return tuple(i for i in self.index_set if i != 0) if self.affine else self.index_set

    def id_of(self, key: str) -> int:
        return self._index[key]

    def has_key(self, key: str) -> bool:
        return key in self._index

    def key(self, b: int) -> str:
        return self.keys[b]

    def weight(self, b: int) -> Weight:
        return self.weights[b]

    def payload(self, b: int):
        return self.payloads[b] if self.payloads is not None else None

    def f(self, i: int, b: int) -> Optional[int]:
        return self._f[i][b]

    def e(self, i: int, b: int) -> Optional[int]:
        return self._e[i][b]

    def f_power(self, i: int, b: Optional[int], k: int) -> Optional[int]:
        for _ in range(k):
            if b is None:
                return None
            b = self._f[i][b]
        return b

    def e_power(self, i: int, b: Optional[int], k: int) -> Optional[int]:
        for _ in range(k):
            if b is None:
                return None
            b = self._e[i][b]
        return b

    def _string_data(self, i: int):
        if i in self._eps:
            return
        eps = [0] * len(self)
        phi = [0] * len(self)
        for start in range(len(self)):
            if self._e[i][start] is not None:
                continue
            chain = [start]
            nxt = self._f[i][start]
            while nxt is not None:
                if len(chain) > len(self):
                    raise CrystalStructureError(f"{self.name}: f_{i} string does not terminate")
                chain.append(nxt)
                nxt = self._f[i][nxt]
            for pos, b in enumerate(chain):
                eps[b] = pos
                phi[b] = len(chain) - 1 - pos
        self._eps[i] = tuple(eps)
        self._phi[i] = tuple(phi)

    def epsilon(self, i: int, b: int) -> int:
        self._string_data(i)
        return self._eps[i][b]

    def phi(self, i: int, b: int) -> int:
        self._string_data(i)
        return self._phi[i][b]

    def edges(self, colors: Optional[Iterable[int]] = None):
        """Yield (source, target, color) for every f-edge."""
        for i in (self.index_set if colors is None else colors):
            for b, target in enumerate(self._f[i]):
                if target is not None:
                    yield b, target, i

    def highest(self, colors: Optional[Iterable[int]] = None) -> List[int]:
        colors = tuple(self.index_set if colors is None else colors)
        return [b for b in range(len(self)) if all(self._e[j][b] is None for j in colors)]

    def lowest(self, colors: Optional[Iterable[int]] = None) -> List[int]:
        colors = tuple(self.index_set if colors is None else colors)
        return [b for b in range(len(self)) if all(self._f[j][b] is None for j in colors)]

    def to_networkx(self, colors: Optional[Iterable[int]] = None) -> nx.MultiDiGraph:
        graph = nx.MultiDiGraph()
        graph.add_nodes_from(range(len(self)))
        for source, target, color in self.edges(colors):
            graph.add_edge(source, target, color=color)
        return graph

    def restrict(self, colors: Iterable[int]) -> List[List[int]]:
        """Connected components of the subgraph on the given colors."""
        colors = tuple(colors)
        graph = nx.Graph()
        graph.add_nodes_from(range(len(self)))
        graph.add_edges_from((s, t) for s, t, _ in self.edges(colors))
        components = [sorted(c) for c in nx.connected_components(graph)]
        return sorted(components, key=lambda c: c[0])

    def is_connected(self) -> bool:
        if len(self) == 0:
            return False
        return nx.is_weakly_connected(self.to_networkx())

    def subgraph(self, members: Iterable[int], name: str = "") -> "CrystalGraph":
        """The crystal on a union of components (members must be closed under all colors)."""
        members = sorted(set(members))
        relabel = {b: k for k, b in enumerate(members)}
        f_edges = {}
        for i in self.index_set:
            row = []
            for b in members:
                target = self._f[i][b]
                if target is not None and target not in relabel:
                    raise CrystalStructureError(f"{self.name}: subset not closed under f_{i}")
                row.append(relabel.get(target) if target is not None else None)
            f_edges[i] = row
        payloads = [self.payloads[b] for b in members] if self.payloads is not None else None
        return CrystalGraph([self.keys[b] for b in members], [self.weights[b] for b in members],
                            f_edges, self.index_set, self.ctype, self.affine, payloads,
                            name or self.name)


def disjoint_union(graphs: Sequence[CrystalGraph], name: str = "") -> CrystalGraph:
    """Union of crystals with pairwise distinct keys, renumbered canonically."""
    if not graphs:
        raise CrystalStructureError("disjoint_union needs at least one crystal")
    index_set = graphs[0].index_set
    entries = []
    for g in graphs:
        if g.index_set != index_set:
            raise CrystalStructureError("disjoint_union: index sets differ")
        for b in range(len(g)):
            entries.append((g.key(b), g, b))
    entries.sort(key=lambda t: t[0])
    position = {(id(g), b): n for n, (_, g, b) in enumerate(entries)}
    f_edges = {i: [None] * len(entries) for i in index_set}
    for n, (_, g, b) in enumerate(entries):
        for i in index_set:
            target = g.f(i, b)
            if target is not None:
                f_edges[i][n] = position[(id(g), target)]
    payloads = None
    if all(g.payloads is not None for g in graphs):
        payloads = [g.payload(b) for _, g, b in entries]
    return CrystalGraph([k for k, _, _ in entries], [g.weight(b) for _, g, b in entries],
                        f_edges, index_set, graphs[0].ctype, graphs[0].affine, payloads, name)


def generate(seeds: Iterable[Hashable], oracle: Callable[[Hashable, int, str], Optional[Hashable]],
             index_set: Sequence[int], key: Callable[[Hashable], str],
             weight: Callable[[Hashable], Weight], ctype: Optional[ClassicalType] = None,
             affine: Optional[AffineType] = None, budget: Optional[int] = None,
             name: str = "") -> CrystalGraph:
    """Close a seed set under every e_i and f_i.

    Args:
        seeds: initial elements (any hashable payload)
        oracle: oracle(x, i, "e" | "f") -> element or None
        index_set: colors to close under
        key: canonical serialization of an element
        weight: classical weight of an element
        budget: maximum number of elements (see resolve_budget)

    Returns:
        CrystalGraph whose ids follow the sorted keys
    """
    budget = resolve_budget(budget)
    found: Dict[str, Hashable] = {}
    queue = deque()
    for seed in seeds:
        k = key(seed)
        if k not in found:
            found[k] = seed
            queue.append(k)
    f_from_f: Dict[Tuple[str, int], str] = {}
    f_from_e: Dict[Tuple[str, int], str] = {}
    while queue:
        k = queue.popleft()
        x = found[k]
        for i in index_set:
            for direction in ("f", "e"):
                y = oracle(x, i, direction)
                if y is None:
                    continue
                ky = key(y)
                if direction == "f":
                    f_from_f[(k, i)] = ky
                else:
                    f_from_e[(ky, i)] = k
                if ky not in found:
                    found[ky] = y
                    queue.append(ky)
                    if len(found) > budget:
                        raise BudgetExceeded(budget, name or "generation")
    if f_from_f != f_from_e:
        bad = sorted(set(f_from_f.items()) ^ set(f_from_e.items()))[0]
        raise CrystalStructureError(
            f"{name}: e_{bad[0][1]} and f_{bad[0][1]} are not inverse near {bad[0][0]}")
    keys = sorted(found)
    position = {k: n for n, k in enumerate(keys)}
    f_edges = {i: [None] * len(keys) for i in index_set}
    for (k, i), target in f_from_f.items():
        f_edges[i][position[k]] = position[target]
    log.debug(f"generated {name or 'crystal'}: {len(keys)} elements")
    return CrystalGraph(keys, [weight(found[k]) for k in keys], f_edges, index_set, ctype,
                        affine, [found[k] for k in keys], name)


def tensor(left: CrystalGraph, right: CrystalGraph, budget: Optional[int] = None,
           name: str = "") -> CrystalGraph:
    """Tensor product left ⊗ right.

    f_i acts on the left factor iff phi_i(left) > eps_i(right); e_i acts on
    the left factor iff phi_i(left) >= eps_i(right).

    Raises:
        CrystalStructureError: the factors have different index sets
        BudgetExceeded: len(left) * len(right) is over the budget
    """
    if left.index_set != right.index_set:
        raise CrystalStructureError(
            f"tensor: index sets differ ({left.index_set} vs {right.index_set})")
    budget = resolve_budget(budget)
    if len(left) * len(right) > budget:
        raise BudgetExceeded(budget, name or "tensor product")
    pairs = sorted(((a, b) for a in range(len(left)) for b in range(len(right))),
                   key=lambda p: left.key(p[0]) + TENSOR_SEP + right.key(p[1]))
    position = {p: n for n, p in enumerate(pairs)}
    f_edges = {}
    for i in left.index_set:
        row = []
        for a, b in pairs:
            if left.phi(i, a) > right.epsilon(i, b):
                row.append(position[(left.f(i, a), b)])
            else:
                target = right.f(i, b)
                row.append(position[(a, target)] if target is not None else None)
        f_edges[i] = row
    keys = [left.key(a) + TENSOR_SEP + right.key(b) for a, b in pairs]
    weights = [add_weights(left.weight(a), right.weight(b)) for a, b in pairs]
    return CrystalGraph(keys, weights, f_edges, left.index_set, left.ctype, left.affine,
                        pairs, name or f"{left.name}{TENSOR_SEP}{right.name}")


def tensor_all(factors: Sequence[CrystalGraph], budget: Optional[int] = None) -> CrystalGraph:
    result = factors[0]
    for factor in factors[1:]:
        result = tensor(result, factor, budget)
    return result


def singleton(index_set: Sequence[int], ctype: ClassicalType,
              affine: Optional[AffineType] = None) -> CrystalGraph:
    """The trivial one-element crystal."""
    zero = tuple(0 for _ in range(ctype.n))
    return CrystalGraph(["u"], [zero], {i: [None] for i in index_set}, index_set, ctype,
                        affine, name="trivial")


def weyl_reflection(graph: CrystalGraph, i: int, b: int) -> int:
    """Simple reflection S_i of the Weyl group action."""
    pairing = graph.phi(i, b) - graph.epsilon(i, b)
    if pairing >= 0:
        return graph.f_power(i, b, pairing)
    return graph.e_power(i, b, -pairing)


def classical_decomposition(graph: CrystalGraph) -> List[Partition]:
    """Highest weights of the I_0-components, as shapes."""
    if graph.ctype is None:
        raise CrystalStructureError("classical_decomposition needs a classical type")
    shapes = []
    for b in graph.highest(graph.classical_index_set):
        try:
            shapes.append(Partition.from_weight(graph.ctype, graph.weight(b)))
        except KRSpecError as exc:
            raise CrystalStructureError(
                f"{graph.name}: I_0-highest element {graph.key(b)} has non-dominant weight") from exc
    return sorted(shapes)


def structure_violations(graph: CrystalGraph, limit: int = 20) -> List[str]:
    """Weight and pairing consistency of every edge and element."""
    problems: List[str] = []
    ct = graph.ctype
    for b in range(len(graph)):
        for i in graph.index_set:
            if ct is None:
                break
            if i == 0:
                if graph.affine is None:
                    continue
                expected = affine_pairing(graph.affine, 0, graph.weight(b))
            else:
                expected = classical_pairing(ct, i, graph.weight(b))
            if graph.phi(i, b) - graph.epsilon(i, b) != expected:
                problems.append(f"{graph.key(b)}: phi_{i}-eps_{i} != <h_{i},wt>")
            target = graph.f(i, b)
            if target is not None and i != 0:
                lowered = tuple(w - a for w, a in zip(graph.weight(b), simple_root(ct, i)))
                if ct.letter == "A":
                    shift = lowered[-1]
                    lowered = tuple(c - shift for c in lowered)
                if tuple(graph.weight(target)) != lowered:
                    problems.append(f"{graph.key(b)}: wt(f_{i} b) != wt(b) - alpha_{i}")
            if len(problems) >= limit:
                return problems
    return problems


def isomorphic(first: CrystalGraph, second: CrystalGraph,
               colors: Optional[Iterable[int]] = None) -> bool:
    """Colored-digraph isomorphism on the given colors."""
    if len(first) != len(second):
        return False
    colors = tuple(first.index_set if colors is None else colors)
    matcher = isomorphism.categorical_multiedge_match("color", None)
    return nx.is_isomorphic(first.to_networkx(colors), second.to_networkx(colors),
                            edge_match=matcher)


# ---------------------------------------------------------------------------
# Crystal maps
# ---------------------------------------------------------------------------

@dataclass
class CrystalMap:
    """An injective map between crystals intertwining operators per a color map."""

    source: CrystalGraph
    target: CrystalGraph
    assignment: Dict[int, int]
    color_map: ColorMap
    kind: str = "similarity"
    verified: bool = False
    notes: List[str] = field(default_factory=list)

    @property
    def multipliers(self) -> Optional[Dict[int, int]]:
        if all(len(v) == 1 and v[0][0] == i for i, v in self.color_map.items()):
            return {i: v[0][1] for i, v in self.color_map.items()}
        return None

    def __call__(self, b: int) -> int:
        return self.assignment[b]

    def is_total(self) -> bool:
        return len(self.assignment) == len(self.source)


def apply_mapped(graph: CrystalGraph, b: Optional[int], images: Tuple[Tuple[int, int], ...],
                 direction: str) -> Optional[int]:
    """Apply prod_j op_j^{m_j} in the target for one source color."""
    for j, power in images:
        if b is None:
            return None
        b = graph.f_power(j, b, power) if direction == "f" else graph.e_power(j, b, power)
    return b


def extend_map(source: CrystalGraph, target: CrystalGraph, seeds: Dict[int, int],
               color_map: ColorMap, kind: str = "similarity") -> CrystalMap:
    """Extend seed assignments along every e_i/f_i path.

    Raises:
        MapExtensionError: on inconsistency, non-injectivity or a string mismatch
    """
    for i in source.index_set:
        if i not in color_map:
            raise MapExtensionError(f"color {i} has no image in the color map", color=i)
    assignment: Dict[int, int] = {}
    used: Dict[int, int] = {}
    queue = deque()

    def claim(b: int, image: int, color=None):
        if b in assignment:
            if assignment[b] != image:
                raise MapExtensionError(
                    f"two paths give different images for {source.key(b)}", source.key(b), color)
            return
        if image in used:
            raise MapExtensionError(
                f"{source.key(b)} and {source.key(used[image])} share the image {target.key(image)}",
                source.key(b), color)
        assignment[b] = image
        used[image] = b
        queue.append(b)

    for b, image in seeds.items():
        claim(b, image)
    while queue:
        b = queue.popleft()
        image = assignment[b]
        for i in source.index_set:
            for j, power in color_map[i]:
                if (target.epsilon(j, image) != power * source.epsilon(i, b)
                        or target.phi(j, image) != power * source.phi(i, b)):
                    raise MapExtensionError(
                        f"string lengths at {source.key(b)} do not scale by {power} "
                        f"(color {i} -> {j})", source.key(b), i)
            for direction in ("f", "e"):
                nxt = source.f(i, b) if direction == "f" else source.e(i, b)
                mapped = apply_mapped(target, image, color_map[i], direction)
                if nxt is None:
                    continue
                if mapped is None:
                    raise MapExtensionError(
                        f"target string too short at {source.key(b)} (color {i})", source.key(b), i)
                claim(nxt, mapped, i)
    return CrystalMap(source, target, assignment, color_map, kind,
                      verified=len(assignment) == len(source))


def morphism_check(source: CrystalGraph, b1: int, target: CrystalGraph, b2: int,
                   multipliers: Dict[int, int]) -> CrystalMap:
    """Extend b1 -> b2 to a map with S(f_i b) = f_i^{m_i} S(b)."""
    return extend_map(source, target, {b1: b2}, multiplier_map(multipliers))


# ---------------------------------------------------------------------------
# Virtual crystals
# ---------------------------------------------------------------------------

def virtual_string_data(ambient: CrystalGraph, b: int, color_map: ColorMap) -> Dict[int, Tuple[int, int]]:
    """(eps_i, phi_i) of an ambient element read as a virtual element.

    Raises:
        VirtualCrystalError: if some ambient string length is not divisible by
            its power or the colors of one group disagree
    """
    data = {}
    for i, images in color_map.items():
        values = set()
        for j, power in images:
            eps, phi = ambient.epsilon(j, b), ambient.phi(j, b)
            if eps % power or phi % power:
                raise VirtualCrystalError(
                    f"{ambient.key(b)}: eps/phi of color {j} not divisible by {power}")
            values.add((eps // power, phi // power))
        if len(values) != 1:
            raise VirtualCrystalError(f"{ambient.key(b)}: colors {images} disagree for virtual color {i}")
        data[i] = values.pop()
    return data


def generate_virtual(ambient: CrystalGraph, seeds: Iterable[int], color_map: ColorMap,
                     ctype: ClassicalType, affine: Optional[AffineType] = None,
                     budget: Optional[int] = None, name: str = "") -> CrystalGraph:
    """Generate the virtual crystal inside an ambient crystal.

    Args:
        ambient: the ambient crystal
        seeds: ambient element ids
        color_map: virtual color -> ambient (color, power) sequence
        ctype: classical type of the virtual crystal

    Returns:
        CrystalGraph keyed by ambient keys, payload = ambient id
    """
    index_set = tuple(sorted(color_map))
    classical = tuple(i for i in index_set if i != 0) if affine else index_set

    def oracle(b: int, i: int, direction: str) -> Optional[int]:
        return apply_mapped(ambient, b, color_map[i], direction)

    def weight(b: int) -> Weight:
        data = virtual_string_data(ambient, b, color_map)
        return weight_from_pairings(ctype, {i: data[i][1] - data[i][0] for i in classical})

    graph = generate(seeds, oracle, index_set, key=ambient.key, weight=weight, ctype=ctype,
                     affine=affine, budget=budget, name=name)
    for b in range(len(graph)):
        data = virtual_string_data(ambient, graph.payload(b), color_map)
        for i in index_set:
            if (graph.epsilon(i, b), graph.phi(i, b)) != data[i]:
                raise VirtualCrystalError(
                    f"{graph.key(b)}: virtual string of color {i} leaves the image")
    return graph
