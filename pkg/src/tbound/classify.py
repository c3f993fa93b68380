"""Exceptional divisors meeting the chain divisor once, and the graphs they build.

For each E_i with E_i.C = 1 the subgraph G_Ei (curves of E_i plus every chain
it touches) is matched against nine templates.  The maximal ones become edges
and loops of a multigraph on the chains.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterator, Sequence

import networkx as nx

from .dualgraph import Configuration, Contraction, ExceptionalDivisor, id_key, pairing, reduced_chain_divisor

BUILDER_TYPES = ("T.2.1", "T.2.2")
ALL_TYPES = ("T.2.1", "T.2.2", "T.2.3", "T.2.4", "T.2.5", "T.3.1", "T.3.2", "C.1", "C.2")


class ClassificationError(RuntimeError):
    """A unit divisor matched no template or more than one."""


@dataclass
class UnitAnalysis:
    products: dict[int, int]
    outside: dict[int, int]
    units: list[int]
    maximal: list[int]
    s_counts: dict[int, int]
    prop42_failures: list[str] = field(default_factory=list)

    @property
    def z(self) -> int:
        return len(self.units)


def analyse_units(config: Configuration, divisors: Sequence[ExceptionalDivisor]) -> UnitAnalysis:
    """E_i.C for all i, the unit ones, the maximal units and the s_h counts.

    For a unit E_i also checks E_i.(C outside E_i) = 2, E_i.(C inside E_i) = -1
    and that G_Ei has no multiple edges.
    """
    chain = reduced_chain_divisor(config)
    products, outside, s_counts = {}, {}, {}
    failures = []
    for e in divisors:
        inside = {c: 1 for c in chain if c in e.support}
        out = {c: 1 for c in chain if c not in e.support}
        p_out = int(pairing(config, e.coefficients, out))
        p_in = int(pairing(config, e.coefficients, inside))
        products[e.index] = p_out + p_in
        outside[e.index] = p_out
        s_counts[p_out] = s_counts.get(p_out, 0) + 1
        if p_out + p_in == 1:
            if p_out != 2 or p_in != -1:
                failures.append(f"E{e.index}: outside {p_out}, inside {p_in}")
            graph = ei_graph(config, e)
            if not graph.simple:
                failures.append(f"E{e.index}: G_E has a multiple edge")
    units = [e.index for e in divisors if products[e.index] == 1]
    by_index = {e.index: e for e in divisors}
    maximal = [
        i for i in units
        if not any(j != i and by_index[i].support < by_index[j].support for j in units)
    ]
    return UnitAnalysis(products, outside, units, maximal, s_counts, failures)


@dataclass(frozen=True)
class EiGraph:
    """G_Ei: boxes are chain curves in E_i, circles are other curves of E_i."""

    index: int
    chains: tuple[int, ...]
    words: dict[int, tuple[int, ...]]
    boxes: dict[int, frozenset[int]]
    circles: tuple[str, ...]
    circle_self: dict[str, int]
    circle_chain_nbrs: dict[str, tuple[tuple[int, int, int], ...]]
    circle_circle_nbrs: dict[str, tuple[str, ...]]
    simple: bool


def ei_graph(config: Configuration, e: ExceptionalDivisor) -> EiGraph:
    support = e.support
    pos = {c: (k, j) for k, ids in enumerate(config.tchains) for j, c in enumerate(ids)}
    touched = set()
    for c in support:
        if c in pos:
            touched.add(pos[c][0])
        for other in config.neighbors(c):
            if other in pos:
                touched.add(pos[other][0])
    chains = tuple(sorted(touched))
    vertices = set(support) | {c for k in chains for c in config.tchains[k]}
    simple = all(w == 1 for (a, b), w in config.edges.items() if a in vertices and b in vertices)
    boxes = {k: frozenset(j for j, c in enumerate(config.tchains[k]) if c in support) for k in chains}
    words = {k: config.chain_data[k].chain for k in chains}
    circles = tuple(sorted((c for c in support if c not in pos), key=id_key))
    chain_nbrs, circle_nbrs = {}, {}
    for c in circles:
        nb = config.neighbors(c)
        chain_nbrs[c] = tuple(sorted((pos[o][0], pos[o][1], w) for o, w in nb.items() if o in pos))
        circle_nbrs[c] = tuple(sorted(o for o in nb if o in support and o not in pos))
    return EiGraph(e.index, chains, words, boxes, circles,
                   {c: config.curves[c].self_int for c in circles}, chain_nbrs, circle_nbrs, simple)


@dataclass(frozen=True)
class EiType:
    """A classified unit divisor.

    ``chains`` lists chain indices by role: (A, B) for two-chain types with B
    the chain carrying the loop or the (-2)-boxes of T.2.1, (A, B, C) for the
    three-chain types with B fully inside E_i, and (A,) for single-chain types.
    """

    kind: str
    params: tuple[int, ...]
    chains: tuple[int, ...]
    circles: tuple[str, ...]
    meets_two_ends: bool = False

    @property
    def edges(self) -> list[tuple[int, int, int]]:
        k, p, ch = self.kind, self.params, self.chains
        if k == "T.2.1":
            return [(ch[0], ch[1], p[0])]
        if k == "T.2.2":
            return [(ch[0], ch[1], p[0] + p[1])]
        if k == "T.2.3":
            return [(ch[0], ch[1], p[0])]
        if k == "T.2.4":
            return [(ch[0], ch[1], 1)]
        if k == "T.2.5":
            return [(ch[0], ch[1], 3)]
        if k == "T.3.1":
            return [(ch[0], ch[1], p[0]), (ch[2], ch[1], p[1])]
        if k == "T.3.2":
            return [(ch[0], ch[1], p[0]), (ch[2], ch[1], p[0] + p[1] - 1)]
        return []

    @property
    def loop(self) -> tuple[int, int] | None:
        k, p, ch = self.kind, self.params, self.chains
        if k in ("T.2.3", "T.2.4", "T.3.1", "T.3.2"):
            return ch[1], 1
        if k == "T.2.5":
            return ch[1], 2
        if k == "C.1":
            return ch[0], p[0]
        if k == "C.2":
            return ch[0], 1
        return None

    @property
    def weight(self) -> int:
        loop = self.loop
        return sum(w for _a, _b, w in self.edges) + (loop[1] if loop else 0)

    def label(self) -> str:
        return f"{self.kind}({', '.join(map(str, self.params))})" if self.params else self.kind


def _segments(word: tuple[int, ...], boxes: frozenset[int]) -> list[tuple[int, int, int]]:
    """Ways the boxes form a proper end segment: (size, chain end, innermost box)."""
    r = len(word)
    m = len(boxes)
    if m == 0 or m == r:
        return []
    out = []
    if boxes == frozenset(range(m)):
        out.append((m, 0, m - 1))
    if boxes == frozenset(range(r - m, r)):
        out.append((m, r - 1, r - m))
    return out


def _all_twos(word, boxes) -> bool:
    return all(word[j] == 2 for j in boxes)


def _single_circle(g: EiGraph) -> tuple[str, tuple[tuple[int, int, int], ...]] | None:
    if len(g.circles) != 1:
        return None
    f = g.circles[0]
    if g.circle_self[f] != -1 or g.circle_circle_nbrs[f]:
        return None
    nbrs = g.circle_chain_nbrs[f]
    if len(nbrs) != 2 or any(w != 1 for _k, _j, w in nbrs):
        return None
    return f, nbrs


def _two_chain(g: EiGraph) -> Iterator[tuple[str, tuple[int, int], tuple[int, int]]]:
    """Yield (F, (chain, pos), (chain, pos)) in both role orders."""
    if len(g.chains) != 2:
        return
    got = _single_circle(g)
    if got is None:
        return
    f, ((k1, j1, _), (k2, j2, _)) = got
    if k1 == k2:
        return
    yield f, (k1, j1), (k2, j2)
    yield f, (k2, j2), (k1, j1)


def _match_t21(g: EiGraph) -> Iterator[EiType]:
    for f, (ka, x), (kb, y) in _two_chain(g):
        if g.boxes[ka] or x in g.boxes[ka]:
            continue
        for m, end, _inner in _segments(g.words[kb], g.boxes[kb]):
            if y == end and _all_twos(g.words[kb], g.boxes[kb]):
                yield EiType("T.2.1", (m,), (ka, kb), (f,), x in (0, len(g.words[ka]) - 1))


def _match_t22(g: EiGraph) -> Iterator[EiType]:
    for f, (ka, x), (kb, y) in _two_chain(g):
        if ka > kb:
            continue
        for m, end_a, _ in _segments(g.words[ka], g.boxes[ka]):
            for n, end_b, _ in _segments(g.words[kb], g.boxes[kb]):
                if x == end_a and y == end_b:
                    yield EiType("T.2.2", (m, n), (ka, kb), (f,), True)


def _match_t23(g: EiGraph) -> Iterator[EiType]:
    for f, (ka, x), (kb, y) in _two_chain(g):
        word_a, word_b = g.words[ka], g.words[kb]
        m = len(g.boxes[ka])
        if m == len(word_a) or not _all_twos(word_a, g.boxes[ka]):
            continue
        if m == 0:
            a_ok = True
        else:
            a_ok = any(x == end for _s, end, _i in _segments(word_a, g.boxes[ka]))
        if not a_ok:
            continue
        for size, _end, inner in _segments(word_b, g.boxes[kb]):
            rest = g.boxes[kb] - {inner}
            if size >= 2 and y == inner and word_b[inner] == m + 2 and _all_twos(word_b, rest):
                yield EiType("T.2.3", (m, size - 1), (ka, kb), (f,))


def _match_t24(g: EiGraph) -> Iterator[EiType]:
    for f, (ka, x), (kb, y) in _two_chain(g):
        if g.words[kb] != (4,) or g.boxes[kb] != {0}:
            continue
        for size, _end, inner in _segments(g.words[ka], g.boxes[ka]):
            if size == 2 and x == inner and _all_twos(g.words[ka], g.boxes[ka]):
                yield EiType("T.2.4", (), (ka, kb), (f,))


def _match_t25(g: EiGraph) -> Iterator[EiType]:
    for f, (ka, x), (kb, y) in _two_chain(g):
        if g.words[kb] not in ((2, 5, 3), (3, 5, 2)) or len(g.boxes[kb]) != 3 or y != 1:
            continue
        for size, end, _inner in _segments(g.words[ka], g.boxes[ka]):
            if size == 3 and x == end and _all_twos(g.words[ka], g.boxes[ka]):
                yield EiType("T.2.5", (), (ka, kb), (f,))


def _three_chain(g: EiGraph) -> Iterator[tuple[int, tuple[str, int, int, int], tuple[str, int, int, int]]]:
    """Yield (B, (F1, A, a, b1), (F2, C, c, b2)): F meets position a of A and b of B."""
    if len(g.chains) != 3 or len(g.circles) != 2:
        return
    info = {}
    for f in g.circles:
        nbrs = g.circle_chain_nbrs[f]
        if g.circle_self[f] != -1 or g.circle_circle_nbrs[f] or len(nbrs) != 2:
            return
        if any(w != 1 for *_x, w in nbrs) or nbrs[0][0] == nbrs[1][0]:
            return
        info[f] = nbrs
    full = [k for k in g.chains if len(g.boxes[k]) == len(g.words[k])]
    if len(full) != 1:
        return
    kb = full[0]
    f1, f2 = g.circles
    for first, second in ((f1, f2), (f2, f1)):
        legs = []
        for f in (first, second):
            on_b = [j for k, j, _w in info[f] if k == kb]
            other = [(k, j) for k, j, _w in info[f] if k != kb]
            if len(on_b) != 1 or len(other) != 1:
                break
            legs.append((f, other[0][0], other[0][1], on_b[0]))
        else:
            if legs[0][1] != legs[1][1]:
                yield kb, legs[0], legs[1]


def _leg_boxes(g: EiGraph, k: int, x: int) -> int | None:
    """Size of the (-2) end segment of chain k if F meets its chain end."""
    for size, end, _inner in _segments(g.words[k], g.boxes[k]):
        if x == end and _all_twos(g.words[k], g.boxes[k]):
            return size
    return None


def _match_t31(g: EiGraph) -> Iterator[EiType]:
    for kb, (f1, ka, xa, ya), (f2, kc, xc, yc) in _three_chain(g):
        m, n = _leg_boxes(g, ka, xa), _leg_boxes(g, kc, xc)
        if m is None or n is None or ka > kc:
            continue
        word = g.words[kb]
        for big in (0, len(word) - 1):
            oriented = word if big == 0 else word[::-1]
            if ya == yc == big and oriented == (m + n + 3,) + (2,) * (m + n - 1):
                yield EiType("T.3.1", (m, n), (ka, kb, kc), (f1, f2))


def _match_t32(g: EiGraph) -> Iterator[EiType]:
    for kb, (f1, ka, xa, ya), (f2, kc, xc, yc) in _three_chain(g):
        m, n = _leg_boxes(g, ka, xa), _leg_boxes(g, kc, xc)
        if m is None or n is None or m < 2:
            continue
        word = g.words[kb]
        r = len(word)
        target = (n + 2,) + (2,) * (m - 2) + (m + 3,) + (2,) * n
        for flip in (False, True):
            oriented = word[::-1] if flip else word
            at = (lambda j: r - 1 - j) if flip else (lambda j: j)
            if oriented == target and yc == at(0) and ya == at(m - 1):
                yield EiType("T.3.2", (m, n), (ka, kb, kc), (f1, f2))


def _match_single(g: EiGraph) -> Iterator[EiType]:
    if len(g.chains) != 1:
        return
    got = _single_circle(g)
    if got is None:
        return
    f, ((k1, j1, _), (k2, j2, _)) = got
    k = g.chains[0]
    word, boxes = g.words[k], g.boxes[k]
    if not _all_twos(word, boxes):
        return
    for x, y in ((j1, j2), (j2, j1)):
        if x in boxes:
            continue
        for m, end, inner in _segments(word, boxes):
            # with a single box the end and the innermost box coincide; that case is C.2
            if y == end and m >= 2:
                yield EiType("C.1", (m,), (k,), (f,))
            if y == inner:
                yield EiType("C.2", (m,), (k,), (f,))


MATCHERS = (_match_t21, _match_t22, _match_t23, _match_t24, _match_t25,
            _match_t31, _match_t32, _match_single)


def classify_graph(g: EiGraph) -> EiType | None:
    found = {t for matcher in MATCHERS for t in matcher(g)}
    if len(found) > 1:
        raise ClassificationError(f"E{g.index} matches several templates: {sorted(t.label() for t in found)}")
    return found.pop() if found else None


def classify_ei(config: Configuration, e: ExceptionalDivisor) -> EiType | None:
    """Template of a unit divisor, or None when G_Ei matches none of them."""
    return classify_graph(ei_graph(config, e))


@dataclass(frozen=True)
class DecoratedEdge:
    u: int
    v: int
    weight: int
    source: int
    kind: str


@dataclass
class DecoratedGraph:
    vertex_count: int
    edges: list[DecoratedEdge]
    loops: list[DecoratedEdge]
    types: dict[int, EiType]

    def multigraph(self) -> nx.MultiGraph:
        g = nx.MultiGraph()
        g.add_nodes_from(range(self.vertex_count))
        for e in self.edges + self.loops:
            g.add_edge(e.u, e.v, weight=e.weight, source=e.source, kind=e.kind)
        return g


def decorated_graph(config: Configuration, divisors: Sequence[ExceptionalDivisor],
                    units: UnitAnalysis) -> DecoratedGraph:
    """One vertex per chain; edges and loops from the maximal unit divisors.

    Raises ClassificationError when a maximal divisor matches no template or
    when its weight differs from the number of unit divisors it contains.
    """
    by_index = {e.index: e for e in divisors}
    edges, loops, types = [], [], {}
    for i in units.maximal:
        t = classify_ei(config, by_index[i])
        if t is None:
            raise ClassificationError(f"maximal E{i} matches no template")
        inside = sum(1 for j in units.units if by_index[j].support <= by_index[i].support)
        if inside != t.weight:
            raise ClassificationError(f"E{i} is {t.label()} of weight {t.weight} but contains {inside} unit divisors")
        types[i] = t
        for u, v, w in t.edges:
            edges.append(DecoratedEdge(u, v, w, i, t.kind))
        if t.loop:
            loops.append(DecoratedEdge(t.loop[0], t.loop[0], t.loop[1], i, t.kind))
    return DecoratedGraph(len(config.tchains), edges, loops, types)


@dataclass(frozen=True)
class ComponentShape:
    vertices: tuple[int, ...]
    shape: str
    loop_kind: str | None
    size: int
    effective_size: int
    f_value: Fraction
    rd: int
    z: int
    problems: tuple[str, ...] = ()


F_BY_LOOP = {"T.2.3": 1, "T.3.1": 1, "T.3.2": 1, "C.2": 1, "T.2.4": 2, "T.2.5": 3, "C.1": 0}


def component_shapes(config: Configuration, graph: DecoratedGraph) -> list[ComponentShape]:
    """Split the decorated graph into components and name each shape."""
    mg = graph.multigraph()
    out = []
    for comp in sorted(nx.connected_components(mg), key=min):
        verts = tuple(sorted(comp))
        edges = [e for e in graph.edges if e.u in comp]
        loops = [e for e in graph.loops if e.u in comp]
        problems = []
        loop_kind = None
        if not loops and len(edges) == len(verts) - 1:
            shape = "G1"
        elif not loops and len(edges) == len(verts):
            shape = "G2"
        elif len(loops) == 1 and len(edges) == len(verts) - 1:
            shape = "G3"
            loop_kind = loops[0].kind
        else:
            shape = "other"
            problems.append(f"{len(edges)} edges and {len(loops)} loops on {len(verts)} vertices")
        special = {e.source for e in edges + loops if e.kind not in BUILDER_TYPES}
        if shape in ("G1", "G2") and special:
            problems.append("non-builder divisor in a loop-free component")
        if shape == "G3" and special != {loops[0].source}:
            problems.append("more than one non-builder divisor")
        size = len(verts)
        if shape == "G2" or (shape == "G3" and loop_kind == "C.1"):
            eff = 2 * size
        else:
            eff = size
        if shape == "G2":
            f_value = Fraction(1, 2)
        elif shape == "G3":
            f_value = Fraction(F_BY_LOOP[loop_kind])
        else:
            f_value = Fraction(0)
        rd = sum(config.chain_data[k].r_minus_d for k in verts)
        z = sum(e.weight for e in edges + loops)
        out.append(ComponentShape(verts, shape, loop_kind, size, eff, f_value, rd, z, tuple(problems)))
    return out


@dataclass
class Classification:
    units: UnitAnalysis
    graph: DecoratedGraph
    components: list[ComponentShape]


def classify_contraction(result: Contraction) -> Classification:
    units = analyse_units(result.config_x, result.divisors)
    graph = decorated_graph(result.config_x, result.divisors, units)
    return Classification(units, graph, component_shapes(result.config_x, graph))
