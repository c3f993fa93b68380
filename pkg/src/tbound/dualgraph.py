"""Weighted dual graphs of curve configurations and the blow-down engine.

A configuration lives on a smooth projective surface X.  Every curve carries
its self-intersection, its canonical degree K.C and a count of nodes; edges
carry intersection numbers.  Contracting (-1)-curves produces the minimal
model S, and the contraction log is replayed backwards to recover the total
transforms E_i of the blown-up points.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Iterable, Mapping, Sequence

import networkx as nx

from .cfrac import validate_chain
from .tchain import TChainData, is_t_chain


class InputError(ValueError):
    """The configuration is malformed."""


class EngineDefect(AssertionError):
    """An identity that must hold by construction failed."""


def id_key(curve_id: str) -> tuple:
    """Natural ordering of ids, so that T2.1 < T10.1."""
    return tuple(int(p) if i % 2 else p for i, p in enumerate(re.split(r"(\d+)", curve_id)))


def chain_curve_id(k: int, j: int) -> str:
    return f"T{k}.{j}"


def edge_key(a: str, b: str) -> tuple[str, str]:
    return (a, b) if id_key(a) <= id_key(b) else (b, a)


@dataclass(frozen=True)
class Curve:
    id: str
    self_int: int
    k_degree: int
    node_count: int = 0

    @property
    def is_contractible(self) -> bool:
        return self.self_int == -1 and self.k_degree == -1 and self.node_count == 0


@dataclass(frozen=True)
class Configuration:
    """Curves, their intersections and the T-chains they contain.

    ``tchains`` lists chain curve ids on X; after blow-downs some of them may be
    gone.  Treat instances as immutable.
    """

    curves: dict[str, Curve]
    edges: dict[tuple[str, str], int]
    tchains: tuple[tuple[str, ...], ...]
    chain_data: tuple[TChainData, ...]
    ks2: int
    ks_nef: bool = True
    ambient: Mapping[str, Any] | None = None

    def weight(self, a: str, b: str) -> int:
        return self.edges.get(edge_key(a, b), 0)

    def neighbors(self, curve_id: str) -> dict[str, int]:
        out = {}
        for (a, b), w in self.edges.items():
            if a == curve_id:
                out[b] = w
            elif b == curve_id:
                out[a] = w
        return out

    def intersection(self, a: str, b: str) -> int:
        return self.curves[a].self_int if a == b else self.weight(a, b)

    @property
    def chain_curve_ids(self) -> frozenset[str]:
        return frozenset(c for chain in self.tchains for c in chain)

    def chain_position(self, curve_id: str) -> tuple[int, int] | None:
        """(chain index, position), both 0-based, or None for curves outside C."""
        for k, chain in enumerate(self.tchains):
            if curve_id in chain:
                return k, chain.index(curve_id)
        return None

    def discrepancy(self, curve_id: str) -> Fraction:
        pos = self.chain_position(curve_id)
        if pos is None:
            return Fraction(0)
        return self.chain_data[pos[0]].discrepancies[pos[1]]

    def sorted_ids(self) -> list[str]:
        return sorted(self.curves, key=id_key)


def build_configuration(
    ks2: int,
    tchains: Sequence[Sequence[int]],
    extra_curves: Iterable[tuple[str, int]] = (),
    edges: Iterable[tuple[str, str, int]] = (),
    ks_nef: bool = True,
    ambient: Mapping[str, Any] | None = None,
) -> Configuration:
    """Assemble a configuration on X.

    Chain curves get ids T{k}.{j} (1-based) and consecutive ones meet once;
    every curve is smooth rational, so K.C = -2 - C^2.
    """
    curves: dict[str, Curve] = {}
    chain_ids = []
    data = []
    edge_map: dict[tuple[str, str], int] = {}
    for k, word in enumerate(tchains, start=1):
        try:
            word = validate_chain(word)
        except ValueError as exc:
            raise InputError(str(exc)) from None
        info = is_t_chain(word)
        if info is None:
            raise InputError(f"chain {k} {list(word)} is not a T-chain")
        ids = tuple(chain_curve_id(k, j) for j in range(1, len(word) + 1))
        for cid, b in zip(ids, word):
            curves[cid] = Curve(cid, -b, b - 2)
        for a, b in zip(ids, ids[1:]):
            edge_map[edge_key(a, b)] = 1
        chain_ids.append(ids)
        data.append(info)
    internal = set(edge_map)
    for cid, self_int in extra_curves:
        if cid in curves:
            raise InputError(f"duplicate curve id {cid!r}")
        if re.fullmatch(r"T\d+\.\d+", cid):
            raise InputError(f"id {cid!r} is reserved for chain curves")
        curves[cid] = Curve(cid, int(self_int), -2 - int(self_int))
    for a, b, w in edges:
        w = int(w)
        for c in (a, b):
            if c not in curves:
                raise InputError(f"edge mentions unknown curve {c!r}")
        if a == b:
            raise InputError(f"self-edge on {a!r}; use node counts instead")
        if w < 1:
            raise InputError(f"edge {a}-{b} has weight {w} < 1")
        key = edge_key(a, b)
        if key in internal:
            if w != 1:
                raise InputError(f"consecutive chain curves {a}, {b} must meet once")
            continue
        if key in edge_map and edge_map[key] != w:
            raise InputError(f"edge {a}-{b} listed with weights {edge_map[key]} and {w}")
        edge_map[key] = w
    return Configuration(curves, edge_map, tuple(chain_ids), tuple(data), int(ks2), bool(ks_nef), ambient)


@dataclass
class ValidationReport:
    ok: bool
    errors: list[str] = field(default_factory=list)


def validate_config(config: Configuration) -> ValidationReport:
    """Check the invariants of a configuration on X."""
    errors = []
    for c in config.curves.values():
        if c.node_count != 0 or c.k_degree != -2 - c.self_int:
            errors.append(f"{c.id} is not a smooth rational curve")
    for (a, b), w in config.edges.items():
        if a == b or w < 1:
            errors.append(f"bad edge {a}-{b} weight {w}")
        if a not in config.curves or b not in config.curves:
            errors.append(f"edge {a}-{b} mentions an unknown curve")
    seen = set()
    for k, (ids, info) in enumerate(zip(config.tchains, config.chain_data)):
        if len(ids) != len(info.chain):
            errors.append(f"chain {k + 1} length mismatch")
            continue
        for j, cid in enumerate(ids):
            if cid in seen:
                errors.append(f"{cid} lies on two chains")
            seen.add(cid)
            if cid not in config.curves:
                errors.append(f"chain curve {cid} missing")
            elif config.curves[cid].self_int != -info.chain[j]:
                errors.append(f"{cid} self-intersection disagrees with chain word")
        for j in range(len(ids) - 1):
            if config.weight(ids[j], ids[j + 1]) != 1:
                errors.append(f"consecutive curves {ids[j]}, {ids[j + 1]} do not meet once")
    chain_of = {cid: k for k, ids in enumerate(config.tchains) for cid in ids}
    for (a, b), w in config.edges.items():
        if a in chain_of and b in chain_of:
            ka, kb = chain_of[a], chain_of[b]
            if ka != kb:
                errors.append(f"chains {ka + 1} and {kb + 1} meet at {a}-{b}")
            elif abs(config.tchains[ka].index(a) - config.tchains[ka].index(b)) != 1:
                errors.append(f"non-consecutive chain curves {a}, {b} meet")
    return ValidationReport(not errors, errors)


@dataclass(frozen=True)
class ContractionStep:
    """The contracted curve and its neighbours (with weights) just before contraction."""

    curve: str
    neighbors: tuple[tuple[str, int], ...]


def _contract_once(curves: dict[str, Curve], adj: dict[str, dict[str, int]], f: str) -> ContractionStep:
    nbrs = adj.pop(f)
    step = ContractionStep(f, tuple(sorted(nbrs.items(), key=lambda kv: id_key(kv[0]))))
    del curves[f]
    for a, t in nbrs.items():
        del adj[a][f]
        c = curves[a]
        curves[a] = Curve(a, c.self_int + t * t, c.k_degree - t, c.node_count + t * (t - 1) // 2)
    items = list(nbrs.items())
    for i, (a, ta) in enumerate(items):
        for b, tb in items[i + 1:]:
            adj[a][b] = adj[a].get(b, 0) + ta * tb
            adj[b][a] = adj[a][b]
    return step


def _adjacency(config: Configuration) -> dict[str, dict[str, int]]:
    adj: dict[str, dict[str, int]] = {c: {} for c in config.curves}
    for (a, b), w in config.edges.items():
        adj[a][b] = w
        adj[b][a] = w
    return adj


def _rebuild(config: Configuration, curves: dict[str, Curve], adj: dict[str, dict[str, int]]) -> Configuration:
    edges = {edge_key(a, b): w for a, nb in adj.items() for b, w in nb.items() if w}
    return replace(config, curves=curves, edges=edges)


def blow_down_at(config: Configuration, curve_id: str) -> tuple[Configuration, ContractionStep]:
    """Contract one smooth rational (-1)-curve."""
    if curve_id not in config.curves:
        raise InputError(f"unknown curve {curve_id!r}")
    if not config.curves[curve_id].is_contractible:
        raise InputError(f"{curve_id} is not a smooth rational (-1)-curve")
    curves = dict(config.curves)
    adj = _adjacency(config)
    step = _contract_once(curves, adj, curve_id)
    return _rebuild(config, curves, adj), step


def contract_to_minimal(config: Configuration) -> tuple[Configuration, int, tuple[ContractionStep, ...]]:
    """Contract (-1)-curves, lowest id first, until none is left."""
    curves = dict(config.curves)
    adj = _adjacency(config)
    log = []
    while True:
        ready = [c for c in curves.values() if c.is_contractible]
        if not ready:
            break
        f = min(ready, key=lambda c: id_key(c.id)).id
        log.append(_contract_once(curves, adj, f))
    return _rebuild(config, curves, adj), len(log), tuple(log)


@dataclass(frozen=True)
class ExceptionalDivisor:
    """Total transform on X of the exceptional curve of one blow-up."""

    index: int
    root: str
    coefficients: dict[str, int]

    @property
    def support(self) -> frozenset[str]:
        return frozenset(self.coefficients)


def exceptional_divisors(log: Sequence[ContractionStep]) -> list[ExceptionalDivisor]:
    """Replay the log backwards; E_1 belongs to the last contracted curve."""
    divs: list[dict[str, int]] = []
    roots = []
    for step in reversed(log):
        for coeffs in divs:
            mult = sum(t * coeffs.get(a, 0) for a, t in step.neighbors)
            if mult:
                coeffs[step.curve] = mult
        divs.append({step.curve: 1})
        roots.append(step.curve)
    return [ExceptionalDivisor(i + 1, root, coeffs) for i, (root, coeffs) in enumerate(zip(roots, divs))]


Divisor = Mapping[str, int | Fraction]


def pairing(config: Configuration, d1: Divisor, d2: Divisor) -> int | Fraction:
    total: int | Fraction = 0
    for a, ca in d1.items():
        if not ca:
            continue
        for b, cb in d2.items():
            if cb:
                total += ca * cb * config.intersection(a, b)
    return total


def reduced_chain_divisor(config: Configuration) -> dict[str, int]:
    return {c: 1 for c in config.chain_curve_ids}


def check_divisor_pairings(config: Configuration, divisors: Sequence[ExceptionalDivisor]) -> list[str]:
    """E_i^2 = -1 and E_i.E_j = 0; returns the failures."""
    bad = []
    for i, e in enumerate(divisors):
        for f in divisors[i:]:
            want = -1 if e is f else 0
            got = pairing(config, e.coefficients, f.coefficients)
            if got != want:
                bad.append(f"E{e.index}.E{f.index} = {got}, expected {want}")
    return bad


def check_component_pairings(config: Configuration, divisors: Sequence[ExceptionalDivisor]) -> list[str]:
    """E_i.A is 0 or -1 for every component A of E_i, and -1 at most once."""
    bad = []
    for e in divisors:
        negative = 0
        for a in sorted(e.support, key=id_key):
            value = pairing(config, e.coefficients, {a: 1})
            if value not in (0, -1):
                bad.append(f"E{e.index}.{a} = {value}")
            negative += value == -1
        if negative > 1:
            bad.append(f"E{e.index} is negative on {negative} components")
    return bad


@dataclass(frozen=True)
class CanonicalInvariants:
    m: int
    ks2: int
    kx2: int
    kw2_blowdown: int
    kw2_pairing: Fraction
    lam: int
    sum_rd: int
    sum_ei_dot_c: int

    @property
    def delta_k(self) -> int:
        """K_W^2 - K_S^2."""
        return self.kw2_blowdown - self.ks2


@dataclass(frozen=True)
class Contraction:
    """Everything the blow-down produces for one configuration."""

    config_x: Configuration
    config_s: Configuration
    log: tuple[ContractionStep, ...]
    divisors: tuple[ExceptionalDivisor, ...]
    invariants: CanonicalInvariants


def canonical_invariants(config: Configuration, config_s: Configuration, log: Sequence[ContractionStep],
                         divisors: Sequence[ExceptionalDivisor]) -> CanonicalInvariants:
    """Compute K^2 bookkeeping two ways and raise EngineDefect if they disagree."""
    m = len(log)
    kx2 = config.ks2 - m
    kw2_blowdown = kx2 + sum(d.r_minus_d + 1 for d in config.chain_data)
    kw2_pairing = Fraction(kx2)
    for ids, info in zip(config.tchains, config.chain_data):
        for cid, delta in zip(ids, info.discrepancies):
            kw2_pairing -= delta * config.curves[cid].k_degree
    if kw2_pairing != kw2_blowdown:
        raise EngineDefect(f"K_W^2 routes disagree: {kw2_blowdown} vs {kw2_pairing}")
    lam = sum(config_s.curves[c].k_degree for c in config.chain_curve_ids if c in config_s.curves)
    chain = reduced_chain_divisor(config)
    ei_c = sum(pairing(config, e.coefficients, chain) for e in divisors)
    sum_rd = sum(d.r_minus_d for d in config.chain_data)
    expected = sum_rd + 2 * len(config.chain_data) - lam
    if ei_c != expected:
        raise EngineDefect(f"sum of E_i.C is {ei_c}, expected {expected}")
    return CanonicalInvariants(m, config.ks2, kx2, kw2_blowdown, kw2_pairing, lam, sum_rd, int(ei_c))


def contract(config: Configuration) -> Contraction:
    """Contract to the minimal model and check every engine identity."""
    config_s, _m, log = contract_to_minimal(config)
    divisors = exceptional_divisors(log)
    bad = check_divisor_pairings(config, divisors) + check_component_pairings(config, divisors)
    if bad:
        raise EngineDefect("; ".join(bad))
    inv = canonical_invariants(config, config_s, log, divisors)
    return Contraction(config, config_s, log, tuple(divisors), inv)


@dataclass
class ScreenReport:
    passed: bool
    values: dict[str, Fraction]
    failures: list[str]


def ampleness_screen(config: Configuration) -> ScreenReport:
    """Gamma.K_X - sum delta (C.Gamma) > 0 for every curve Gamma outside C."""
    chain_ids = config.chain_curve_ids
    values = {}
    failures = []
    for cid in config.sorted_ids():
        if cid in chain_ids:
            continue
        curve = config.curves[cid]
        value = Fraction(curve.k_degree)
        for other, w in config.neighbors(cid).items():
            if other in chain_ids:
                value -= config.discrepancy(other) * w
        values[cid] = value
        if value <= 0:
            failures.append(f"{cid} (self-intersection {curve.self_int}) has value {value}")
    return ScreenReport(not failures, values, failures)


def is_realizable(config: Configuration, log: Sequence[ContractionStep]) -> bool:
    """Whether the contraction log looks like a chain of point blow-ups.

    At every step the contracted curve may meet at most two curves that are
    contracted later, each transversally once.
    """
    later: set[str] = set()
    for step in reversed(log):
        hits = [w for a, w in step.neighbors if a in later]
        if len(hits) > 2 or any(w != 1 for w in hits):
            return False
        later.add(step.curve)
    return True


def _outcome_graph(config: Configuration) -> nx.Graph:
    chain_ids = config.chain_curve_ids
    g = nx.Graph()
    for c in config.curves.values():
        g.add_node(c.id, label=(c.self_int, c.k_degree, c.node_count, c.id in chain_ids))
    for (a, b), w in config.edges.items():
        g.add_edge(a, b, weight=w)
    return g


def contraction_outcomes(config: Configuration, max_states: int = 100_000) -> list[tuple[int, Configuration]]:
    """Final states over all maximal contraction orders, one per isomorphism class.

    States are keyed by the set of contracted curves, so orders reaching the
    same set are explored once.
    """
    outcomes: list[tuple[int, Configuration, nx.Graph]] = []
    seen: set[frozenset[str]] = set()
    stack = [(frozenset(), config)]
    node_match = nx.algorithms.isomorphism.categorical_node_match("label", None)
    edge_match = nx.algorithms.isomorphism.numerical_edge_match("weight", 0)
    while stack:
        done, state = stack.pop()
        if done in seen:
            continue
        seen.add(done)
        if len(seen) > max_states:
            raise EngineDefect(f"more than {max_states} contraction states")
        ready = [c.id for c in state.curves.values() if c.is_contractible]
        if not ready:
            g = _outcome_graph(state)
            if not any(m == len(done) and nx.is_isomorphic(g, h, node_match=node_match, edge_match=edge_match)
                       for m, _s, h in outcomes):
                outcomes.append((len(done), state, g))
            continue
        for f in sorted(ready, key=id_key, reverse=True):
            stack.append((done | {f}, blow_down_at(state, f)[0]))
    return [(m, s) for m, s, _g in outcomes]


def order_sensitivity(config: Configuration) -> list[str]:
    """Empty when every maximal contraction order gives the same m and image."""
    outcomes = contraction_outcomes(config)
    if len(outcomes) <= 1:
        return []
    return [f"order-dependent outcome: m = {m}, {len(s.curves)} curves left" for m, s in outcomes]
