"""Search harness: the optimal family, forward blow-up histories and exhaustive scans."""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Iterator, Sequence

from .bounds import BoundReport, global_report
from .classify import ClassificationError, EiGraph, analyse_units, classify_contraction, classify_ei, classify_graph, ei_graph
from .configfile import config_to_dict
from .dualgraph import (
    Configuration,
    Curve,
    EngineDefect,
    ampleness_screen,
    build_configuration,
    chain_curve_id,
    contract,
    contract_to_minimal,
    edge_key,
    id_key,
    is_realizable,
    contraction_outcomes,
    validate_config,
)
from .tchain import TChainData, enumerate_t_chains, require_t_chain

MAX_OPTIMAL = 40


# ---------------------------------------------------------------- optimal family

def optimal_chain(n: int, i: int) -> tuple[int, ...]:
    """The i-th chain (1-based) of the optimal family with parameter n."""
    middle = (5,) if i == 1 else (3 + i,) + (2,) * (i - 2) + (3,)
    return (2,) * n + (3, n + 3) + middle + (2,) * n + (3, n + 2)


@dataclass(frozen=True)
class OptimalExample:
    n: int
    l: int
    config: Configuration
    report: BoundReport
    mismatches: tuple[str, ...] = ()

    @property
    def ratio(self) -> Fraction:
        """(R-D) / (4l dk - 2l lambda), which tends to 1 as n grows."""
        r = self.report
        return Fraction(r.R - r.D, 4 * self.l * (r.kw2 - r.ks2) - 2 * self.l * r.lam)


def optimal_closed_forms(n: int, l: int) -> dict[str, Any]:
    half = Fraction(1, 2)
    return {
        "chains": [
            {"index": 6 * n + 5 + 8 * i * n + 8 * i + 2 * n * n + 2 * i * n * n,
             "a": 3 + 2 * i * n + 5 * i, "r": 4 + i + 2 * n, "d": 1}
            for i in range(1, l + 1)
        ],
        "R_minus_D": 2 * l * n + half * l * l + Fraction(7, 2) * l,
        "Z": n * (2 * l - 1) + half * l * l + Fraction(5, 2) * l - 3,
        "lambda": n + l + 3,
        "kw2_minus_ks2": n + l + 3,
        "edge_weights": [2 * n + 3 + i for i in range(1, l)],
        "loop_weight": n,
    }


def build_optimal_config(n: int, l: int) -> Configuration:
    if not (1 <= n <= MAX_OPTIMAL and 1 <= l <= MAX_OPTIMAL):
        raise ValueError(f"n and l must lie in 1..{MAX_OPTIMAL}")
    chains = [optimal_chain(n, i) for i in range(1, l + 1)]
    # F0 meets the (-n-3)-curve and the (-2)-end of the first chain; link i
    # joins the (-n-2)-end of chain i to the (-2)-end of chain i+1
    extra = [("F0", -1)] + [(f"F{i}", -1) for i in range(1, l)]
    edges = [("F0", chain_curve_id(1, n + 2), 1), ("F0", chain_curve_id(1, 1), 1)]
    for i in range(1, l):
        edges += [(f"F{i}", chain_curve_id(i, len(chains[i - 1])), 1), (f"F{i}", chain_curve_id(i + 1, 1), 1)]
    return build_configuration(0, chains, extra, edges, ks_nef=True)


def build_optimal_example(n: int, l: int) -> OptimalExample:
    """Build the optimal configuration and assert every closed form on it.

    K_S^2 is set to 0; only differences with K_S^2 enter the closed forms.
    """
    config = build_optimal_config(n, l)
    report = global_report(config)
    forms = optimal_closed_forms(n, l)
    problems = []
    mismatches = []
    for i, (data, want) in enumerate(zip(config.chain_data, forms["chains"]), start=1):
        got = {"index": data.n, "r": data.length, "d": data.d}
        if got != {k: want[k] for k in got}:
            problems.append(f"chain {data.chain}: {got} != {want}")
        # a depends on orientation (a or index - a); read from the (-n-2)-end
        # it is 3 + 2n + 2in + 5i, which the stated form misses by 2n
        observed_a = data.n - data.a
        if observed_a != 3 + 2 * n + 2 * i * n + 5 * i:
            problems.append(f"chain {data.chain}: a = {observed_a}")
        if want["a"] not in (data.a, data.n - data.a):
            mismatches.append(f"chain {i}: a is {data.a} or {data.n - data.a}, closed form gives {want['a']}")
    observed = {"R_minus_D": report.R - report.D, "Z": report.Z, "lambda": report.lam,
                "kw2_minus_ks2": report.kw2 - report.ks2}
    for key, value in observed.items():
        if value != forms[key]:
            problems.append(f"{key} = {value}, closed form {forms[key]}")
    graph = classify_contraction(report.contraction).graph
    weights = sorted(e.weight for e in graph.edges)
    if weights != forms["edge_weights"]:
        problems.append(f"edge weights {weights} != {forms['edge_weights']}")
    loops = [(e.u, e.weight) for e in graph.loops]
    if loops != [(0, n)]:
        problems.append(f"loops {loops}, expected one of weight {n} on the first chain")
    if not report.check("r-d bound").tight:
        problems.append("r-d bound not tight")
    if problems:
        raise EngineDefect(f"optimal example n={n} l={l}: " + "; ".join(problems))
    return OptimalExample(n, l, config, report, tuple(mismatches))


# ---------------------------------------------------------------- limits

@dataclass(frozen=True)
class ScanLimits:
    """Bounds for generators and scans.

    ``max_chains`` and ``max_minus_one`` bound the number of T-chains and of
    (-1)-curves in the classification scan.
    """

    max_curves: int = 12
    max_chain_len: int = 7
    max_abs_self_int: int = 9
    max_blowups: int = 10
    seed: int = 0
    max_chains: int = 3
    max_minus_one: int = 3

    def __post_init__(self) -> None:
        for name in ("max_curves", "max_chain_len", "max_abs_self_int", "max_chains", "max_minus_one"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be positive")
        if self.max_blowups < 0:
            raise ValueError("max_blowups must be nonnegative")
        if self.max_abs_self_int < 2:
            raise ValueError("max_abs_self_int must be at least 2")


def chain_catalog(max_len: int, max_entry: int) -> list[TChainData]:
    """T-chains up to the limits, one orientation each."""
    return [d for d in enumerate_t_chains(max_len, max_entry) if d.chain <= d.chain[::-1]]


# ---------------------------------------------------------------- forward histories

@dataclass(frozen=True)
class History:
    """A configuration on X produced from a (-1)-free seed by known blow-ups."""

    seed: Configuration
    config: Configuration
    m: int
    steps: tuple[str, ...]


def _random_history(rng: random.Random, catalog: Sequence[TChainData], limits: ScanLimits) -> History:
    chains = []
    for _ in range(rng.randint(1, 2)):
        data = rng.choice(catalog)
        chains.append(data.chain if rng.random() < 0.5 else data.chain[::-1])
    words = {chain_curve_id(k, j): b for k, chain in enumerate(chains, 1) for j, b in enumerate(chain, 1)}
    internal = {edge_key(chain_curve_id(k, j), chain_curve_id(k, j + 1))
                for k, chain in enumerate(chains, 1) for j in range(1, len(chain))}
    # self-intersections on S for seed curves that are not in a chain
    seed_self = {f"A{i}": -rng.randint(2, limits.max_abs_self_int) for i in range(1, rng.randint(0, 2) + 1)}
    adj: dict[str, dict[str, int]] = {c: {} for c in list(words) + list(seed_self)}
    for k, chain in enumerate(chains, 1):
        for j in range(1, len(chain)):
            a, b = chain_curve_id(k, j), chain_curve_id(k, j + 1)
            adj[a][b] = adj[b][a] = 1
    pool = sorted(adj, key=id_key)
    for a in seed_self:
        for b in rng.sample(pool, min(len(pool), rng.randint(0, 2))):
            if b != a and b not in adj[a]:
                w = 2 if b in words and rng.random() < 0.1 else 1
                adj[a][b] = adj[b][a] = w
    seed_edges = {edge_key(a, b): w for a, nb in adj.items() for b, w in nb.items()}
    drops = {c: 0 for c in adj}
    steps = []

    def room(c: str) -> bool:
        return c not in words or drops[c] < words[c] - 2

    for i in range(1, rng.randint(0, limits.max_blowups) + 1):
        new = f"B{i}"
        nodes = sorted((edge_key(a, b) for a, nb in adj.items() for b in nb
                        if edge_key(a, b) not in internal and room(a) and room(b)), key=lambda e: (id_key(e[0]), id_key(e[1])))
        nodes = list(dict.fromkeys(nodes))
        curves = [c for c in sorted(adj, key=id_key) if room(c)]
        kind = rng.choice(["free", "curve", "node"])
        if kind == "node" and not nodes:
            kind = "curve"
        if kind == "curve" and not curves:
            kind = "free"
        adj[new] = {}
        drops[new] = 0
        if kind == "curve":
            c = rng.choice(curves)
            adj[new][c] = adj[c][new] = 1
            drops[c] += 1
            steps.append(f"on {c}")
        elif kind == "node":
            a, b = rng.choice(nodes)
            adj[a][b] -= 1
            adj[b][a] -= 1
            if not adj[a][b]:
                del adj[a][b], adj[b][a]
            for c in (a, b):
                adj[new][c] = adj[c][new] = 1
                drops[c] += 1
            steps.append(f"node {a} {b}")
        else:
            steps.append("free")
    ex_self = {c: s - drops[c] for c, s in seed_self.items()}
    ex_self.update({f"B{i}": -1 - drops[f"B{i}"] for i in range(1, len(steps) + 1)})
    edges = [(a, b, w) for (a, b), w in sorted({edge_key(a, b): w for a, nb in adj.items() for b, w in nb.items()}.items())
             if (a, b) not in internal]
    config = build_configuration(0, chains, sorted(ex_self.items(), key=lambda kv: id_key(kv[0])), edges)
    s_curves = {}
    for c in sorted(list(words) + list(seed_self), key=id_key):
        s = -words[c] + drops[c] if c in words else seed_self[c]
        s_curves[c] = Curve(c, s, -2 - s)
    seed = Configuration(s_curves, seed_edges, config.tchains, config.chain_data, 0, True, None)
    return History(seed, config, len(steps), tuple(steps))


def random_blowup_generator(limits: ScanLimits, count: int) -> Iterator[History]:
    """``count`` seeded forward histories of at most ``limits.max_blowups`` blow-ups.

    Seeds are one or two T-chains (as images on S, with self-intersections
    raised by the points later blown up on them) and up to two further curves
    of self-intersection at most -2.  A chain curve of weight b receives at
    most b - 2 blow-ups so that S stays (-1)-free, and nodes between
    consecutive chain curves are never blown up.
    """
    rng = random.Random(limits.seed)
    catalog = chain_catalog(limits.max_chain_len, limits.max_abs_self_int)
    for _ in range(count):
        yield _random_history(rng, catalog, limits)


def round_trip_problems(history: History) -> list[str]:
    """Empty when contraction recovers m, the seed and both K_W^2 values agree."""
    problems = []
    result = contract(history.config)
    if result.invariants.m != history.m:
        problems.append(f"m = {result.invariants.m}, generated {history.m}")
    s = result.config_s
    if s.curves != history.seed.curves or s.edges != history.seed.edges:
        problems.append("contracted surface differs from the seed")
    return problems


# ---------------------------------------------------------------- integer kernel
#
# The scans run millions of small configurations, so they use plain lists
# instead of Configuration objects.  Curves are numbered in the canonical id
# order of the engine (F1, F2, ... first, then T1.1, T1.2, ...), hence the
# lowest-index-first contraction reproduces the engine's log exactly.

def _kernel_contract(selfs: list[int], kdeg: list[int], nodes: list[int],
                     adj: list[dict[int, int]]) -> list[tuple[int, tuple[tuple[int, int], ...]]]:
    log = []
    alive = [True] * len(selfs)
    while True:
        f = next((i for i in range(len(selfs))
                  if alive[i] and selfs[i] == -1 and kdeg[i] == -1 and nodes[i] == 0), -1)
        if f < 0:
            return log
        alive[f] = False
        items = tuple(sorted(adj[f].items()))
        adj[f] = {}
        for a, t in items:
            del adj[a][f]
            selfs[a] += t * t
            kdeg[a] -= t
            nodes[a] += t * (t - 1) // 2
        for x, (a, ta) in enumerate(items):
            for b, tb in items[x + 1:]:
                adj[a][b] = adj[b][a] = adj[a].get(b, 0) + ta * tb
        log.append((f, items))


def _kernel_divisors(log) -> list[dict[int, int]]:
    divs: list[dict[int, int]] = []
    for f, items in reversed(log):
        for coeffs in divs:
            mult = sum(t * coeffs.get(a, 0) for a, t in items)
            if mult:
                coeffs[f] = mult
        divs.append({f: 1})
    return divs


def _kernel_realizable(log) -> bool:
    later: set[int] = set()
    for f, items in reversed(log):
        hits = [w for a, w in items if a in later]
        if len(hits) > 2 or any(w != 1 for w in hits):
            return False
        later.add(f)
    return True


# ---------------------------------------------------------------- classification scan

@dataclass
class ScanReport:
    kind: str
    limits: ScanLimits
    counts: dict[str, int] = field(default_factory=dict)
    histogram: dict[str, int] = field(default_factory=dict)
    findings: list[dict[str, Any]] = field(default_factory=list)
    observations: list[dict[str, Any]] = field(default_factory=list)
    runtime: float = 0.0

    @property
    def ok(self) -> bool:
        return not self.findings and not self.counts.get("findings", 0)

    def to_dict(self) -> dict[str, Any]:
        """Deterministic content; the runtime is left out on purpose."""
        return {
            "kind": self.kind,
            "limits": {k: getattr(self.limits, k) for k in self.limits.__dataclass_fields__},
            "counts": dict(sorted(self.counts.items())),
            "histogram": dict(sorted(self.histogram.items())),
            "findings": self.findings,
            "observations": self.observations,
            "ok": self.ok,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, indent=2)


MAX_BUNDLES = 20


def _attachments(chains: Sequence[TChainData]) -> tuple[list[tuple[tuple[int, int], ...]], int]:
    """Ways a (-1)-curve can meet C with multiplicity 2 and pass the screen.

    An attachment lists (flat chain position, weight).  Returns the survivors
    and the number rejected by the screen value -1 - sum(delta w) > 0.
    """
    deltas = [x for d in chains for x in d.discrepancies]
    keep, rejected = [], 0
    for a in range(len(deltas)):
        for b in range(a, len(deltas)):
            att = ((a, 2),) if a == b else ((a, 1), (b, 1))
            if -1 - sum(deltas[x] * w for x, w in att) > 0:
                keep.append(att)
            else:
                rejected += 1
    return keep, rejected


def _candidate_config(chains: Sequence[TChainData], atts) -> Configuration:
    flat = [(k, j) for k, d in enumerate(chains, 1) for j in range(1, d.length + 1)]
    extra = [(f"F{i}", -1) for i in range(1, len(atts) + 1)]
    edges = [(f"F{i}", chain_curve_id(*flat[x]), w) for i, att in enumerate(atts, 1) for x, w in att]
    return build_configuration(0, [d.chain for d in chains], extra, edges)


class _Scanner:
    def __init__(self, limits: ScanLimits, verify_engine: bool = False):
        self.limits = limits
        self.verify_engine = verify_engine
        self.counts: dict[str, int] = {}
        self.histogram: dict[str, int] = {}
        self.findings: list[dict[str, Any]] = []
        self.observations: list[dict[str, Any]] = []
        self.cache: dict[tuple, Any] = {}

    def bump(self, key: str, n: int = 1) -> None:
        self.counts[key] = self.counts.get(key, 0) + n

    def finding(self, kind: str, chains, atts, detail: str) -> None:
        self.bump("findings")
        if len(self.findings) < MAX_BUNDLES:
            self.findings.append({"kind": kind, "detail": detail,
                                  "config": config_to_dict(_candidate_config(chains, atts))})

    def classify(self, key: tuple, graph) -> tuple[str, str]:
        if key not in self.cache:
            self.bump("distinct unit graphs")
            try:
                t = _classify_cached(graph)
                self.cache[key] = ("ok", t.kind) if t else ("none", "")
            except ClassificationError as exc:
                self.cache[key] = ("ambiguous", str(exc))
        return self.cache[key]

    def run_candidate(self, chains: Sequence[TChainData], atts, owner, pos, words) -> None:
        k = len(atts)
        L = len(words)
        n = k + L
        selfs = [-1] * k + [-b for b in words]
        kdeg = [-1] * k + [b - 2 for b in words]
        nodes = [0] * n
        adj: list[dict[int, int]] = [{} for _ in range(n)]
        for x in range(L - 1):
            if owner[x] == owner[x + 1]:
                adj[k + x][k + x + 1] = adj[k + x + 1][k + x] = 1
        for i, att in enumerate(atts):
            for x, w in att:
                adj[i][k + x] = adj[k + x][i] = w
        orig_adj = [dict(d) for d in adj]
        orig_self = list(selfs)
        log = _kernel_contract(selfs, kdeg, nodes, adj)
        contracted = {f for f, _ in log}
        if not any(f >= k for f in contracted):
            self.bump("no chain curve contracted")
            return
        if not all(any(k + x in contracted for x, _w in att) for att in atts):
            self.bump("idle (-1)-curve")
            return
        if not _kernel_realizable(log):
            self.bump("not realizable")
            return
        self.bump("survivors")
        is_chain = [False] * k + [True] * L
        cdot = [sum(w for b, w in orig_adj[a].items() if is_chain[b]) + (orig_self[a] if is_chain[a] else 0)
                for a in range(n)]
        bad_s = []
        has_unit = False
        seen: dict[int, tuple[int, str]] = {}
        for e_index, coeffs in enumerate(_kernel_divisors(log), start=1):
            total = sum(c * cdot[a] for a, c in coeffs.items())
            inside = 0
            for a, c in coeffs.items():
                inside += c * ((orig_self[a] if is_chain[a] else 0)
                               + sum(w for b, w in orig_adj[a].items() if is_chain[b] and b in coeffs))
            outside = total - inside
            self.histogram[f"outside {outside}"] = self.histogram.get(f"outside {outside}", 0) + 1
            seen[e_index] = (outside, "")
            if outside in (0, 1):
                bad_s.append(f"E{e_index}.C outside E{e_index} is {outside}")
            if total != 1:
                continue
            has_unit = True
            self.bump("unit divisors")
            if outside != 2 or inside != -1:
                self.finding("unit decomposition", chains, atts, f"E{e_index}: outside {outside}, inside {inside}")
            graph, key = _kernel_ei_graph(e_index, coeffs, k, owner, pos, chains, orig_adj, orig_self)
            if not graph.simple:
                self.finding("unit decomposition", chains, atts, f"E{e_index}: G_E has a multiple edge")
            status, label = self.classify(key, graph)
            seen[e_index] = (outside, label if status == "ok" else status)
            if status == "ok":
                self.histogram[label] = self.histogram.get(label, 0) + 1
            elif status == "none":
                self.finding("unclassified", chains, atts, f"E{e_index} matches no template")
            else:
                self.finding("ambiguous", chains, atts, label)
        if has_unit:
            self.bump("configurations with a unit divisor")
        for detail in bad_s:
            self.finding("s_0/s_1", chains, atts, detail)
        if self.verify_engine:
            self.compare_with_engine(chains, atts, seen)

    def compare_with_engine(self, chains, atts, seen: dict[int, tuple[int, str]]) -> None:
        """Rerun a survivor through the full engine and report any disagreement."""
        config = _candidate_config(chains, atts)
        self.bump("engine cross-checks")
        if not validate_config(config).ok or not ampleness_screen(config).passed:
            self.finding("engine mismatch", chains, atts, "full engine rejects the candidate")
            return
        result = contract(config)
        units = analyse_units(config, result.divisors)
        got = {}
        for e in result.divisors:
            label = ""
            if e.index in units.units:
                try:
                    t = classify_ei(config, e)
                    label = t.kind if t else "none"
                except ClassificationError:
                    label = "ambiguous"
            got[e.index] = (units.outside[e.index], label)
        if got != seen:
            self.finding("engine mismatch", chains, atts, f"kernel {seen} engine {got}")
        outcomes = contraction_outcomes(config)
        if len(outcomes) > 1:
            self.bump("order-dependent minimal image")
            if len({m for m, _s in outcomes}) > 1:
                self.bump("order-dependent m")
                # such images always keep a curve with K.G < 0, so K_S is not nef
                if not all(any(c.k_degree < 0 for c in img.curves.values()) for _m, img in outcomes):
                    self.bump("order-dependent m with a K-nonnegative image")
                if len(self.observations) < MAX_BUNDLES:
                    self.observations.append({"kind": "order-dependent m", "m": sorted({m for m, _s in outcomes}),
                                              "config": config_to_dict(config)})


def _classify_cached(graph):
    return classify_graph(graph)


def _kernel_ei_graph(e_index, coeffs, k, owner, pos, chains, orig_adj, orig_self):
    support = set(coeffs)
    touched = set()
    for a in support:
        if a >= k:
            touched.add(owner[a - k])
        for b in orig_adj[a]:
            if b >= k:
                touched.add(owner[b - k])
    chain_ids = tuple(sorted(touched))
    vertices = support | {a for a in range(k, k + len(owner)) if owner[a - k] in touched}
    simple = all(w == 1 for a in vertices for b, w in orig_adj[a].items() if b in vertices)
    boxes = {c: frozenset(pos[a - k] for a in support if a >= k and owner[a - k] == c) for c in chain_ids}
    words = {c: chains[c].chain for c in chain_ids}
    circles = tuple(f"F{a + 1}" for a in sorted(a for a in support if a < k))
    chain_nbrs = {f"F{a + 1}": tuple(sorted((owner[b - k], pos[b - k], w) for b, w in orig_adj[a].items() if b >= k))
                  for a in support if a < k}
    circle_nbrs = {c: () for c in circles}
    graph = EiGraph(e_index, chain_ids, words, boxes, circles, {c: -1 for c in circles},
                    chain_nbrs, circle_nbrs, simple)
    key = (chain_ids, tuple(words[c] for c in chain_ids), tuple(tuple(sorted(boxes[c])) for c in chain_ids),
           tuple(chain_nbrs[c] for c in circles), simple)
    return graph, key


def _chain_tuples(catalog: Sequence[TChainData], limits: ScanLimits) -> Iterator[tuple[TChainData, ...]]:
    for c in range(1, limits.max_chains + 1):
        for combo in itertools.combinations_with_replacement(range(len(catalog)), c):
            chains = tuple(catalog[i] for i in combo)
            if sum(d.length for d in chains) + 1 <= limits.max_curves:
                yield chains


def classification_scan(limits: ScanLimits, chain_filter=None, verify_engine: bool = False) -> ScanReport:
    """Exhaustive scan of unit divisors.

    Candidates are 1 to ``max_chains`` T-chains (one orientation each, all
    attachment positions) with 1 to ``max_minus_one`` (-1)-curves, each
    meeting C with multiplicity 2: two chain curves once, or one chain curve
    twice.  Every (-1)-curve must pass the screen, and at most
    ``max_curves`` curves are used.  Candidates where some chain is untouched
    or some (-1)-curve contracts without taking a chain curve along are
    disjoint unions of smaller candidates and are skipped.  With
    ``verify_engine`` every survivor is also rerun through the full engine,
    including the check that all contraction orders agree.  Every unit
    divisor of a survivor is classified; s_0 = s_1 = 0 and the decomposition
    outside 2, inside -1 are checked on every divisor.
    """
    start = time.perf_counter()
    scanner = _Scanner(limits, verify_engine)
    catalog = chain_catalog(limits.max_chain_len, limits.max_abs_self_int)
    scanner.bump("catalog chains", len(catalog))
    for chains in _chain_tuples(catalog, limits):
        if chain_filter is not None and not chain_filter(chains):
            continue
        owner = [c for c, d in enumerate(chains) for _ in d.chain]
        pos = [j for d in chains for j in range(d.length)]
        words = [b for d in chains for b in d.chain]
        L = len(words)
        atts, rejected = _attachments(chains)
        scanner.bump("attachments rejected by screen", rejected)
        for k in range(max(1, len(chains) - 1), min(limits.max_minus_one, limits.max_curves - L) + 1):
            for sel in itertools.combinations_with_replacement(atts, k):
                scanner.bump("candidates")
                hits = [0] * L
                double = [False] * L
                touched = set()
                for att in sel:
                    for x, w in att:
                        touched.add(owner[x])
                        if w == 1:
                            hits[x] += 1
                        else:
                            double[x] = True
                if len(touched) < len(chains):
                    scanner.bump("chain untouched")
                    continue
                # the first chain curve to contract needs exactly b - 1 transversal hits
                if not any(hits[x] == words[x] - 1 and not double[x] for x in range(L)):
                    scanner.bump("no chain curve contracted")
                    continue
                scanner.run_candidate(chains, sel, owner, pos, words)
    report = ScanReport("classification", limits, scanner.counts, scanner.histogram, scanner.findings,
                        scanner.observations)
    report.runtime = time.perf_counter() - start
    return report


# ---------------------------------------------------------------- center preservation

def _junction_ok(left: TChainData, right: TChainData) -> bool:
    return left.discrepancies[-1] + right.discrepancies[0] <= -1


def _oriented_catalog(max_len: int) -> list[TChainData]:
    # the enumeration is closed under reversal
    return enumerate_t_chains(max_len)


def _assembly_outcome(chains: Sequence[TChainData]) -> tuple[int, tuple[str, ...]]:
    """Contract [T1]-1-[T2]-1-... with the kernel; return m and the violations."""
    k = len(chains) - 1
    words = [b for d in chains for b in d.chain]
    owner = [c for c, d in enumerate(chains) for _ in d.chain]
    starts = list(itertools.accumulate([0] + [d.length for d in chains]))
    n = k + len(words)
    selfs = [-1] * k + [-b for b in words]
    kdeg = [-1] * k + [b - 2 for b in words]
    adj: list[dict[int, int]] = [{} for _ in range(n)]
    for x in range(len(words) - 1):
        if owner[x] == owner[x + 1]:
            adj[k + x][k + x + 1] = adj[k + x + 1][k + x] = 1
    for i in range(k):
        a, b = k + starts[i + 1] - 1, k + starts[i + 1]
        adj[i][a] = adj[a][i] = adj[i][b] = adj[b][i] = 1
    log = _kernel_contract(selfs, kdeg, [0] * n, adj)
    contracted = {f for f, _ in log}
    problems = []
    for c, d in enumerate(chains):
        centre = [k + starts[c] + j - 1 for j in sorted(d.center)]
        hit = [f"T{c + 1}.{x - k - starts[c] + 1}" for x in centre if x in contracted]
        if hit:
            problems.append(f"center curve contracted: {', '.join(hit)}")
        if c in (0, len(chains) - 1) and not any(selfs[x] < -2 for x in centre if x not in contracted):
            problems.append(f"center of T{c + 1} has no curve below -2")
    return len(log), tuple(problems)


def _assembly_bundle(chains: Sequence[TChainData], detail: str) -> dict[str, Any]:
    extra = [(f"F{i}", -1) for i in range(1, len(chains))]
    edges = []
    for i in range(1, len(chains)):
        edges += [(f"F{i}", chain_curve_id(i, chains[i - 1].length), 1), (f"F{i}", chain_curve_id(i + 1, 1), 1)]
    config = build_configuration(0, [d.chain for d in chains], extra, edges)
    return {"kind": "center", "detail": detail, "config": config_to_dict(config)}


def starc_scan(limits: ScanLimits) -> ScanReport:
    """Contract every junction-valid assembly [T1]-1-[T2]-1-...-[Tx], 2 <= x <= max_chains.

    Chains range over all T-chains of length <= max_chain_len in both
    orientations; each junction needs delta(last of Ti) + delta(first of
    Ti+1) <= -1.  No center curve may be contracted, and the first and last
    chains must each keep a center curve of self-intersection below -2.
    """
    start = time.perf_counter()
    catalog = _oriented_catalog(limits.max_chain_len)
    counts: dict[str, int] = {"catalog chains": len(catalog)}
    histogram: dict[str, int] = {}
    findings: list[dict[str, Any]] = []
    pairs: dict[tuple[tuple[int, ...], ...], tuple[int, tuple[str, ...]]] = {}

    def visit(chains: tuple[TChainData, ...]) -> None:
        m, problems = _assembly_outcome(chains)
        key = f"{len(chains)} chains"
        counts[key] = counts.get(key, 0) + 1
        histogram[f"m = {m}"] = histogram.get(f"m = {m}", 0) + 1
        if len(chains) == 2:
            pairs[tuple(d.chain for d in chains)] = (m, problems)
        for p in problems:
            counts["findings"] = counts.get("findings", 0) + 1
            if len(findings) < MAX_BUNDLES:
                findings.append(_assembly_bundle(chains, p))

    def extend(prefix: tuple[TChainData, ...]) -> None:
        if len(prefix) >= 2:
            visit(prefix)
        if len(prefix) == limits.max_chains:
            return
        for d in catalog:
            if not prefix or _junction_ok(prefix[-1], d):
                extend(prefix + (d,))

    extend(())
    dedicated = two_chain_scan(limits.max_chain_len)
    agree = dedicated == pairs
    counts["two-chain scan agrees"] = int(agree)
    if not agree:
        counts["findings"] = counts.get("findings", 0) + 1
        findings.append({"kind": "two-chain disagreement", "detail": "kernel and engine differ on some pair"})
    report = ScanReport("starc", limits, counts, histogram, findings)
    report.runtime = time.perf_counter() - start
    return report


def two_chain_scan(max_len: int) -> dict[tuple[tuple[int, ...], ...], tuple[int, tuple[str, ...]]]:
    """The two-chain case through the full engine: pair -> (m, violations)."""
    catalog = _oriented_catalog(max_len)
    out = {}
    for left in catalog:
        for right in catalog:
            if not _junction_ok(left, right):
                continue
            config = build_configuration(0, [left.chain, right.chain], [("F1", -1)],
                                         [("F1", chain_curve_id(1, left.length), 1), ("F1", chain_curve_id(2, 1), 1)])
            image, m, _log = contract_to_minimal(config)
            problems = []
            for c, (ids, d) in enumerate(zip(config.tchains, config.chain_data)):
                centre = [ids[j - 1] for j in sorted(d.center)]
                hit = [x for x in centre if x not in image.curves]
                if hit:
                    problems.append(f"center curve contracted: {', '.join(hit)}")
                if not any(image.curves[x].self_int < -2 for x in centre if x in image.curves):
                    problems.append(f"center of T{c + 1} has no curve below -2")
            out[(left.chain, right.chain)] = (m, tuple(problems))
    return out
