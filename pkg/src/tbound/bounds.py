"""Every identity and inequality relating the invariants of a configuration.

Quantities: l chains, R = sum r_j, D = sum d_j, m blow-downs, Z unit divisors,
lambda = K_S . pi(C), and dk = K_W^2 - K_S^2.
"""

from __future__ import annotations

from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Any, Mapping, Sequence

import networkx as nx

from .classify import Classification, ClassificationError, ComponentShape, EiType, analyse_units, classify_contraction
from .dualgraph import (Configuration, Contraction, InputError, ScreenReport, ampleness_screen, contract, is_realizable,
                        validate_config)
from .tchain import TChainData


@dataclass(frozen=True)
class Check:
    name: str
    statement: str
    lhs: Fraction | None
    relation: str
    rhs: Fraction | None
    status: str
    note: str = ""

    @property
    def satisfied(self) -> bool:
        return self.status != "fail"

    @property
    def tight(self) -> bool:
        return self.lhs is not None and self.lhs == self.rhs and self.relation != "=="

    @property
    def slack(self) -> Fraction | None:
        if self.lhs is None or self.rhs is None:
            return None
        return self.lhs - self.rhs if self.relation == ">=" else self.rhs - self.lhs

    def to_dict(self) -> dict[str, Any]:
        def fmt(x):
            return None if x is None else str(x)
        return {
            "name": self.name,
            "statement": self.statement,
            "lhs": fmt(self.lhs),
            "relation": self.relation,
            "rhs": fmt(self.rhs),
            "status": self.status,
            "satisfied": self.satisfied,
            "tight": self.tight,
            "slack": fmt(self.slack),
            "note": self.note,
        }


def evaluate(name: str, statement: str, lhs, relation: str, rhs, note: str = "") -> Check:
    lhs, rhs = Fraction(lhs), Fraction(rhs)
    ok = {"<=": lhs <= rhs, ">=": lhs >= rhs, "==": lhs == rhs}[relation]
    return Check(name, statement, lhs, relation, rhs, "pass" if ok else "fail", note)


def skipped(name: str, statement: str, relation: str, note: str) -> Check:
    return Check(name, statement, None, relation, None, "not evaluated", note)


NEF_NOTE = "requires K_S nef"


def local_ei_bounds(t: EiType, chains: Sequence[TChainData], ks_nef: bool, proper_units_inside: int = 0,
                    prefix: str = "local") -> list[Check]:
    """Lower bounds on r - d for the chains attached to one maximal unit divisor."""
    rd = [chains[k].r_minus_d for k in t.chains]
    p = t.params
    out: list[tuple[str, str, int, str, int]] = []
    needs_nef = t.kind in ("T.2.1", "T.2.3", "T.3.1", "T.3.2", "C.1")
    if t.kind == "T.2.1":
        m = p[0]
        out += [("boxed chain", "r-d >= m", rd[1], ">=", m), ("other chain", "r-d >= m", rd[0], ">=", m)]
    elif t.kind == "T.2.2":
        s = p[0] + p[1]
        out += [("first chain", "r-d >= m+n", rd[0], ">=", s), ("second chain", "r-d >= m+n", rd[1], ">=", s),
                ("larger chain", "max r-d >= m+n+1", max(rd), ">=", s + 1)]
    elif t.kind == "T.2.3":
        m = p[0]
        out += [("chain with m boxes", "r-d >= m", rd[0], ">=", m), ("chain with n boxes", "r-d >= m", rd[1], ">=", m)]
    elif t.kind == "T.2.4":
        out += [("chain other than [4]", "r-d >= 2", rd[0], ">=", 2)]
    elif t.kind == "T.2.5":
        out += [("chain other than [2,5,3]", "r-d >= 3", rd[0], ">=", 3)]
    elif t.kind == "T.3.1":
        m, n = p
        out += [("chain with m boxes", "r-d >= m", rd[0], ">=", m),
                ("inner chain", "r-d = m+n-1", rd[1], "==", m + n - 1),
                ("chain with n boxes", "r-d >= n", rd[2], ">=", n)]
    elif t.kind == "T.3.2":
        m, n = p
        out += [("chain with m boxes", "r-d >= m", rd[0], ">=", m),
                ("inner chain", "r-d = m+n-1", rd[1], "==", m + n - 1),
                ("chain with n boxes", "r-d >= m+n-1", rd[2], ">=", m + n - 1)]
    elif t.kind == "C.1":
        out += [("chain", "r-d >= 2m", rd[0], ">=", 2 * p[0])]
    elif t.kind == "C.2":
        out += [("chain", "r-d >= m+1", rd[0], ">=", p[0] + 1),
                ("no smaller unit divisor inside", "proper unit divisors inside = 0", proper_units_inside, "==", 0)]
    checks = []
    for label, stmt, lhs, rel, rhs in out:
        name = f"{prefix} {t.label()} {label}"
        if needs_nef and not ks_nef:
            checks.append(skipped(name, stmt, rel, NEF_NOTE))
        else:
            checks.append(evaluate(name, stmt, lhs, rel, rhs))
    return checks


def component_bound(comp: ComponentShape) -> Check:
    """The inequality tying R'-D' to Z' on one component of the decorated graph."""
    lp, rd, z = comp.size, comp.rd, comp.z
    name = f"component {list(comp.vertices)} {comp.shape}" + (f" loop {comp.loop_kind}" if comp.loop_kind else "")
    if comp.shape == "G1":
        return evaluate(name, "(l'-1)(R'-D') >= l' Z'", (lp - 1) * rd, ">=", lp * z)
    if comp.shape == "G2":
        return evaluate(name, "(2l'-1)(R'-D') >= 2l' Z' - l'", (2 * lp - 1) * rd, ">=", 2 * lp * z - lp)
    if comp.shape == "G3":
        if comp.loop_kind == "C.1":
            return evaluate(name, "(2l'-1)(R'-D') >= 2l' Z'", (2 * lp - 1) * rd, ">=", 2 * lp * z)
        shift = {"T.2.4": 2, "T.2.5": 3}.get(comp.loop_kind, 1)
        return evaluate(name, f"(l'-1)(R'-D') >= l'(Z'-{shift})", (lp - 1) * rd, ">=", lp * (z - shift))
    return Check(name, "component has a recognised shape", None, "==", None, "fail", "; ".join(comp.problems))


@dataclass(frozen=True)
class TableRow:
    label: str
    statement: str
    lhs: Fraction
    rhs: Fraction
    side: tuple[tuple[str, int, int], ...] = ()


def _row(label, coef, lam_coef, const, dk, lam, rd_total, side=()) -> TableRow:
    rhs = coef * dk + lam_coef * lam + const
    stmt = f"R-D <= {coef} dk - {-lam_coef} lambda" + (f" {'+' if const >= 0 else '-'} {abs(const)}" if const else "")
    return TableRow(label, stmt, Fraction(rd_total), Fraction(rhs), tuple(side))


def l2_row(config: Configuration, types: Mapping[int, EiType], dk: int, lam: int) -> TableRow | None:
    """The row of the two-chain tables that applies, or None if no row does."""
    rds = [d.r_minus_d for d in config.chain_data]
    total = sum(rds)
    found = list(types.values())
    if not found:
        return _row("no unit divisor", 2, -1, 0, dk, lam, total)
    if len(found) == 1:
        t = found[0]
        if t.kind == "C.1":
            a = t.chains[0]
            lhs = Fraction(rds[a], 2) + rds[1 - a]
            return TableRow("C.1", "(r1-d1)/2 + r2-d2 <= 2 dk - lambda", lhs, Fraction(2 * dk - lam))
        simple = {"C.2": (2, -1, 1), "T.2.1": (4, -2, 0), "T.2.2": (4, -2, -1), "T.2.3": (4, -2, 0),
                  "T.2.4": (2, -1, 2), "T.2.5": (4, -2, 5)}
        if t.kind not in simple:
            return None
        side = ()
        if t.kind == "T.2.4":
            side = (("r-d of [4]", rds[t.chains[1]], 0),)
        if t.kind == "T.2.5":
            side = (("r-d of [2,5,3]", rds[t.chains[1]], 2),)
        return _row(t.kind, *simple[t.kind], dk, lam, total, side)
    if len(found) > 2:
        raise ClassificationError(f"{len(found)} maximal unit divisors with two chains")
    kinds = tuple(sorted(t.kind for t in found))
    by_kind = {t.kind: t for t in found}
    if kinds == ("C.1", "C.2"):
        a, b = by_kind["C.1"].chains[0], by_kind["C.2"].chains[0]
        if a == b:
            return None
        return TableRow("C.1+C.2", "(r1-d1)/2 + r2-d2 <= 2 dk - lambda + 1", Fraction(rds[a], 2) + rds[b],
                        Fraction(2 * dk - lam + 1))
    if kinds == ("T.2.1", "T.2.1"):
        if any(t.meets_two_ends for t in found):
            return _row("T.2.1+T.2.1 (a (-1)-curve meets two ending curves)", 6, -3, 2, dk, lam, total)
        return _row("T.2.1+T.2.1 (no (-1)-curve meets two ending curves)", 4, -2, 0, dk, lam, total)
    if kinds == ("C.1", "T.2.1"):
        if by_kind["T.2.1"].meets_two_ends:
            return _row("T.2.1+C.1 (the (-1)-curve meets two ending curves)", 6, -3, 1, dk, lam, total)
        return _row("T.2.1+C.1 (the (-1)-curve meets one ending curve)", 4, -2, 1, dk, lam, total)
    table = {("C.1", "C.1"): (4, -2, 0), ("C.2", "C.2"): (2, -1, 2), ("T.2.1", "T.2.2"): (8, -4, -1),
             ("C.1", "T.2.2"): (8, -4, 0), ("C.2", "T.2.1"): (4, -2, 1), ("C.2", "T.2.2"): (4, -2, 2)}
    if kinds not in table:
        return None
    return _row("+".join(kinds), *table[kinds], dk, lam, total)


def l2_checks(config: Configuration, types: Mapping[int, EiType], dk: int, lam: int) -> list[Check]:
    name = "two-chain table"
    stmt = "exactly one table row applies"
    if len(config.tchains) != 2:
        return []
    if not config.ks_nef:
        return [skipped(name, stmt, "<=", NEF_NOTE)]
    row = l2_row(config, types, dk, lam)
    if row is None:
        kinds = sorted(t.label() for t in types.values())
        return [Check(name, stmt, None, "<=", None, "fail", f"no row for {kinds}")]
    out = [evaluate(f"{name}: {row.label}", row.statement, row.lhs, "<=", row.rhs)]
    for label, got, want in row.side:
        out.append(evaluate(f"{name}: {row.label} side condition", f"{label} = {want}", got, "==", want))
    return out


def auxiliary_checks(config: Configuration, kw2: int, ambient: Mapping[str, Any] | None) -> list[Check]:
    """The log BMY bound on sum d_i and the elliptic fibration constraint."""
    bmy_name, bmy = "log BMY", "sum d <= 12 chi - 3/4 K_W^2 + sum 1/(d n^2)"
    ell_name, ell = "elliptic fibration", "(sum j a_j)(p_g - 1 + sum (m_i-1)/m_i) <= K_W^2 + l"
    ambient = ambient or {}
    out = []
    if "chi" in ambient:
        lhs = sum(d.d for d in config.chain_data)
        rhs = 12 * Fraction(ambient["chi"]) - Fraction(3, 4) * kw2 + sum(Fraction(1, d.d * d.n * d.n) for d in config.chain_data)
        out.append(evaluate(bmy_name, bmy, lhs, "<=", rhs))
    else:
        out.append(skipped(bmy_name, bmy, "<=", "chi not supplied"))
    if "p_g" in ambient and "fiber_degree_counts" in ambient:
        counts = ambient["fiber_degree_counts"]
        items = counts.items() if isinstance(counts, dict) else enumerate(counts, start=1)
        degree = sum(int(j) * int(a) for j, a in items)
        mult = sum(Fraction(mi - 1, mi) for mi in ambient.get("multiple_fibers", []))
        lhs = degree * (Fraction(ambient["p_g"]) - 1 + mult)
        out.append(evaluate(ell_name, ell, lhs, "<=", kw2 + len(config.tchains)))
    else:
        out.append(skipped(ell_name, ell, "<=", "p_g or fiber degree counts not supplied"))
    return out


@dataclass
class BoundReport:
    l: int
    m: int
    R: int
    D: int
    Z: int
    lam: int
    ks2: int
    kw2: int
    s_counts: dict[int, int]
    screen: ScreenReport
    components: list[ComponentShape]
    types: dict[int, EiType]
    checks: list[Check] = field(default_factory=list)
    contraction: Contraction | None = None

    @property
    def ok(self) -> bool:
        return all(c.satisfied for c in self.checks)

    def check(self, prefix: str) -> Check:
        hits = [c for c in self.checks if c.name.startswith(prefix)]
        if len(hits) != 1:
            raise KeyError(f"{len(hits)} checks named {prefix!r}")
        return hits[0]

    def to_dict(self) -> dict[str, Any]:
        return {
            "l": self.l, "m": self.m, "R": self.R, "D": self.D, "R_minus_D": self.R - self.D, "Z": self.Z,
            "lambda": self.lam, "ks2": self.ks2, "kw2": self.kw2, "kw2_minus_ks2": self.kw2 - self.ks2,
            "s_counts": {str(h): n for h, n in sorted(self.s_counts.items())},
            "screen_passed": self.screen.passed,
            "maximal_unit_divisors": {f"E{i}": {"type": t.label(), "chains": [k + 1 for k in t.chains]}
                                      for i, t in sorted(self.types.items())},
            "components": [
                {"vertices": [v + 1 for v in c.vertices], "shape": c.shape, "loop": c.loop_kind, "l_prime": c.size,
                 "l_of_component": c.effective_size, "f": str(c.f_value), "rd": c.rd, "z": c.z}
                for c in self.components
            ],
            "checks": [c.to_dict() for c in self.checks],
            "ok": self.ok,
        }


def global_report(config: Configuration) -> BoundReport:
    """Contract, classify and evaluate every check on a configuration on X.

    Raises InputError for malformed input and EngineDefect when a bookkeeping
    identity fails; inequality failures are recorded in the report.
    """
    valid = validate_config(config)
    if not valid.ok:
        raise InputError("; ".join(valid.errors))
    screen = ampleness_screen(config)
    result = contract(config)
    inv = result.invariants
    l = len(config.tchains)
    R = sum(d.length for d in config.chain_data)
    D = sum(d.d for d in config.chain_data)
    dk, lam = inv.delta_k, inv.lam
    checks = [
        evaluate("K_W^2 two ways", "K_S^2 - m + sum(r-d+1) = K_X^2 - sum delta (b-2)", inv.kw2_blowdown, "==", inv.kw2_pairing),
        evaluate("sum E_i.C", "sum E_i.C = sum(r-d+2) - lambda", inv.sum_ei_dot_c, "==", inv.sum_rd + 2 * l - lam),
    ]
    if not is_realizable(config, result.log):
        checks.append(Check("blow-up history", "the contraction log is a chain of point blow-ups", None, "==", None,
                            "fail", "no valid contraction to a (-1)-free state"))
    if not screen.passed:
        checks.append(Check("ampleness screen", "every curve outside C is positive for K_W", None, ">", None,
                            "fail", "; ".join(screen.failures)))
    lam_check = evaluate("lambda bound", "lambda <= dk + l", lam, "<=", dk + l)
    if lam_check.tight and inv.m:
        lam_check = replace(lam_check, note="tight although m > 0; review")
    checks.append(lam_check)
    try:
        classification: Classification | None = classify_contraction(result)
    except ClassificationError as exc:
        classification = None
        checks.append(Check("classification", "every maximal unit divisor matches a template", None, "==", None,
                            "fail", str(exc)))
    units = classification.units if classification else analyse_units(config, result.divisors)
    s = units.s_counts
    checks.append(evaluate("s_0", "no E_i is disjoint from C outside itself", s.get(0, 0), "==", 0))
    checks.append(evaluate("s_1", "no E_i meets C outside itself once", s.get(1, 0), "==", 0))
    checks.append(evaluate("unit divisor decomposition", "unit E_i: outside 2, inside -1, simple graph",
                           len(units.prop42_failures), "==", 0, "; ".join(units.prop42_failures)))
    stmt = "(a-1) sum(r-d) <= a dk + (2-a) l - lambda"
    if inv.m == 0:
        checks.append(skipped("graded r-d bound", stmt, "<=", "no blow-ups"))
    else:
        a = min(h for h, n in s.items() if n) - 1
        if a < 1:
            checks.append(skipped("graded r-d bound", stmt, "<=", "s_0 or s_1 nonzero"))
        else:
            checks.append(evaluate(f"graded r-d bound (a={a})", stmt, (a - 1) * inv.sum_rd, "<=", a * dk + (2 - a) * l - lam))
    z = units.z
    checks.append(evaluate("r-d bound", "R-D <= 2 dk + Z - lambda", R - D, "<=", 2 * dk + z - lam))
    components = classification.components if classification else []
    types = classification.graph.types if classification else {}
    if classification:
        total_weight = sum(e.weight for e in classification.graph.edges + classification.graph.loops)
        checks.append(evaluate("decorated weight", "total edge and loop weight = Z", total_weight, "==", z))
        nef = config.ks_nef
        shapes_ok = all(c.shape != "other" and not c.problems for c in components)
        for comp in components:
            chk = component_bound(comp)
            if not nef and chk.lhs is not None:
                chk = skipped(chk.name, chk.statement, chk.relation, NEF_NOTE)
            checks.append(chk)
            if comp.shape == "G2":
                kinds = {e.kind for e in classification.graph.edges if e.u in comp.vertices}
                checks.append(evaluate(f"component {list(comp.vertices)} G2 cycle", "not every cycle edge is T.2.2",
                                       int(kinds == {"T.2.2"}), "==", 0))
        inv_l = sum(Fraction(c.rd, c.effective_size) for c in components)
        f_sum = sum(c.f_value for c in components)
        z_stmt = "Z <= R-D - sum (R'-D')/l(G') + sum f(G')"
        g_stmt = "sum (R'-D')/l(G') <= 2 dk + sum f(G') - lambda"
        L = max((c.size for c in components), default=0)
        c1_stmt = "R-D <= 4L dk - 2L lambda"
        c2_stmt = "R-D <= 2L dk - L lambda"
        if not nef or not shapes_ok:
            note = NEF_NOTE if not nef else "decorated graph has an unexpected shape"
            checks += [skipped("unit count bound", z_stmt, "<=", note), skipped("graph bound", g_stmt, "<=", note),
                       skipped("graph corollary (G1, G2, G3 with C.1)", c1_stmt, "<=", note),
                       skipped("graph corollary (G1 only)", c2_stmt, "<=", note)]
        else:
            checks.append(evaluate("unit count bound", z_stmt, z, "<=", R - D - inv_l + f_sum))
            checks.append(evaluate("graph bound", g_stmt, inv_l, "<=", 2 * dk + f_sum - lam))
            if all(c.shape in ("G1", "G2") or c.loop_kind == "C.1" for c in components):
                checks.append(evaluate("graph corollary (G1, G2, G3 with C.1)", c1_stmt, R - D, "<=", 4 * L * dk - 2 * L * lam))
            else:
                checks.append(skipped("graph corollary (G1, G2, G3 with C.1)", c1_stmt, "<=", "other shapes present"))
            if all(c.shape == "G1" for c in components):
                checks.append(evaluate("graph corollary (G1 only)", c2_stmt, R - D, "<=", 2 * L * dk - L * lam))
            else:
                checks.append(skipped("graph corollary (G1 only)", c2_stmt, "<=", "other shapes present"))
        by_index = {e.index: e for e in result.divisors}
        for i, t in sorted(types.items()):
            inner = sum(1 for j in units.units if j != i and by_index[j].support < by_index[i].support)
            checks += local_ei_bounds(t, config.chain_data, nef, inner, prefix=f"local E{i}")
        checks += l2_checks(config, types, dk, lam)
    checks += auxiliary_checks(config, inv.kw2_blowdown, config.ambient)
    return BoundReport(l, inv.m, R, D, z, lam, config.ks2, inv.kw2_blowdown, dict(s), screen, components,
                       dict(types), checks, result)


def tree_weights(vertices: Sequence[Any], edges: Sequence[tuple[Any, Any]]) -> dict[tuple[Any, Any], int]:
    """w[i, j]: size of the component containing j once the edge ij is removed."""
    g = nx.Graph()
    g.add_nodes_from(vertices)
    g.add_edges_from(edges)
    if not nx.is_tree(g):
        raise InputError("tree_weights needs a tree")
    weights = {}
    for i, j in edges:
        h = g.copy()
        h.remove_edge(i, j)
        side_j = nx.node_connected_component(h, j)
        weights[(i, j)] = len(side_j)
        weights[(j, i)] = g.number_of_nodes() - len(side_j)
    return weights


@dataclass
class TreeReport:
    weights: dict[tuple[Any, Any], int]
    vertex_sums: dict[Any, int]
    edge_sums: dict[tuple[Any, Any], int]
    checks: list[Check]


def tree_report(vertices: Sequence[Any], edges: Sequence[tuple[Any, Any]],
                a: Mapping[Any, int] | None = None, z: Mapping[tuple[Any, Any], int] | None = None) -> TreeReport:
    """Weight identities, and the two averaging inequalities when values are given.

    The second inequality needs a root V_1 and a bijection between the other
    vertices and the edges (each vertex to the edge towards the root); any root
    works, and the report uses the vertex with the largest value, which gives
    the strongest instance.
    """
    w = tree_weights(vertices, edges)
    p = len(vertices)
    vsum = {v: sum(w[(v, u)] for u in vertices if (v, u) in w) for v in vertices}
    esum = {(i, j): w[(i, j)] + w[(j, i)] for i, j in edges}
    checks = [evaluate(f"outgoing weights at {v}", "sum_j w_ij = p - 1", s, "==", p - 1) for v, s in vsum.items()]
    checks += [evaluate(f"edge {e}", "w_ij + w_ji = p", s, "==", p) for e, s in esum.items()]
    if a is not None and z is not None:
        zval = {frozenset(e): z[e] if e in z else z[(e[1], e[0])] for e in edges}
        if any(a[v] < zval[frozenset(e)] for e in edges for v in e):
            raise InputError("vertex values must dominate incident edge values")
        total_a, total_z = sum(a[v] for v in vertices), sum(zval.values())
        checks.append(evaluate("tree averaging", "(p-1) sum a >= p sum z", (p - 1) * total_a, ">=", p * total_z))
        root = max(vertices, key=lambda v: (a[v], str(v)))
        lhs = (p - 1) * a[root] + (2 * p - 1) * (total_a - a[root])
        checks.append(evaluate(f"rooted tree averaging (root {root})", "(p-1) a_1 + (2p-1) sum_{i>=2} a_i >= 2p sum z",
                               lhs, ">=", 2 * p * total_z))
    return TreeReport(w, vsum, esum, checks)
