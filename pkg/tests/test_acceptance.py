"""Acceptance criteria 1-10.

Each ``criterion_N`` returns a JSON-able report with a ``passed`` flag and a
one-line ``summary``; the tests print one line per criterion at the end of
the run.  Criterion 10 reruns 1-9 and compares the reports byte for byte.
"""

import itertools
import json
import random
import time
from fractions import Fraction

import networkx as nx
import pytest

import conftest
from tbound.bounds import global_report, tree_report
from tbound.cfrac import hj_evaluate, t_params_from_fraction
from tbound.configfile import load_config
from tbound.dualgraph import EngineDefect, contract
from tbound.search import ScanLimits, build_optimal_example, classification_scan, random_blowup_generator, \
    round_trip_problems, starc_scan
from tbound.tchain import discrepancies_by_adjunction, enumerate_t_chains, is_t_chain

SEED = 0


def criterion_1():
    checked = accepted = 0
    mismatches = []
    for r in range(1, 8):
        for chain in itertools.product(range(2, 10), repeat=r):
            checked += 1
            data = is_t_chain(chain)
            oracle = t_params_from_fraction(*hj_evaluate(chain))
            got = None if data is None else (data.d, data.n, data.a)
            want = None if oracle is None else (oracle.d, oracle.n, oracle.a)
            accepted += got is not None
            if got != want and len(mismatches) < 10:
                mismatches.append({"chain": list(chain), "recognizer": got, "oracle": want})
    return {"passed": not mismatches, "checked": checked, "accepted": accepted, "mismatches": mismatches,
            "summary": f"{checked} chains, {accepted} T-chains, {len(mismatches)} mismatches"}


def criterion_2():
    chains = enumerate_t_chains(12)
    bad = [list(d.chain) for d in chains if discrepancies_by_adjunction(d.chain) != d.discrepancies]
    return {"passed": not bad, "checked": len(chains), "mismatches": bad[:10],
            "summary": f"{len(chains)} T-chains with r <= 12, {len(bad)} mismatches"}


WORKED = {
    (4, 2, 6, 2, 2): ((1, 10, 3), ("-7/10", "-4/5", "-9/10", "-3/5", "-3/10"), [3]),
    (2, 5, 3): ((1, 5, 3), ("-2/5", "-4/5", "-3/5"), None),
    (3, 2, 2, 3): ((4, 2, 1), None, None),
}


def criterion_3():
    rows, passed = [], True
    for chain, (params, delta, center) in WORKED.items():
        data = is_t_chain(chain)
        got = (data.d, data.n, data.a)
        ok = got == params
        if delta is not None:
            ok &= tuple(str(x) for x in data.discrepancies) == delta
        if center is not None:
            ok &= sorted(data.center) == center
        passed &= ok
        rows.append({"chain": list(chain), "dna": list(got), "delta": [str(x) for x in data.discrepancies],
                     "center": sorted(data.center), "ok": ok})
    return {"passed": passed, "rows": rows, "summary": f"{sum(r['ok'] for r in rows)}/{len(rows)} worked chains match"}


def criterion_4():
    count, failures, total_m = 10_000, [], 0
    for k, h in enumerate(random_blowup_generator(ScanLimits(seed=SEED), count)):
        total_m += h.m
        try:
            problems = round_trip_problems(h)
            inv = contract(h.config).invariants
            if inv.kw2_blowdown != inv.kw2_pairing:
                problems.append(f"K_W^2 {inv.kw2_blowdown} vs {inv.kw2_pairing}")
        except EngineDefect as exc:
            problems = [str(exc)]
        if problems and len(failures) < 10:
            failures.append({"history": k, "problems": problems})
    return {"passed": not failures, "histories": count, "total_blowups": total_m, "failures": failures,
            "summary": f"{count} histories ({total_m} blow-ups), {len(failures)} failures"}


def criterion_5():
    rep = classification_scan(ScanLimits(seed=SEED))
    d = rep.to_dict()
    types = sum(v for k, v in rep.histogram.items() if not k.startswith("outside"))
    return {"passed": rep.ok, "scan": d,
            "summary": f"{rep.counts['candidates']} candidates, {rep.counts['survivors']} survivors, "
                       f"{types} unit divisors classified, {len(rep.findings)} findings"}


def criterion_6():
    rep = starc_scan(ScanLimits(max_chain_len=6, max_chains=3, seed=SEED))
    return {"passed": rep.ok, "scan": rep.to_dict(),
            "summary": f"{rep.counts.get('2 chains', 0)} two-chain and {rep.counts.get('3 chains', 0)} three-chain "
                       f"assemblies, {rep.counts.get('findings', 0)} center removals"}


def criterion_7():
    grid, problems, mismatches = [], [], []
    for n in range(1, 6):
        for l in range(1, 6):
            try:
                ex = build_optimal_example(n, l)
            except EngineDefect as exc:
                problems.append(str(exc))
                continue
            r = ex.report
            if not r.ok or r.check("graph bound").status != "pass":
                problems.append(f"n={n} l={l}: report not ok")
            mismatches += [f"n={n} l={l} {m}" for m in ex.mismatches]
            grid.append({"n": n, "l": l, "m": r.m, "R_minus_D": r.R - r.D, "Z": r.Z, "lambda": r.lam,
                         "ratio": str(ex.ratio)})
    spot = next(g for g in grid if (g["n"], g["l"]) == (1, 2))
    spot_ok = (spot["R_minus_D"], spot["Z"], spot["lambda"], spot["m"]) == (13, 7, 6, 9)
    passed = not problems and not mismatches and spot_ok
    reason = "all closed forms match" if passed else \
        f"{len(mismatches)} a_i values differ from the stated closed form (see ledger); other forms " + \
        ("match" if not problems else "also fail")
    return {"passed": passed, "grid": grid, "problems": problems, "a_mismatches": mismatches[:5],
            "a_mismatch_count": len(mismatches), "spot_ok": spot_ok,
            "summary": f"25 grid points, r-d bound tight and spot values {'ok' if spot_ok else 'wrong'}; {reason}"}


def criterion_8():
    wanted = {
        "c1_example": ("two-chain table: C.1", True),
        "c2_example": ("r-d bound", True),
        "t24_example": ("r-d bound", True),
        "t21_t21_example": ("two-chain table", None),
        "t21_t22_example": ("two-chain table", None),
    }
    rows, passed = [], True
    for name, (prefix, must_be_tight) in wanted.items():
        r = global_report(load_config(conftest.FIXTURES / f"{name}.json"))
        chk = next(c for c in r.checks if c.name.startswith(prefix) and "side condition" not in c.name)
        ok = r.ok and chk.status == "pass" and (must_be_tight is None or chk.tight == must_be_tight)
        passed &= ok
        rows.append({"fixture": name, "check": chk.name, "lhs": str(chk.lhs), "rhs": str(chk.rhs),
                     "tight": chk.tight, "ok": ok})
    return {"passed": passed, "rows": rows, "summary": "; ".join(f"{x['fixture']} {x['lhs']} <= {x['rhs']}" for x in rows)}


EIGHT_VERTEX_TREE = [(1, 2), (2, 4), (2, 3), (4, 5), (4, 6), (4, 7), (7, 8)]


def criterion_9():
    eight = tree_report(range(1, 9), EIGHT_VERTEX_TREE)
    sums_ok = set(eight.vertex_sums.values()) == {7} and set(eight.edge_sums.values()) == {8}
    rng = random.Random(SEED)
    failures = 0
    for _ in range(1000):
        p = rng.randint(2, 12)
        tree = nx.from_prufer_sequence([rng.randrange(p) for _ in range(p - 2)])
        edges = sorted(tree.edges)
        z = {e: rng.randint(0, 6) for e in edges}
        a = {v: max([z[e] for e in edges if v in e]) + rng.randint(0, 4) for v in tree.nodes}
        rep = tree_report(sorted(tree.nodes), edges, a, z)
        failures += any(c.status != "pass" for c in rep.checks)
    return {"passed": sums_ok and not failures, "eight_vertex_ok": sums_ok, "random_trees": 1000, "failures": failures,
            "summary": f"eight-vertex tree sums {'ok' if sums_ok else 'wrong'}, 1000 random trees, {failures} failures"}


CRITERIA = {1: criterion_1, 2: criterion_2, 3: criterion_3, 4: criterion_4, 5: criterion_5,
            6: criterion_6, 7: criterion_7, 8: criterion_8, 9: criterion_9}
FIRST_RUN: dict[int, str] = {}


def _run(number):
    start = time.perf_counter()
    report = CRITERIA[number]()
    return report, json.dumps(report, sort_keys=True, indent=2), time.perf_counter() - start


def _record(number, report, seconds):
    verdict = "PASS" if report["passed"] else "FAIL"
    conftest.ACCEPTANCE_LINES[number] = f"criterion {number}: {verdict} ({seconds:.1f} s) {report['summary']}"


@pytest.mark.parametrize("number", sorted(CRITERIA))
def test_criterion(number):
    report, text, seconds = _run(number)
    FIRST_RUN[number] = text
    _record(number, report, seconds)
    assert report["passed"], report["summary"]


def test_criterion_10():
    start = time.perf_counter()
    differing = []
    for number in sorted(CRITERIA):
        first = FIRST_RUN.get(number) or _run(number)[1]
        if _run(number)[1] != first:
            differing.append(number)
    report = {"passed": not differing,
              "summary": f"criteria 1-9 rerun, {'all reports identical' if not differing else f'differ: {differing}'}"}
    _record(10, report, time.perf_counter() - start)
    assert report["passed"], report["summary"]
