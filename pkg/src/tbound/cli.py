"""Command-line entry point.

Exit status: 0 all checks pass, 1 a recorded check fails, 2 invalid input,
3 an internal identity failed.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Any, Sequence

from .bounds import global_report
from .cfrac import hj_evaluate, hj_expand, t_params_from_fraction
from .classify import ClassificationError, analyse_units, classify_contraction, classify_ei
from .configfile import load_config
from .dot import STAGES, config_dot, decorated_dot, ei_dot
from .dualgraph import EngineDefect, InputError, contract, validate_config
from .search import ScanLimits, build_optimal_config, build_optimal_example, classification_scan, starc_scan
from .tchain import enumerate_t_chains, is_t_chain

OK, FAILED, BAD_INPUT, DEFECT = 0, 1, 2, 3


def _dump(data: Any) -> None:
    print(json.dumps(data, sort_keys=True, indent=2))


def _fractions(values) -> list[str]:
    return [str(v) for v in values]


def cmd_tchain(args: argparse.Namespace) -> int:
    if args.action == "enum":
        found = enumerate_t_chains(args.max_r, args.max_entry)
        if args.json:
            _dump([{"chain": list(d.chain), "d": d.d, "n": d.n, "a": d.a, "r_minus_d": d.r_minus_d} for d in found])
            return OK
        for data in found:
            print(" ".join(map(str, data.chain)), f"d={data.d} n={data.n} a={data.a}")
        return OK
    if not args.entries:
        raise InputError("tchain check needs at least one entry")
    data = is_t_chain(args.entries)
    if data is None:
        m, q = hj_evaluate(args.entries)  # rejects entries below 2
        if args.json:
            _dump({"chain": args.entries, "m": m, "q": q, "t_chain": False})
        else:
            print(f"{args.entries} is not a T-chain (m={m}, q={q})")
        return FAILED
    out = {
        "chain": list(data.chain), "t_chain": True, "d": data.d, "n": data.n, "a": data.a,
        "m": data.params.m, "q": data.params.q, "r_minus_d": data.r_minus_d,
        "t": list(data.t_vector), "delta": _fractions(data.discrepancies), "center": sorted(data.center),
    }
    if args.json:
        _dump(out)
    else:
        print(f"chain {out['chain']}: d={data.d} n={data.n} a={data.a} (m={out['m']}, q={out['q']})")
        print(f"r-d = {data.r_minus_d}")
        print("delta = (" + ", ".join(out["delta"]) + ")")
        print("center positions:", " ".join(map(str, out["center"])))
    return OK


def cmd_hj(args: argparse.Namespace) -> int:
    chain = hj_expand(args.m, args.q)
    params = t_params_from_fraction(args.m, args.q)
    print(" ".join(map(str, chain)))
    print(f"T-singularity: d={params.d} n={params.n} a={params.a}" if params else "not a T-singularity")
    return OK


def cmd_verify(args: argparse.Namespace) -> int:
    report = global_report(load_config(args.file))
    if args.json:
        _dump(report.to_dict())
    else:
        print(f"l={report.l} m={report.m} R-D={report.R - report.D} Z={report.Z} lambda={report.lam} "
              f"K_W^2={report.kw2} K_W^2-K_S^2={report.kw2 - report.ks2}")
        for i, t in sorted(report.types.items()):
            print(f"E{i}: {t.label()}")
        for comp in report.components:
            print(f"component {[v + 1 for v in comp.vertices]}: {comp.shape}"
                  + (f" loop {comp.loop_kind}" if comp.loop_kind else ""))
        for c in report.checks:
            if c.lhs is None:
                detail = c.note
            else:
                detail = f"{c.lhs} {c.relation} {c.rhs}" + (" TIGHT" if c.tight else "") + (f" ({c.note})" if c.note else "")
            print(f"[{c.status}] {c.name}: {detail}")
    return OK if report.ok else FAILED


def cmd_classify(args: argparse.Namespace) -> int:
    config = load_config(args.file)
    valid = validate_config(config)
    if not valid.ok:
        raise InputError("; ".join(valid.errors))
    result = contract(config)
    units = analyse_units(config, result.divisors)
    by_index = {e.index: e for e in result.divisors}
    unit_types = {}
    for i in units.units:
        t = classify_ei(config, by_index[i])
        unit_types[i] = t.label() if t else None
    status = OK if all(unit_types.values()) else FAILED
    out: dict[str, Any] = {
        "m": result.invariants.m,
        "E_dot_C": {f"E{i}": p for i, p in sorted(units.products.items())},
        "unit_divisors": {f"E{i}": label for i, label in sorted(unit_types.items())},
        "maximal": [f"E{i}" for i in units.maximal],
    }
    try:
        cls = classify_contraction(result)
    except ClassificationError as exc:
        out["decorated_graph"] = {"error": str(exc)}
        status = FAILED
    else:
        out["decorated_graph"] = {
            "edges": [{"chains": [e.u + 1, e.v + 1], "weight": e.weight, "type": e.kind, "divisor": f"E{e.source}"}
                      for e in cls.graph.edges],
            "loops": [{"chain": e.u + 1, "weight": e.weight, "type": e.kind, "divisor": f"E{e.source}"}
                      for e in cls.graph.loops],
            "components": [{"chains": [v + 1 for v in c.vertices], "shape": c.shape, "loop": c.loop_kind}
                           for c in cls.components],
        }
    if args.json:
        _dump(out)
    else:
        print(f"m={out['m']}")
        for name, label in out["unit_divisors"].items():
            print(f"{name}: {label or 'unclassified'}" + (" (maximal)" if name in out["maximal"] else ""))
        graph = out["decorated_graph"]
        if "error" in graph:
            print("decorated graph:", graph["error"])
        else:
            for e in graph["edges"]:
                print(f"edge T{e['chains'][0]}-T{e['chains'][1]} weight {e['weight']} ({e['type']}, {e['divisor']})")
            for e in graph["loops"]:
                print(f"loop T{e['chain']} weight {e['weight']} ({e['type']}, {e['divisor']})")
            for c in graph["components"]:
                print(f"component {c['chains']}: {c['shape']}" + (f" loop {c['loop']}" if c["loop"] else ""))
    return status


def cmd_dot(args: argparse.Namespace) -> int:
    config = load_config(args.file)
    if args.stage == "x":
        sys.stdout.write(config_dot(config))
        return OK
    result = contract(config)
    if args.stage == "s":
        sys.stdout.write(config_dot(result.config_s, "S"))
    elif args.stage == "ei":
        units = analyse_units(config, result.divisors)
        index = args.ei if args.ei is not None else (units.maximal[0] if units.maximal else None)
        by_index = {e.index: e for e in result.divisors}
        if index not in by_index:
            raise InputError(f"no divisor E{index}; m = {result.invariants.m}")
        sys.stdout.write(ei_dot(config, by_index[index]))
    else:
        sys.stdout.write(decorated_dot(config, classify_contraction(result).graph))
    return OK


def cmd_scan(args: argparse.Namespace) -> int:
    limits = ScanLimits(max_curves=args.max_curves, max_chain_len=args.max_chain_len,
                        max_abs_self_int=args.max_abs_self_int, max_blowups=args.max_blowups, seed=args.seed,
                        max_chains=args.max_chains, max_minus_one=args.max_minus_one)
    if args.kind == "classification":
        report = classification_scan(limits, verify_engine=args.verify_engine)
    else:
        report = starc_scan(limits)
    text = report.to_json()
    if args.out:
        Path(args.out).write_text(text + "\n")
    else:
        print(text)
    if args.bundle_dir:
        root = Path(args.bundle_dir)
        root.mkdir(parents=True, exist_ok=True)
        for i, finding in enumerate(report.findings, 1):
            if "config" in finding:
                bundle = dict(finding["config"], description=f"{finding['kind']}: {finding['detail']}")
                (root / f"finding_{i:03d}.json").write_text(json.dumps(bundle, sort_keys=True, indent=2) + "\n")
    print(f"runtime {report.runtime:.1f}s", file=sys.stderr)
    return OK if report.ok else FAILED


def cmd_optimal(args: argparse.Namespace) -> int:
    if args.verify:
        example = build_optimal_example(args.n, args.l)
        report = example.report
    else:
        report = global_report(build_optimal_config(args.n, args.l))
        example = None
    rd_check = report.check("r-d bound")
    out = {
        "n": args.n, "l": args.l, "m": report.m, "R_minus_D": report.R - report.D, "Z": report.Z,
        "lambda": report.lam, "kw2_minus_ks2": report.kw2 - report.ks2,
        "chains": [{"chain": list(d.chain), "index": d.n, "a": d.a, "r": d.length, "d": d.d}
                   for d in report.contraction.config_x.chain_data],
        "r_d_bound": f"{rd_check.lhs} <= {rd_check.rhs}", "tight": rd_check.tight, "ok": report.ok,
    }
    if example is not None:
        out["ratio"] = str(example.ratio)
        out["closed_form_notes"] = list(example.mismatches)
    if args.json:
        _dump(out)
    else:
        print(f"n={args.n} l={args.l}: m={out['m']} R-D={out['R_minus_D']} Z={out['Z']} lambda={out['lambda']} "
              f"K_W^2-K_S^2={out['kw2_minus_ks2']}")
        for c in out["chains"]:
            print(f"  {c['chain']}: index {c['index']}, a {c['a']}, r {c['r']}, d {c['d']}")
        print(f"r-d bound: {out['r_d_bound']} {'TIGHT' if out['tight'] else 'not tight'}")
        if example is not None:
            print("closed forms: verified")
            print(f"ratio (R-D)/(4l dk - 2l lambda) = {out['ratio']}")
            for note in out["closed_form_notes"]:
                print(f"  note: {note}")
    return OK if report.ok else FAILED


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tbound", description="T-chain configurations and their bounds")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("tchain", help="recognise or enumerate T-chains")
    p.add_argument("action", choices=["check", "enum"])
    p.add_argument("entries", nargs="*", type=int)
    p.add_argument("--max-r", type=int, default=5)
    p.add_argument("--max-entry", type=int)
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_tchain)

    p = sub.add_parser("hj", help="continued fraction of m/q")
    p.add_argument("m", type=int)
    p.add_argument("q", type=int)
    p.set_defaults(func=cmd_hj)

    for name, func, help_text in (("verify", cmd_verify, "full bound report"),
                                  ("classify", cmd_classify, "unit divisors and the decorated graph")):
        p = sub.add_parser(name, help=help_text)
        p.add_argument("file")
        p.add_argument("--json", action="store_true")
        p.set_defaults(func=func)

    p = sub.add_parser("dot", help="Graphviz output")
    p.add_argument("file")
    p.add_argument("--stage", choices=STAGES, default="x")
    p.add_argument("--ei", type=int, help="divisor index for --stage ei (default: first maximal unit)")
    p.set_defaults(func=cmd_dot)

    p = sub.add_parser("scan", help="exhaustive scans")
    p.add_argument("kind", choices=["classification", "starc"])
    defaults = ScanLimits()
    for flag in ("max_curves", "max_chain_len", "max_abs_self_int", "max_blowups", "seed", "max_chains", "max_minus_one"):
        p.add_argument("--" + flag.replace("_", "-"), type=int, default=getattr(defaults, flag))
    p.add_argument("--verify-engine", action="store_true", help="rerun survivors through the full engine")
    p.add_argument("--out")
    p.add_argument("--bundle-dir", help="write each finding as a configuration file")
    p.set_defaults(func=cmd_scan)

    p = sub.add_parser("optimal", help="the optimal family")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--l", type=int, required=True)
    p.add_argument("--verify", action="store_true", help="assert the closed forms")
    p.add_argument("--json", action="store_true")
    p.set_defaults(func=cmd_optimal)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except EngineDefect as exc:
        print(f"internal error: {exc}", file=sys.stderr)
        return DEFECT
    except (InputError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return BAD_INPUT


if __name__ == "__main__":
    sys.exit(main())
