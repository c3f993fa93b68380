"""DOT rendering of configurations, G_Ei graphs and decorated graphs."""

from __future__ import annotations

from .classify import DecoratedGraph
from .dualgraph import Configuration, ExceptionalDivisor, id_key

STAGES = ("x", "s", "ei", "decorated")


def _quote(text: str) -> str:
    return '"' + text.replace('"', r'\"') + '"'


def _edge_lines(config: Configuration, keep: set[str] | None = None) -> list[str]:
    lines = []
    for (a, b), w in sorted(config.edges.items(), key=lambda kv: (id_key(kv[0][0]), id_key(kv[0][1]))):
        if keep is not None and (a not in keep or b not in keep):
            continue
        attr = f" [label={w}]" if w != 1 else ""
        lines.append(f"  {_quote(a)} -- {_quote(b)}{attr};")
    return lines


def config_dot(config: Configuration, name: str = "X") -> str:
    """Chain curves are filled, other curves are circles; labels carry C^2."""
    chain_ids = config.chain_curve_ids
    lines = [f"graph {name} {{", "  node [fontsize=10];"]
    for cid in config.sorted_ids():
        c = config.curves[cid]
        label = f"{cid}\\n{c.self_int}"
        if c.node_count:
            label += f"\\nnodes {c.node_count}"
        style = "shape=ellipse, style=filled, fillcolor=lightgray" if cid in chain_ids else "shape=circle"
        lines.append(f"  {_quote(cid)} [label={_quote(label)}, {style}];")
    lines += _edge_lines(config)
    lines.append("}")
    return "\n".join(lines) + "\n"


def ei_dot(config: Configuration, e: ExceptionalDivisor) -> str:
    """G_Ei: boxes for chain curves in E_i, circles for other curves of E_i,
    filled dots for chain curves outside E_i on the chains it touches."""
    pos = {c: k for k, ids in enumerate(config.tchains) for c in ids}
    touched = set()
    for c in e.support:
        if c in pos:
            touched.add(pos[c])
        touched.update(pos[o] for o in config.neighbors(c) if o in pos)
    keep = set(e.support) | {c for k in touched for c in config.tchains[k]}
    lines = [f"graph E{e.index} {{", "  node [fontsize=10];"]
    for cid in sorted(keep, key=id_key):
        c = config.curves[cid]
        coef = e.coefficients.get(cid)
        if cid in pos and coef:
            shape = "shape=box"
        elif coef:
            shape = "shape=circle"
        else:
            shape = "shape=point, width=0.15"
        label = f"{cid}\\n{c.self_int}" + (f"\\nx{coef}" if coef and coef != 1 else "")
        lines.append(f"  {_quote(cid)} [label={_quote(label)}, {shape}];")
    lines += _edge_lines(config, keep)
    lines.append("}")
    return "\n".join(lines) + "\n"


def decorated_dot(config: Configuration, graph: DecoratedGraph) -> str:
    lines = ["graph decorated {", "  node [fontsize=10];"]
    for k, data in enumerate(config.chain_data):
        label = f"T{k + 1}\\n{list(data.chain)}\\nr-d={data.r_minus_d}"
        lines.append(f"  {_quote(f'T{k + 1}')} [label={_quote(label)}, shape=ellipse];")
    for e in sorted(graph.edges + graph.loops, key=lambda e: (e.u, e.v, e.source)):
        lines.append(f"  {_quote(f'T{e.u + 1}')} -- {_quote(f'T{e.v + 1}')} "
                     f"[label={_quote(f'{e.kind} w={e.weight} (E{e.source})')}];")
    lines.append("}")
    return "\n".join(lines) + "\n"
