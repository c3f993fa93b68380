"""Reading and writing configuration files (JSON)."""

from __future__ import annotations

import json
from pathlib import Path
from typing import Any

from .dualgraph import Configuration, InputError, build_configuration, chain_curve_id, id_key

AMBIENT_KEYS = {"chi", "p_g", "multiple_fibers", "fiber_degree_counts"}


def config_from_dict(raw: dict[str, Any]) -> Configuration:
    try:
        ks2 = raw["ks2"]
        tchains = raw["tchains"]
    except KeyError as exc:
        raise InputError(f"missing field {exc.args[0]!r}") from None
    if not isinstance(ks2, int) or isinstance(ks2, bool):
        raise InputError("ks2 must be an integer")
    if not isinstance(tchains, list) or not all(isinstance(c, list) for c in tchains):
        raise InputError("tchains must be a list of integer lists")
    extra = []
    for item in raw.get("extra_curves", []):
        if not isinstance(item, dict) or "id" not in item or "self" not in item:
            raise InputError(f"bad extra curve entry {item!r}")
        extra.append((str(item["id"]), int(item["self"])))
    edges = []
    for item in raw.get("edges", []):
        if not isinstance(item, list) or len(item) not in (2, 3):
            raise InputError(f"bad edge entry {item!r}")
        a, b, *w = item
        edges.append((str(a), str(b), int(w[0]) if w else 1))
    ambient = raw.get("ambient")
    if ambient is not None:
        unknown = set(ambient) - AMBIENT_KEYS
        if unknown:
            raise InputError(f"unknown ambient fields {sorted(unknown)}")
    return build_configuration(ks2, tchains, extra, edges, bool(raw.get("ks_nef", True)), ambient)


def load_config(path: str | Path) -> Configuration:
    try:
        raw = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise InputError(f"{path}: invalid JSON ({exc})") from None
    if not isinstance(raw, dict):
        raise InputError(f"{path}: top level must be an object")
    return config_from_dict(raw)


def config_to_dict(config: Configuration) -> dict[str, Any]:
    """Inverse of config_from_dict for configurations on X."""
    chain_ids = config.chain_curve_ids
    internal = {
        tuple(sorted((chain_curve_id(k, j), chain_curve_id(k, j + 1)), key=id_key))
        for k, ids in enumerate(config.tchains, start=1) for j in range(1, len(ids))
    }
    out: dict[str, Any] = {
        "ks2": config.ks2,
        "ks_nef": config.ks_nef,
        "tchains": [list(d.chain) for d in config.chain_data],
        "extra_curves": [
            {"id": c, "self": config.curves[c].self_int} for c in config.curves if c not in chain_ids
        ],
        "edges": [[a, b, w] for (a, b), w in sorted(config.edges.items(), key=lambda kv: (id_key(kv[0][0]), id_key(kv[0][1])))
                  if (a, b) not in internal],
    }
    if config.ambient is not None:
        out["ambient"] = dict(config.ambient)
    return out
