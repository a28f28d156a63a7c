"""Deterministic artifact writers.

Every float is rendered with %.17g so identical runs produce byte-identical
CSV and JSON files; JSON objects are emitted with sorted keys through a
small local serializer (the stdlib encoder does not honor a fixed float
format).
"""
from __future__ import annotations

import hashlib
import os

import numpy as np


def fmt(x) -> str:
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    if isinstance(x, (int, np.integer)):
        return str(int(x))
    if isinstance(x, (float, np.floating)):
        if np.isnan(x):
            return "NaN"
        return "%.17g" % float(x)
    return str(x)


def write_csv(path: str, header, rows):
    with open(path, "w") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(fmt(v) for v in row) + "\n")
    return path


def _json_escape(s: str) -> str:
    out = []
    for ch in s:
        if ch in '"\\':
            out.append("\\" + ch)
        elif ord(ch) < 0x20:
            out.append("\\u%04x" % ord(ch))
        else:
            out.append(ch)
    return "".join(out)


def json_dumps(obj, indent: int = 0) -> str:
    pad = " " * indent

    def render(o, depth):
        sp = pad * depth
        sp1 = pad * (depth + 1)
        nl = "\n" if indent else ""
        if o is None:
            return "null"
        if isinstance(o, (bool, np.bool_)):
            return "true" if o else "false"
        if isinstance(o, (int, np.integer)):
            return str(int(o))
        if isinstance(o, (float, np.floating)):
            if np.isnan(o):
                return '"NaN"'
            if np.isinf(o):
                return '"Infinity"' if o > 0 else '"-Infinity"'
            return "%.17g" % float(o)
        if isinstance(o, str):
            return f'"{_json_escape(o)}"'
        if isinstance(o, np.ndarray):
            o = o.tolist()
        if isinstance(o, (list, tuple)):
            if not o:
                return "[]"
            inner = ("," + nl).join(sp1 + render(v, depth + 1) for v in o)
            return "[" + nl + inner + nl + sp + "]"
        if isinstance(o, dict):
            if not o:
                return "{}"
            items = sorted(o.items(), key=lambda kv: str(kv[0]))
            inner = ("," + nl).join(
                f'{sp1}"{_json_escape(str(k))}": {render(v, depth + 1)}'
                for k, v in items)
            return "{" + nl + inner + nl + sp + "}"
        raise TypeError(f"cannot serialize {type(o)!r}")

    return render(obj, 0) + ("\n" if indent else "")


def write_json(path: str, obj) -> str:
    with open(path, "w") as fh:
        fh.write(json_dumps(obj, indent=2))
    return path


def scenario_hash(config_text: str) -> str:
    return hashlib.sha256(config_text.encode()).hexdigest()


def write_manifest(out_dir: str, *, scenario_name: str, config_text: str, seed,
                   outputs, checks) -> str:
    """checks: list of {name, passed, value, bound} dicts; exit gate is all-passed."""
    from . import __version__
    manifest = {
        "schema_version": 1,
        "scenario": scenario_name,
        "scenario_hash": scenario_hash(config_text),
        "version": __version__,
        "seed": seed,
        "outputs": sorted(os.path.basename(p) for p in outputs),
        "checks": checks,
        "all_passed": all(c.get("passed", False) for c in checks) if checks else True,
    }
    return write_json(os.path.join(out_dir, "manifest.json"), manifest)
