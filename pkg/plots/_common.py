"""Shared plumbing for the figure scripts: schema-checked readers, CLI."""
import argparse
import json
import os

import matplotlib

matplotlib.use("Agg")

PNG_METADATA = {"Software": "bohmdirac-plots"}


class SchemaMismatch(Exception):
    """Input file does not carry the documented columns/records."""


def read_csv(path, required_columns):
    """Header-checked CSV reader -> dict of float column arrays."""
    if not os.path.exists(path):
        raise SchemaMismatch(f"input file {path} does not exist")
    with open(path) as fh:
        lines = [ln.strip() for ln in fh if ln.strip()]
    if not lines:
        raise SchemaMismatch(f"{path}: empty file")
    header = lines[0].split(",")
    missing = [c for c in required_columns if c not in header]
    if missing:
        raise SchemaMismatch(f"{path}: missing columns {missing} (have {header})")
    if len(lines) < 2:
        raise SchemaMismatch(f"{path}: no data rows")
    cols = {h: [] for h in header}
    for ln in lines[1:]:
        parts = ln.split(",")
        if len(parts) != len(header):
            raise SchemaMismatch(f"{path}: ragged row {ln!r}")
        for h, v in zip(header, parts):
            cols[h].append(float(v))
    return {h: _as_array(v) for h, v in cols.items()}, header


def _as_array(values):
    import numpy as np
    return np.asarray(values)


def read_json(path, required_keys):
    if not os.path.exists(path):
        raise SchemaMismatch(f"input file {path} does not exist")
    with open(path) as fh:
        try:
            obj = json.load(fh)
        except json.JSONDecodeError as exc:
            raise SchemaMismatch(f"{path}: not valid JSON ({exc})") from None
    missing = [k for k in required_keys if k not in obj]
    if missing:
        raise SchemaMismatch(f"{path}: missing keys {missing}")
    return obj


def standard_parser(description):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--input", required=True, help="input data file")
    p.add_argument("--output", required=True, help="image file to write")
    return p


def save(fig, path):
    fig.savefig(path, dpi=130, metadata=PNG_METADATA if path.endswith(".png") else None)
    return path
