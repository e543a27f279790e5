"""JSON documents for tables and reports, CSV for residual tables.

Floats are written with ``repr`` precision by the json module, so every
document round-trips bit for bit.  Keys are sorted for stable output.
"""
from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .base_dynamics import n_words, parse_word, word_str, encode
from .cocycles import Cocycle, Section
from .errors import ConfigError
from .geometry import get_model
from .livsic import RealTable

SCHEMA_VERSION = 1


def _clean(obj):
    """Convert numpy scalars and non-finite floats into JSON-safe values."""
    if isinstance(obj, dict):
        return {str(k): _clean(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_clean(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [_clean(v) for v in obj.tolist()]
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        x = float(obj)
        if math.isnan(x):
            return "nan"
        if math.isinf(x):
            return "inf" if x > 0 else "-inf"
        return x
    return obj


def dumps(obj) -> str:
    return json.dumps(_clean(obj), sort_keys=True, indent=2) + "\n"


def write_json(path, obj) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(dumps(obj))
    return path


def read_json(path):
    try:
        return json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise ConfigError(f"cannot read JSON document {path}: {exc}") from exc


def write_csv(path, header, rows) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([repr(v) if isinstance(v, float) else v for v in row])
    path.write_text(buf.getvalue())
    return path


def _words(m: int, depth: int):
    L = 2 * depth + 1
    return [word_str(c, L, m) for c in range(n_words(m, depth))]


def _check(doc, kind):
    if not isinstance(doc, dict) or doc.get("kind") != kind:
        raise ConfigError(f"expected a {kind!r} document")
    if doc.get("schema_version") != SCHEMA_VERSION:
        raise ConfigError(f"unsupported schema version {doc.get('schema_version')!r}")


def _entries(doc, m, depth, convert):
    entries = doc["entries"]
    if len(entries) != n_words(m, depth):
        raise ConfigError(f"table has {len(entries)} entries, expected {n_words(m, depth)}")
    out = [None] * n_words(m, depth)
    for word, value in entries.items():
        w = parse_word(word, m)
        if len(w) != 2 * depth + 1 or any(not 0 <= s < m for s in w):
            raise ConfigError(f"bad word {word!r} for depth {depth}, alphabet {m}")
        out[encode(w, m)] = convert(value)
    return out


def cocycle_to_json(A: Cocycle) -> dict:
    model = A.model
    return {
        "schema_version": SCHEMA_VERSION, "kind": "cocycle", "model": model.name,
        "alphabet": A.m, "depth": A.depth,
        "entries": dict(zip(_words(A.m, A.depth), (model.isometry_to_json(g) for g in A.entries))),
    }


def cocycle_from_json(doc) -> Cocycle:
    _check(doc, "cocycle")
    model = get_model(doc["model"])
    m, depth = int(doc["alphabet"]), int(doc["depth"])
    return Cocycle(model.name, m, depth, tuple(_entries(doc, m, depth, model.isometry_from_json)))


def section_to_json(s: Section) -> dict:
    model = s.model
    conv = {"boundary": model.boundary_to_json, "interior": model.point_to_json, "real": float}[s.kind]
    return {
        "schema_version": SCHEMA_VERSION, "kind": "section", "section_kind": s.kind,
        "model": model.name, "alphabet": s.m, "depth": s.depth,
        "entries": dict(zip(_words(s.m, s.depth), (conv(v) for v in s.values))),
    }


def section_from_json(doc) -> Section:
    _check(doc, "section")
    model = get_model(doc["model"])
    kind = doc["section_kind"]
    if kind not in ("boundary", "interior"):
        raise ConfigError(f"unknown section kind {kind!r}")
    conv = model.boundary_from_json if kind == "boundary" else model.point_from_json
    m, depth = int(doc["alphabet"]), int(doc["depth"])
    return Section(m, depth, tuple(_entries(doc, m, depth, conv)), kind, model.name)


def real_table_to_json(t: RealTable) -> dict:
    return {
        "schema_version": SCHEMA_VERSION, "kind": "real_table", "alphabet": t.m, "depth": t.depth,
        "entries": dict(zip(_words(t.m, t.depth), (float(v) for v in t.values))),
    }


def real_table_from_json(doc) -> RealTable:
    _check(doc, "real_table")
    m, depth = int(doc["alphabet"]), int(doc["depth"])
    return RealTable(m, depth, np.array(_entries(doc, m, depth, float)))


def reduction_result_to_json(result, provenance: dict | None = None) -> dict:
    """Sections as word maps plus the residual and provenance blocks."""
    model = result.s.model
    return {
        "schema_version": SCHEMA_VERSION, "kind": "reduction_result", "model": model.name,
        "depth": result.depth,
        "sections": {
            "interior": section_to_json(result.s),
            "alpha": section_to_json(result.alpha),
            "beta": section_to_json(result.beta),
            "u": real_table_to_json(result.u.u),
            "phi": real_table_to_json(result.phi.table),
        },
        "residuals": {
            "invariance": result.invariance.max_residual,
            "invariance_worst_transition": result.invariance.worst_transition,
            "livsic": result.u.residual.max_residual,
            "error_budget": result.error_budget,
        },
        "livsic": result.u.summary(),
        "provenance": {
            "base_point": model.point_to_json(result.p),
            "h0": model.point_to_json(result.h0),
            **(provenance or {}),
        },
    }


__all__ = [
    "SCHEMA_VERSION", "dumps", "write_json", "read_json", "write_csv",
    "cocycle_to_json", "cocycle_from_json", "section_to_json", "section_from_json",
    "real_table_to_json", "real_table_from_json", "reduction_result_to_json",
]
