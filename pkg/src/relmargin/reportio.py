"""Byte-stable report serialization.

JSON artifacts use sorted keys and floats rounded to 12 significant
digits, so identical inputs serialize to identical bytes regardless of
thread count or platform.  CSV emitters share the same float formatting.
"""

from __future__ import annotations

import csv
import io
import json
import math

import numpy as np

from .errors import InputError
from .hypotheses import Hypothesis, margins
from .samples import LabeledSample

__all__ = [
    "format_float",
    "canonical",
    "canonical_json",
    "report_csv",
    "export_margins_csv",
]


def format_float(x: float) -> str:
    return f"{x:.12g}"


def _round12(x: float) -> float:
    return float(format_float(x))


def canonical(obj):
    """Recursively normalize a report object for byte-stable serialization."""
    if obj is None or isinstance(obj, (bool, str)):
        return obj
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        x = float(obj)
        if math.isnan(x):
            raise InputError("reports must not contain NaN")
        if math.isinf(x):
            # overflowed closed forms stay explicit rather than breaking JSON
            return "Infinity" if x > 0 else "-Infinity"
        return _round12(x)
    if isinstance(obj, dict):
        return {str(k): canonical(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [canonical(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [canonical(v) for v in obj.tolist()]
    if hasattr(obj, "to_json"):
        return canonical(obj.to_json())
    raise InputError(f"cannot serialize object of type {type(obj)!r}")


def canonical_json(obj) -> str:
    return json.dumps(canonical(obj), sort_keys=True, indent=2) + "\n"


def _csv_cell(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, float):
        return format_float(v)
    return str(v)


def _write_rows(header, rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([_csv_cell(v) for v in row])
    return buf.getvalue()


def report_csv(data: dict) -> str:
    """CSV rendering of a serialized report, keyed by its schema tag."""
    schema = data.get("schema", "")
    if schema == "relmargin/bound-report/v1":
        p = data["params"]
        header = [
            "family",
            "m",
            "delta",
            "alpha",
            "rho",
            "empirical_term",
            "complexity_term",
            "bound_value",
            "solver",
            "complexity_method",
            "vacuous",
            "clamped",
        ]
        row = [
            data["family"],
            p["m"],
            p["delta"],
            p["alpha"],
            p["rho"],
            data["empirical_term"],
            data["complexity_term"],
            data["bound_value"],
            data["solver"],
            data["complexity_method"],
            data["vacuous"],
            data["clamped"],
        ]
        return _write_rows(header, [row])
    if schema == "relmargin/validity-report/v1":
        header = ["family", "trial", "emp", "complexity", "bound", "true_risk", "violated"]
        return _write_rows(header, data["rows"])
    if schema == "relmargin/tightness-report/v1":
        keys = ["m", "rho", "emp", "beta", "beta_prime", "new_bound", "old_bound", "new_smaller"]
        rows = [[r.get(k, "") for k in keys] for r in data["rows"]]
        return _write_rows(keys, rows)
    if schema == "relmargin/complexity-estimate/v1":
        header = ["value", "method", "trials", "seed", "stderr"]
        row = [
            data["value"],
            data["method"],
            ";".join(str(t) for t in data["trials"]),
            "" if data.get("seed") is None else data["seed"],
            "" if data.get("stderr") is None else data["stderr"],
        ]
        return _write_rows(header, [row])
    # generic fallback: flattened key/value rows
    rows = []

    def flatten(prefix, value):
        if isinstance(value, dict):
            for k in sorted(value):
                flatten(f"{prefix}.{k}" if prefix else str(k), value[k])
        elif isinstance(value, (list, tuple)):
            rows.append([prefix, ";".join(_csv_cell(canonical(v)) for v in value)])
        else:
            rows.append([prefix, _csv_cell(value)])

    flatten("", canonical(data))
    return _write_rows(["key", "value"], rows)


def export_margins_csv(h: Hypothesis, sample: LabeledSample, transform) -> str:
    """Per-example export with the fixed header ``index,margin,loss``."""
    u = margins(h, sample)
    losses = transform(u)
    rows = [[i, float(u[i]), float(losses[i])] for i in range(sample.m)]
    return _write_rows(["index", "margin", "loss"], rows)
