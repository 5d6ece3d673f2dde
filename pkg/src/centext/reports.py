"""Serialization of library results: human table, JSON document, CSV.

Every number is an exact integer or a rational written "p/q"; floats are
rejected.  Documents are JSON with sorted keys, so equal results give
byte-identical output.
"""
from __future__ import annotations

import csv
import io
import json
from fractions import Fraction

from .groups import GroupValue, KValue
from .hhs.axioms import AxiomReport
from .hhs.transform import QuotientResult, RestrictResult

FORMATS = ("table", "doc", "csv")


def plain(obj):
    """Convert a result into JSON-ready data with exact numbers."""
    if isinstance(obj, bool) or obj is None or isinstance(obj, str):
        return obj
    if isinstance(obj, int):
        return obj
    if isinstance(obj, Fraction):
        return obj.numerator if obj.denominator == 1 else f"{obj.numerator}/{obj.denominator}"
    if isinstance(obj, float):
        raise TypeError(f"floating point value {obj!r} in a report")
    if isinstance(obj, KValue):
        return int(obj) if len(obj.coords) == 1 else list(obj.coords)
    if isinstance(obj, GroupValue):
        return repr(obj)
    if isinstance(obj, AxiomReport):
        return axiom_report_doc(obj)
    if isinstance(obj, RestrictResult):
        return restrict_doc(obj)
    if isinstance(obj, QuotientResult):
        return quotient_doc(obj)
    if isinstance(obj, dict):
        return {str(k): plain(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple, set, frozenset)):
        items = sorted(obj, key=repr) if isinstance(obj, (set, frozenset)) else obj
        return [plain(v) for v in items]
    if hasattr(obj, "__int__"):
        return int(obj)
    return repr(obj)


def _witness_doc(m_labels, witness):
    if witness is None:
        return None
    return [plain(w) for w in witness]


def axiom_report_doc(rep: AxiomReport) -> dict:
    return {
        "model": rep.model,
        "delta": rep.delta,
        "variant": rep.variant,
        "passed": rep.passed,
        "axioms": [
            {"index": r.index, "name": r.name, "passed": r.passed, "witness": _witness_doc(None, r.witness),
             "measured_delta": r.measured}
            for r in rep.results
        ],
        "theta": {str(k): v for k, v in sorted((rep.theta or {}).items())},
        "passing_up": {str(k): v for k, v in sorted((rep.passing_up or {}).items())},
    }


def restrict_doc(res: RestrictResult) -> dict:
    return {
        "kept": res.kept,
        "dropped": res.dropped,
        "threshold": res.threshold,
        "delta": res.delta,
        "passing_up_adjusted": {str(k): v for k, v in sorted(res.passing_up.items())},
        "report": axiom_report_doc(res.report),
        "passed": res.report.passed,
    }


def quotient_doc(res: QuotientResult) -> dict:
    return {
        "points": len(res.model.point_labels),
        "orbit_diameters": res.orbit_diameters,
        "B": res.B,
        "delta": res.delta,
        "delta_prime": res.delta_prime,
        "passes_at_delta": res.report_at_delta.passed,
        "report": axiom_report_doc(res.report_at_delta_prime),
        "passed": res.report_at_delta_prime.passed,
    }


def _rows(doc: dict):
    for key in ("rows", "axioms", "checks"):
        if isinstance(doc.get(key), list) and doc[key] and all(isinstance(r, dict) for r in doc[key]):
            return key, doc[key]
    if isinstance(doc.get("report"), dict):
        return _rows(doc["report"])
    return None, None


def _cell(v) -> str:
    if isinstance(v, (dict, list)):
        return json.dumps(v, sort_keys=True)
    if v is None:
        return ""
    return str(v)


def render(result, fmt: str = "table") -> str:
    doc = plain(result)
    if fmt == "doc":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    key, rows = _rows(doc) if isinstance(doc, dict) else (None, None)
    if fmt == "csv":
        out = io.StringIO()
        w = csv.writer(out, lineterminator="\n")
        if rows:
            cols = list(rows[0].keys())
            w.writerow(cols)
            for r in rows:
                w.writerow([_cell(r.get(c)) for c in cols])
        else:
            w.writerow(["field", "value"])
            for k in sorted(doc):
                w.writerow([k, _cell(doc[k])])
        return out.getvalue()
    if fmt != "table":
        raise ValueError(f"unknown format {fmt!r}")
    lines = []
    for k in sorted(doc):
        if k != key and not (rows and k == "report"):
            lines.append(f"{k}: {_cell(doc[k])}")
    if rows:
        cols = list(rows[0].keys())
        cells = [[_cell(r.get(c)) for c in cols] for r in rows]
        widths = [max(len(c), *(len(row[i]) for row in cells)) for i, c in enumerate(cols)]
        lines.append("")
        lines.append("  ".join(c.ljust(wd) for c, wd in zip(cols, widths)).rstrip())
        for row in cells:
            lines.append("  ".join(v.ljust(wd) for v, wd in zip(row, widths)).rstrip())
    return "\n".join(lines) + "\n"
