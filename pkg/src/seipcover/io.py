"""Text formats: JSON instances, optimum sidecars and certificates; CSV traces, prices, audits.

Rationals are written as integers when whole and as ``"p/q"`` strings in
lowest terms otherwise.
"""

from __future__ import annotations

import csv
import io
import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable

from .analysis import AuditRow, PathCertificate, PathStep, PriceAuditReport
from .core import SetCoverInstance, Solution, as_rational
from .generators import KnownOptimum
from .solvers.trace import TraceRecord


class FormatError(ValueError):
    """A file does not follow the expected layout."""


def rational_to_json(value: Fraction):
    value = Fraction(value)
    return value.numerator if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def rational_from_json(value) -> Fraction:
    try:
        return as_rational(value)
    except (TypeError, ValueError, ZeroDivisionError) as exc:
        raise FormatError(f"bad rational {value!r}: {exc}") from None


# -- instances --------------------------------------------------------------

def instance_to_text(instance: SetCoverInstance) -> str:
    """Canonical form: sets in input order, one per line, sorted elements."""
    lines = [
        "{",
        f'  "n": {instance.n},',
        f'  "name": {json.dumps(instance.name)},',
        '  "sets": [',
    ]
    body = []
    for elems, w in zip(instance.sets, instance.weights):
        body.append(
            f'    {{"elements": {json.dumps(list(elems))}, "weight": {json.dumps(rational_to_json(w))}}}'
        )
    lines.append(",\n".join(body))
    lines += ["  ]", "}"]
    return "\n".join(lines) + "\n"


def instance_from_dict(data: dict) -> SetCoverInstance:
    try:
        n = data["n"]
        sets = data["sets"]
        name = data.get("name", "instance")
    except (KeyError, TypeError) as exc:
        raise FormatError(f"instance is missing field {exc}") from None
    if not isinstance(n, int) or isinstance(n, bool):
        raise FormatError("field n must be an integer")
    elems, weights = [], []
    for i, entry in enumerate(sets):
        try:
            es = entry["elements"]
            w = entry["weight"]
        except (KeyError, TypeError):
            raise FormatError(f"set {i} needs 'elements' and 'weight'") from None
        if not isinstance(es, list) or not all(isinstance(e, int) and not isinstance(e, bool) for e in es):
            raise FormatError(f"set {i}: elements must be a list of integers")
        if isinstance(w, float):
            raise FormatError(f"set {i}: weight must be an integer or a 'p/q' string")
        elems.append(es)
        weights.append(rational_from_json(w))
    try:
        return SetCoverInstance.from_sets(n, elems, weights, name=str(name))
    except ValueError as exc:
        raise FormatError(str(exc)) from None


def read_instance(path) -> SetCoverInstance:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None
    return instance_from_dict(data)


def write_instance(instance: SetCoverInstance, path) -> None:
    Path(path).write_text(instance_to_text(instance))


# -- optimum sidecar ----------------------------------------------------------

def optimum_path(instance_path) -> Path:
    p = Path(instance_path)
    return p.with_name(p.name + ".opt")


def optimum_to_text(opt: KnownOptimum) -> str:
    data = {
        "value": rational_to_json(opt.value),
        "sets": [
            {"index": i, "elements": list(s), "weight": rational_to_json(w)}
            for s, i, w in zip(opt.sets, opt.set_indices, opt.weights)
        ],
    }
    return json.dumps(data, indent=2) + "\n"


def write_optimum(opt: KnownOptimum, path) -> None:
    Path(path).write_text(optimum_to_text(opt))


def read_optimum(path) -> KnownOptimum:
    """Read a sidecar; a bare ``{"value": ...}`` yields just the value (see read_opt_value)."""
    data = _load_json(path)
    try:
        entries = data["sets"]
        opt = KnownOptimum(
            tuple(tuple(e["elements"]) for e in entries),
            tuple(e["index"] for e in entries),
            tuple(rational_from_json(e["weight"]) for e in entries),
        )
    except (KeyError, TypeError, IndexError) as exc:
        raise FormatError(f"{path}: malformed optimum sidecar ({exc})") from None
    except ValueError as exc:
        raise FormatError(f"{path}: {exc}") from None
    if "value" in data and rational_from_json(data["value"]) != opt.value:
        raise FormatError(f"{path}: value does not match the planted sets")
    return opt


def read_opt_value(path) -> Fraction:
    data = _load_json(path)
    if "value" not in data:
        raise FormatError(f"{path}: no 'value' field")
    return rational_from_json(data["value"])


def _load_json(path):
    try:
        return json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise FormatError(f"{path}: not valid JSON ({exc})") from None


# -- traces and prices --------------------------------------------------------

TRACE_HEADER = [
    "step", "algorithm", "event", "cardinality", "cost_num", "cost_den",
    "solution_bits_hex", "parent_cardinality", "population_digest",
]
PRICE_HEADER = ["element", "price_num", "price_den"]


def write_trace(records: Iterable[TraceRecord], path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(TRACE_HEADER)
        for r in records:
            w.writerow([
                r.step, r.algorithm, r.event, r.cardinality, r.cost.numerator, r.cost.denominator,
                format(r.bits, "x"), "" if r.parent_cardinality is None else r.parent_cardinality, r.digest,
            ])


def read_trace(path) -> list[TraceRecord]:
    out = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or list(reader.fieldnames)[:7] != TRACE_HEADER[:7]:
            raise FormatError(f"{path}: unexpected trace header {reader.fieldnames}")
        try:
            for row in reader:
                parent = row.get("parent_cardinality") or ""
                out.append(TraceRecord(
                    step=int(row["step"]),
                    algorithm=row["algorithm"],
                    event=row["event"],
                    cardinality=int(row["cardinality"]),
                    cost=Fraction(int(row["cost_num"]), int(row["cost_den"])),
                    bits=int(row["solution_bits_hex"], 16),
                    parent_cardinality=int(parent) if parent else None,
                    digest=row.get("population_digest") or "",
                ))
        except (ValueError, KeyError, ZeroDivisionError) as exc:
            raise FormatError(f"{path}: bad trace row ({exc})") from None
    return out


def write_prices(prices: dict, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(PRICE_HEADER)
        for e in sorted(prices):
            p = Fraction(prices[e])
            w.writerow([e, p.numerator, p.denominator])


def read_prices(path) -> dict[int, Fraction]:
    out = {}
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if list(reader.fieldnames or []) != PRICE_HEADER:
            raise FormatError(f"{path}: unexpected price header")
        try:
            for row in reader:
                out[int(row["element"])] = Fraction(int(row["price_num"]), int(row["price_den"]))
        except (ValueError, ZeroDivisionError) as exc:
            raise FormatError(f"{path}: bad price row ({exc})") from None
    return out


# -- certificates and audits --------------------------------------------------

def certificate_to_text(cert: PathCertificate) -> str:
    data = {
        "gap": cert.gap,
        "opt_value": rational_to_json(cert.opt_value),
        "steps": [
            {"plus": s.y_plus.indices(), "minus": s.y_minus.indices(), "ratio": rational_to_json(r)}
            for s, r in zip(cert.steps, cert.ratios)
        ],
    }
    return json.dumps(data, indent=2) + "\n"


def certificate_from_dict(data: dict, m: int) -> PathCertificate:
    try:
        steps = tuple(
            PathStep(Solution.from_indices(s["plus"], m), Solution.from_indices(s["minus"], m))
            for s in data["steps"]
        )
        ratios = tuple(rational_from_json(s["ratio"]) for s in data["steps"])
        gap = int(data["gap"])
        opt = rational_from_json(data["opt_value"])
    except (KeyError, TypeError, IndexError, ValueError) as exc:
        raise FormatError(f"malformed certificate ({exc})") from None
    return PathCertificate(steps, gap, ratios, opt)


def read_certificate(path, m: int) -> PathCertificate:
    return certificate_from_dict(_load_json(path), m)


AUDIT_HEADER = ["element", "step", "price_num", "price_den", "uncovered_in_column",
                "bound_num", "bound_den", "status"]


def audit_rows_csv(report: PriceAuditReport) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AUDIT_HEADER)
    for r in report.rows:
        w.writerow([r.element, r.step, r.price.numerator, r.price.denominator, r.uncovered_in_column,
                    r.bound.numerator, r.bound.denominator, r.status])
    return buf.getvalue()


def audit_to_text(report: PriceAuditReport) -> str:
    data = {
        "passed": report.passed,
        "total_price": rational_to_json(report.total_price),
        "solution_cost": rational_to_json(report.solution_cost),
        "errors": report.errors,
        "rows": [
            {"element": r.element, "step": r.step, "price": rational_to_json(r.price),
             "uncovered_in_column": r.uncovered_in_column, "bound": rational_to_json(r.bound),
             "status": r.status}
            for r in report.rows
        ],
    }
    return json.dumps(data, indent=2) + "\n"


def audit_from_text(text: str) -> PriceAuditReport:
    data = json.loads(text)
    rep = PriceAuditReport(
        rows=[AuditRow(r["element"], r["step"], rational_from_json(r["price"]), r["uncovered_in_column"],
                       rational_from_json(r["bound"]), r["status"]) for r in data["rows"]],
        total_price=rational_from_json(data["total_price"]),
        solution_cost=rational_from_json(data["solution_cost"]),
        errors=list(data["errors"]),
    )
    return rep
