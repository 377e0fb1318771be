"""Shared request/response schema for the CLI and the HTTP service.

Both front ends parse requests and serialize results through this module, so
identical inputs produce byte-identical JSON regardless of entry point. All
payloads are plain dicts of JSON-native types; key insertion order is the
wire order (results lead with the headline number, then echo the inputs).
"""
from __future__ import annotations

import csv
import io
import json
from dataclasses import replace

from .design import RandomizationSchedule, build_design
from .errors import FieldError, ValidationError
from .power import PowerCalcResult, SampleSizeResult
from .trends import TrendSpec, build_curve, validate_curve

__all__ = [
    "dump_json",
    "parse_design",
    "parse_samplesize_request",
    "parse_power_request",
    "samplesize_result_payload",
    "power_result_payload",
    "trend_preview_payload",
    "history_entry",
    "history_to_csv",
    "HISTORY_CSV_COLUMNS",
]


def dump_json(payload) -> str:
    """Canonical JSON: compact separators, insertion order, no NaN/Inf."""
    return json.dumps(payload, separators=(",", ":"), allow_nan=False)


def _fail(code: str, field: str, message: str) -> ValidationError:
    return ValidationError(FieldError(code, field, message))


def _require_dict(obj, where: str) -> dict:
    if not isinstance(obj, dict):
        raise _fail("invalid_type", where, f"{where} must be a JSON object")
    return obj


def _reject_unknown(obj: dict, allowed: set, where: str) -> None:
    unknown = sorted(set(obj) - allowed)
    if unknown:
        raise _fail("unexpected_field", f"{where}.{unknown[0]}",
                    f"unknown field(s) {', '.join(unknown)} in {where}")


def _num(obj: dict, key: str, where: str, required: bool = True):
    if key not in obj or obj[key] is None:
        if required:
            raise _fail("missing_field", f"{where}.{key}", f"{where}.{key} is required")
        return None
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise _fail("invalid_type", f"{where}.{key}", f"{where}.{key} must be a number")
    return float(v)


def _int(obj: dict, key: str, where: str, required: bool = True):
    if key not in obj or obj[key] is None:
        if required:
            raise _fail("missing_field", f"{where}.{key}", f"{where}.{key} is required")
        return None
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise _fail("invalid_type", f"{where}.{key}", f"{where}.{key} must be an integer")
    return v


def _prefixed(exc: ValidationError, prefix: str) -> ValidationError:
    return ValidationError([
        replace(e, field=f"{prefix}.{e.field}" if e.field else prefix)
        for e in exc.errors])


def _parse_trend(obj, where: str, role: str) -> tuple[TrendSpec, dict]:
    obj = _require_dict(obj, where)
    _reject_unknown(obj, {"kind", "average", "initial", "changing_point"}, where)
    kind = obj.get("kind")
    if not isinstance(kind, str):
        raise _fail("missing_field", f"{where}.kind",
                    f"{where}.kind must be one of constant, linear, quadratic")
    average = _num(obj, "average", where)
    initial = _num(obj, "initial", where, required=False)
    changing_point = _num(obj, "changing_point", where, required=False)
    try:
        spec = TrendSpec(kind=kind, average=average, initial=initial,
                         changing_point=changing_point, role=role)
    except ValidationError as exc:
        raise _prefixed(exc, where) from None
    canon = {"kind": kind, "average": average}
    if initial is not None:
        canon["initial"] = initial
    if changing_point is not None:
        canon["changing_point"] = changing_point
    return spec, canon


def _parse_randomization(obj, where: str, resolve_token=None):
    """Returns (RandomizationSchedule, canonical dict). CSV tokens are
    resolved to their stored schedule and echoed in resolved form, so a
    token-based request and the equivalent inline request serialize
    identically."""
    if isinstance(obj, (int, float)) and not isinstance(obj, bool):
        sched = RandomizationSchedule(mode="constant", values=float(obj))
        return sched, {"mode": "constant", "values": float(obj)}
    obj = _require_dict(obj, where)
    if "csv_token" in obj:
        _reject_unknown(obj, {"csv_token"}, where)
        token = obj["csv_token"]
        sched = resolve_token(token) if resolve_token else None
        if sched is None:
            raise _fail("unknown_token", f"{where}.csv_token",
                        "randomization CSV token is unknown or expired")
    else:
        _reject_unknown(obj, {"mode", "values"}, where)
        mode = obj.get("mode")
        if mode not in ("constant", "per_day", "per_time"):
            raise _fail("invalid_mode", f"{where}.mode",
                        f"{where}.mode must be constant, per_day or per_time")
        values = obj.get("values")
        if mode == "constant":
            if isinstance(values, bool) or not isinstance(values, (int, float)):
                raise _fail("invalid_type", f"{where}.values",
                            f"{where}.values must be a number for constant mode")
            values = float(values)
        else:
            if not isinstance(values, list) or not values or any(
                    isinstance(v, bool) or not isinstance(v, (int, float))
                    for v in values):
                raise _fail("invalid_type", f"{where}.values",
                            f"{where}.values must be a non-empty array of numbers")
            values = [float(v) for v in values]
        sched = RandomizationSchedule(mode=mode, values=values)
    canon_values = (sched.values if isinstance(sched.values, float)
                    else [float(v) for v in sched.values])
    return sched, {"mode": sched.mode, "values": canon_values}


def parse_design(obj, where: str = "design", resolve_token=None):
    """Validate a design payload and build the StudyDesign.

    Returns (design, canonical_dict); the canonical dict is stored as the
    design's input echo."""
    obj = _require_dict(obj, where)
    _reject_unknown(
        obj, {"days", "per_day", "randomization", "availability", "effect"}, where)
    days = _int(obj, "days", where)
    per_day = _int(obj, "per_day", where)
    if "randomization" not in obj:
        raise _fail("missing_field", f"{where}.randomization",
                    f"{where}.randomization is required")
    if "availability" not in obj:
        raise _fail("missing_field", f"{where}.availability",
                    f"{where}.availability is required")
    if "effect" not in obj:
        raise _fail("missing_field", f"{where}.effect",
                    f"{where}.effect is required")
    sched, canon_r = _parse_randomization(
        obj["randomization"], f"{where}.randomization", resolve_token)
    avail, canon_a = _parse_trend(obj["availability"], f"{where}.availability",
                                  "availability")
    effect, canon_e = _parse_trend(obj["effect"], f"{where}.effect", "effect")
    canon = {"days": days, "per_day": per_day, "randomization": canon_r,
             "availability": canon_a, "effect": canon_e}
    try:
        design = build_design(days=days, per_day=per_day, randomization=sched,
                              availability=avail, effect=effect, inputs=canon)
    except ValidationError as exc:
        raise _prefixed(exc, where) from None
    return design, canon


def parse_samplesize_request(body, resolve_token=None):
    body = _require_dict(body, "request")
    _reject_unknown(body, {"design", "alpha0", "target_power"}, "request")
    if "design" not in body:
        raise _fail("missing_field", "design", "design is required")
    design, canon_design = parse_design(body["design"], resolve_token=resolve_token)
    alpha0 = _num(body, "alpha0", "request", required=False)
    alpha0 = 0.05 if alpha0 is None else alpha0
    target = _num(body, "target_power", "request")
    canon = {"design": canon_design, "alpha0": alpha0, "target_power": target}
    return design, alpha0, target, canon


def parse_power_request(body, resolve_token=None):
    body = _require_dict(body, "request")
    _reject_unknown(body, {"design", "alpha0", "n"}, "request")
    if "design" not in body:
        raise _fail("missing_field", "design", "design is required")
    design, canon_design = parse_design(body["design"], resolve_token=resolve_token)
    alpha0 = _num(body, "alpha0", "request", required=False)
    alpha0 = 0.05 if alpha0 is None else alpha0
    n = _int(body, "n", "request")
    canon = {"design": canon_design, "alpha0": alpha0, "n": n}
    return design, alpha0, n, canon


def samplesize_result_payload(res: SampleSizeResult, inputs: dict) -> dict:
    return {"n": int(res.n), "power_at_n": float(res.power_at_n),
            "warnings": list(res.warnings), "inputs": inputs}


def power_result_payload(res: PowerCalcResult, inputs: dict) -> dict:
    return {"power": float(res.power), "n": int(res.n), "inputs": inputs}


def trend_preview_payload(spec: TrendSpec, days: int) -> dict:
    """Day curve plus the three plot series (null at zero, the elicited
    average, the alternative itself)."""
    curve = build_curve(spec, days)
    errs = validate_curve(curve, spec.role)
    if errs:
        raise ValidationError(errs)
    vals = [float(v) for v in curve.values]
    return {
        "role": spec.role,
        "days": list(range(1, days + 1)),
        "null": [0.0] * days,
        "average": [float(spec.average)] * days,
        "alternative": vals,
    }


def history_entry(kind: str, timestamp: str, result: dict) -> dict:
    return {"kind": kind, "timestamp": timestamp, "result": result}


HISTORY_CSV_COLUMNS = [
    "result", "n", "power", "alpha0", "target_power",
    "days", "per_day", "randomization_mode", "randomization_values",
    "availability_kind", "availability_average", "availability_initial",
    "availability_changing_point",
    "effect_kind", "effect_average", "effect_initial", "effect_changing_point",
    "warnings",
]


def _trend_cells(trend: dict) -> list:
    return [trend["kind"], trend["average"],
            trend.get("initial", ""), trend.get("changing_point", "")]


def history_to_csv(entries) -> str:
    """Flat table of session results, headline result first, then inputs."""
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(HISTORY_CSV_COLUMNS)
    for entry in entries:
        res = entry["result"]
        inputs = res["inputs"]
        design = inputs["design"]
        rand = design["randomization"]
        rand_values = (rand["values"] if isinstance(rand["values"], float)
                       else ";".join(str(v) for v in rand["values"]))
        if entry["kind"] == "samplesize":
            headline, n, power = res["n"], res["n"], res["power_at_n"]
            target = inputs["target_power"]
            warnings = ";".join(w["code"] for w in res.get("warnings", []))
        else:
            headline, n, power = res["power"], res["n"], res["power"]
            target = ""
            warnings = ""
        writer.writerow(
            [headline, n, power, inputs["alpha0"], target,
             design["days"], design["per_day"], rand["mode"], rand_values]
            + _trend_cells(design["availability"])
            + _trend_cells(design["effect"])
            + [warnings])
    return buf.getvalue()
