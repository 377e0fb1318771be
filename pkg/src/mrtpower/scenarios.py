"""Scenario batch files: JSON in, empirical-vs-analytic power table out.

A scenario file is a JSON array (or {"scenarios": [...]}) of entries
{design, model, n, alpha0, replications, seed, correction}; the output table
mirrors the simulation-table layout: D, K, Z (effect polynomial order),
d_bar, estimated_power (analytic), empirical_power, se.
"""
from __future__ import annotations

import csv
import io

import numpy as np

from .errors import FieldError, ValidationError
from .payloads import _int, _num, _prefixed, _require_dict, _reject_unknown, parse_design
from .power import power_at
from .simulate import GenerativeModel, run_scenario

__all__ = ["SCENARIO_CSV_COLUMNS", "parse_scenarios", "run_batch", "rows_to_csv"]

SCENARIO_CSV_COLUMNS = ["D", "K", "Z", "d_bar",
                        "estimated_power", "empirical_power", "se"]

_MODEL_KEYS = {"error_law", "rho_corr", "effect_shape", "variance_trend",
               "ratio", "seed"}


def _parse_model(obj, where: str) -> GenerativeModel:
    obj = _require_dict(obj, where)
    _reject_unknown(obj, _MODEL_KEYS, where)
    kwargs = {k: obj[k] for k in _MODEL_KEYS if k in obj}
    try:
        return GenerativeModel(**kwargs)
    except ValidationError as exc:
        raise _prefixed(exc, where) from None


def parse_scenarios(doc, resolve_token=None) -> list[dict]:
    """Validate a scenario document into runnable entries."""
    if isinstance(doc, dict) and set(doc) == {"scenarios"}:
        doc = doc["scenarios"]
    if not isinstance(doc, list) or not doc:
        raise ValidationError(FieldError(
            "invalid_type", "scenarios",
            "scenario file must be a non-empty JSON array of scenario objects"))
    entries = []
    for i, raw in enumerate(doc):
        where = f"scenarios[{i}]"
        raw = _require_dict(raw, where)
        _reject_unknown(raw, {"design", "model", "n", "alpha0",
                              "replications", "seed", "correction"}, where)
        if "design" not in raw:
            raise ValidationError(FieldError(
                "missing_field", f"{where}.design", f"{where}.design is required"))
        design, _ = parse_design(raw["design"], where=f"{where}.design",
                                 resolve_token=resolve_token)
        model = _parse_model(raw.get("model", {}), f"{where}.model")
        n = _int(raw, "n", where)
        alpha0 = _num(raw, "alpha0", where, required=False)
        replications = _int(raw, "replications", where, required=False)
        seed = _int(raw, "seed", where, required=False)
        correction = raw.get("correction", "md")
        entries.append({
            "design": design,
            "model": model,
            "n": n,
            "alpha0": 0.05 if alpha0 is None else alpha0,
            "replications": 1000 if replications is None else replications,
            "seed": seed,
            "correction": correction,
        })
    return entries


def run_batch(entries, workers: int = 1, seed_override: int | None = None) -> list[dict]:
    """Run every scenario; one output row per scenario."""
    rows = []
    for entry in entries:
        design = entry["design"]
        seed = seed_override if seed_override is not None else entry["seed"]
        result = run_scenario(
            design, entry["model"], entry["n"], alpha0=entry["alpha0"],
            replications=entry["replications"], seed=seed,
            correction=entry["correction"], workers=workers)
        rows.append({
            "D": design.days,
            "K": design.per_day,
            "Z": design.p - 1,
            "d_bar": float(np.mean(design.effect_curve_t())),
            "estimated_power": power_at(design, entry["alpha0"], entry["n"]),
            "empirical_power": result.empirical_power,
            "se": result.se,
        })
    return rows


def rows_to_csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf)
    writer.writerow(SCENARIO_CSV_COLUMNS)
    for row in rows:
        writer.writerow([row[c] for c in SCENARIO_CSV_COLUMNS])
    return buf.getvalue()
