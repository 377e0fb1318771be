"""Command-line front door: sample size, power, scenario batches, serve.

Exit codes: 0 success, 2 validation failure (the message is the same JSON
error payload the service returns), 64 usage errors (unknown flags, missing
subcommand). JSON output is byte-identical to the service response for the
same inputs.
"""
from __future__ import annotations

import argparse
import csv
import json
import os
import sys

from . import payloads, scenarios
from .design import parse_probability_csv
from .errors import FieldError, SampleSizeCapError, ValidationError
from .power import PowerCalcResult, power_at, solve_sample_size

__all__ = ["main", "build_parser"]

EX_VALIDATION = 2
EX_USAGE = 64


class _Parser(argparse.ArgumentParser):
    """argparse exits with 2 on bad flags; the CLI contract wants 64."""

    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{self.prog}: error: {message}\n")


def _add_design_flags(sub: argparse.ArgumentParser) -> None:
    sub.add_argument("--days", type=int, help="study length in days (D)")
    sub.add_argument("--per-day", type=int, dest="per_day",
                     help="decision times per day (K)")
    sub.add_argument("--prob", type=float,
                     help="constant randomization probability")
    sub.add_argument("--rand-csv", dest="rand_csv",
                     help="CSV file of randomization probabilities "
                          "(header: index,probability)")
    sub.add_argument("--rand-mode", dest="rand_mode", choices=["day", "time"],
                     default="day",
                     help="whether --rand-csv rows are per day or per "
                          "decision time (default: day)")
    sub.add_argument("--avail", choices=["constant", "linear", "quadratic"],
                     help="availability trend class")
    sub.add_argument("--avail-avg", type=float, dest="avail_avg",
                     help="average expected availability")
    sub.add_argument("--avail-init", type=float, dest="avail_init",
                     help="initial availability (linear/quadratic trends)")
    sub.add_argument("--avail-peak-day", type=float, dest="avail_peak_day",
                     help="day of maximum/minimum availability (quadratic)")
    sub.add_argument("--effect", choices=["constant", "linear", "quadratic"],
                     help="proximal effect trend class")
    sub.add_argument("--effect-avg", type=float, dest="effect_avg",
                     help="average standardized proximal effect")
    sub.add_argument("--effect-init", type=float, dest="effect_init",
                     help="initial standardized effect (linear/quadratic)")
    sub.add_argument("--effect-peak-day", type=float, dest="effect_peak_day",
                     help="day of maximum/minimum effect (quadratic)")
    sub.add_argument("--alpha", type=float, default=0.05,
                     help="significance level (default 0.05)")
    sub.add_argument("--format", choices=["table", "csv", "json"],
                     default="table", help="output format (default table)")
    sub.add_argument("--output", help="write output to this path instead of stdout")


def build_parser() -> _Parser:
    parser = _Parser(prog="mrtpower",
                     description="Sample size and power for micro-randomized trials")
    subs = parser.add_subparsers(dest="command", required=True)

    ss = subs.add_parser("samplesize", parents=[], add_help=True,
                         help="minimum N for a target power")
    _add_design_flags(ss)
    ss.add_argument("--power", type=float, dest="target_power",
                    help="target power to achieve")

    pw = subs.add_parser("power", help="achievable power at a given N")
    _add_design_flags(pw)
    pw.add_argument("--n", type=int, help="number of participants")

    sim = subs.add_parser("simulate", help="run a JSON scenario batch")
    sim.add_argument("scenarios", help="scenario JSON file")
    sim.add_argument("--seed", type=int, default=None,
                     help="override every scenario's seed")
    sim.add_argument("--workers", type=int, default=1,
                     help="parallel workers (results independent of this)")
    sim.add_argument("--format", choices=["table", "csv", "json"],
                     default="csv", help="output format (default csv)")
    sim.add_argument("--output", help="write output to this path instead of stdout")

    srv = subs.add_parser("serve", help="run the HTTP service")
    srv.add_argument("--host", default=os.environ.get("MRTPOWER_HOST", "127.0.0.1"))
    srv.add_argument("--port", type=int,
                     default=int(os.environ.get("MRTPOWER_PORT", "8000")))
    return parser


def _require(value, field: str, message: str):
    if value is None:
        raise ValidationError(FieldError("missing_field", field, message))
    return value


def _design_body(args) -> dict:
    if args.rand_csv is not None:
        days = _require(args.days, "design.days", "--days is required")
        per_day = _require(args.per_day, "design.per_day", "--per-day is required")
        try:
            with open(args.rand_csv, "rb") as fh:
                data = fh.read()
        except OSError as exc:
            raise ValidationError(FieldError(
                "io_error", "design.randomization",
                f"cannot read --rand-csv file: {exc}")) from None
        schedule = parse_probability_csv(
            data, mode="per_day" if args.rand_mode == "day" else "per_time",
            days=days, per_day=per_day)
        randomization = {"mode": schedule.mode,
                         "values": [float(v) for v in schedule.values]}
    else:
        randomization = {"mode": "constant",
                         "values": _require(args.prob, "design.randomization",
                                            "--prob or --rand-csv is required")}

    def trend(kind, avg, init, peak, flag_prefix, field):
        body = {"kind": _require(kind, f"{field}.kind",
                                 f"--{flag_prefix} is required"),
                "average": _require(avg, f"{field}.average",
                                    f"--{flag_prefix}-avg is required")}
        if init is not None:
            body["initial"] = init
        if peak is not None:
            body["changing_point"] = peak
        return body

    return {
        "days": _require(args.days, "design.days", "--days is required"),
        "per_day": _require(args.per_day, "design.per_day", "--per-day is required"),
        "randomization": randomization,
        "availability": trend(args.avail, args.avail_avg, args.avail_init,
                              args.avail_peak_day, "avail", "design.availability"),
        "effect": trend(args.effect, args.effect_avg, args.effect_init,
                        args.effect_peak_day, "effect", "design.effect"),
    }


def _emit(text: str, output: str | None) -> None:
    if output:
        with open(output, "w", encoding="utf-8") as fh:
            fh.write(text if text.endswith("\n") else text + "\n")
    else:
        sys.stdout.write(text if text.endswith("\n") else text + "\n")


def _render_result(kind: str, payload: dict, fmt: str) -> str:
    if fmt == "json":
        return payloads.dump_json(payload)
    entry = payloads.history_entry(kind, "", payload)
    if fmt == "csv":
        return payloads.history_to_csv([entry])
    # table: result-first rows of name/value pairs
    csv_text = payloads.history_to_csv([entry]).splitlines()
    names = csv_text[0].split(",")
    values = next(iter(csv.reader([csv_text[1]])))
    width = max(len(n) for n in names)
    lines = [f"{n.ljust(width)}  {v}" for n, v in zip(names, values) if v != ""]
    return "\n".join(lines)


def _render_rows(rows: list[dict], fmt: str) -> str:
    if fmt == "json":
        return payloads.dump_json(rows)
    if fmt == "csv":
        return scenarios.rows_to_csv(rows)
    cols = scenarios.SCENARIO_CSV_COLUMNS
    table = [cols] + [[str(r[c]) for c in cols] for r in rows]
    widths = [max(len(row[i]) for row in table) for i in range(len(cols))]
    return "\n".join("  ".join(cell.ljust(w) for cell, w in zip(row, widths)).rstrip()
                     for row in table)


def _cmd_samplesize(args) -> int:
    body = {"design": _design_body(args), "alpha0": args.alpha,
            "target_power": _require(args.target_power, "target_power",
                                     "--power is required")}
    design, alpha0, target, canon = payloads.parse_samplesize_request(body)
    result = solve_sample_size(design, alpha0, target)
    payload = payloads.samplesize_result_payload(result, canon)
    _emit(_render_result("samplesize", payload, args.format), args.output)
    return 0


def _cmd_power(args) -> int:
    body = {"design": _design_body(args), "alpha0": args.alpha,
            "n": _require(args.n, "n", "--n is required")}
    design, alpha0, n, canon = payloads.parse_power_request(body)
    payload = payloads.power_result_payload(
        PowerCalcResult(power=power_at(design, alpha0, n), n=n), canon)
    _emit(_render_result("power", payload, args.format), args.output)
    return 0


def _cmd_simulate(args) -> int:
    try:
        with open(args.scenarios, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ValidationError(FieldError(
            "io_error", "scenarios", f"cannot read scenario file: {exc}")) from None
    except json.JSONDecodeError as exc:
        raise ValidationError(FieldError(
            "invalid_json", "scenarios",
            f"scenario file is not valid JSON: {exc}")) from None
    entries = scenarios.parse_scenarios(doc)
    rows = scenarios.run_batch(entries, workers=args.workers,
                               seed_override=args.seed)
    _emit(_render_rows(rows, args.format), args.output)
    return 0


def _cmd_serve(args) -> int:
    import uvicorn

    from .service import create_app
    uvicorn.run(create_app(), host=args.host, port=args.port)
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    handlers = {"samplesize": _cmd_samplesize, "power": _cmd_power,
                "simulate": _cmd_simulate, "serve": _cmd_serve}
    try:
        return handlers[args.command](args)
    except (ValidationError, SampleSizeCapError) as exc:
        sys.stderr.write(payloads.dump_json(exc.to_payload()) + "\n")
        return EX_VALIDATION


if __name__ == "__main__":
    sys.exit(main())
