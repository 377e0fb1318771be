"""Wire-format tests: canonical JSON, request parsing with dotted error
paths, input echoes, and the history CSV layout."""
import json

import numpy as np
import pytest

from mrtpower.design import RandomizationSchedule
from mrtpower.errors import ValidationError
from mrtpower.payloads import (
    HISTORY_CSV_COLUMNS,
    dump_json,
    history_entry,
    history_to_csv,
    parse_design,
    parse_power_request,
    parse_samplesize_request,
    power_result_payload,
    samplesize_result_payload,
    trend_preview_payload,
)
from mrtpower.power import PowerCalcResult, SampleSizeResult
from mrtpower.trends import TrendSpec


def _design_body(**over):
    body = {
        "days": 10,
        "per_day": 5,
        "randomization": 0.5,
        "availability": {"kind": "constant", "average": 0.7},
        "effect": {"kind": "linear", "average": 0.12, "initial": 0.1},
    }
    body.update(over)
    return body


def _first(exc_info):
    err = exc_info.value.errors[0]
    return err.code, err.field


# ------------------------------------------------------------ dump_json

def test_dump_json_is_compact_and_ordered():
    s = dump_json({"b": 1, "a": [1.5, None, True], "c": "x"})
    assert s == '{"b":1,"a":[1.5,null,true],"c":"x"}'
    assert " " not in s


def test_dump_json_rejects_non_finite():
    for bad in (float("nan"), float("inf"), -float("inf")):
        with pytest.raises(ValueError):
            dump_json({"x": bad})


# ------------------------------------------------------------ parse_design

def test_parse_design_canonical_echo():
    design, canon = parse_design(_design_body())
    assert canon == {
        "days": 10, "per_day": 5,
        "randomization": {"mode": "constant", "values": 0.5},
        "availability": {"kind": "constant", "average": 0.7},
        "effect": {"kind": "linear", "average": 0.12, "initial": 0.1},
    }
    assert design.inputs == canon
    assert design.days == 10 and design.per_day == 5 and design.p == 2
    assert np.all(design.rho_t == 0.5)


def test_parse_design_scalar_randomization_echoes_as_constant_mode():
    _, canon = parse_design(_design_body(randomization=0.6))
    assert canon["randomization"] == {"mode": "constant", "values": 0.6}
    _, canon2 = parse_design(_design_body(
        randomization={"mode": "constant", "values": 0.6}))
    assert canon2 == canon


def test_parse_design_per_time_randomization():
    values = [0.3 + 0.01 * t for t in range(6)]
    design, canon = parse_design(_design_body(
        days=3, per_day=2,
        randomization={"mode": "per_time", "values": values}))
    assert canon["randomization"] == {"mode": "per_time", "values": values}
    assert np.allclose(design.rho_t, values)


def test_parse_design_dotted_error_paths():
    cases = [
        (_design_body(days=None), "missing_field", "design.days"),
        (_design_body(days=10.5), "invalid_type", "design.days"),
        ("not a dict", "invalid_type", "design"),
        (_design_body(bogus=1), "unexpected_field", "design.bogus"),
        ({k: v for k, v in _design_body().items() if k != "effect"},
         "missing_field", "design.effect"),
        (_design_body(randomization={"mode": "weekly", "values": 0.5}),
         "invalid_mode", "design.randomization.mode"),
        (_design_body(randomization={"mode": "per_day", "values": []}),
         "invalid_type", "design.randomization.values"),
        (_design_body(effect={"kind": "linear", "average": 0.1, "oops": 2}),
         "unexpected_field", "design.effect.oops"),
        (_design_body(effect={"average": 0.1}),
         "missing_field", "design.effect.kind"),
        (_design_body(availability={"kind": "constant", "average": "hi"}),
         "invalid_type", "design.availability.average"),
    ]
    for body, code, field in cases:
        with pytest.raises(ValidationError) as ei:
            parse_design(body)
        assert _first(ei) == (code, field), (code, field)


def test_parse_design_prefixes_build_errors():
    # the day-42 boundary case: quadratic from zero with changing point 21
    # dips negative, and the error arrives under the design.effect path
    body = _design_body(
        days=42,
        effect={"kind": "quadratic", "average": 0.1, "initial": 0.0,
                "changing_point": 21})
    with pytest.raises(ValidationError) as ei:
        parse_design(body)
    assert _first(ei) == ("effect_negative", "design.effect")


def test_parse_design_csv_token_resolves_and_echoes_resolved_schedule():
    sched = RandomizationSchedule(mode="per_day", values=[0.4, 0.5, 0.6])
    body = _design_body(days=3, per_day=2,
                        randomization={"csv_token": "tok1"})
    design, canon = parse_design(
        body, resolve_token=lambda t: sched if t == "tok1" else None)
    assert canon["randomization"] == {"mode": "per_day", "values": [0.4, 0.5, 0.6]}
    assert np.allclose(design.rho_t, [0.4, 0.4, 0.5, 0.5, 0.6, 0.6])
    # the echo carries no trace of the token, so a token request and the
    # equivalent inline request serialize identically
    _, inline = parse_design(_design_body(
        days=3, per_day=2,
        randomization={"mode": "per_day", "values": [0.4, 0.5, 0.6]}))
    assert canon == inline


def test_parse_design_unknown_or_unresolvable_token():
    body = _design_body(randomization={"csv_token": "zzz"})
    with pytest.raises(ValidationError) as ei:
        parse_design(body, resolve_token=lambda t: None)
    assert _first(ei) == ("unknown_token", "design.randomization.csv_token")
    with pytest.raises(ValidationError) as ei:
        parse_design(body)  # no resolver at all
    assert _first(ei) == ("unknown_token", "design.randomization.csv_token")
    with pytest.raises(ValidationError) as ei:
        parse_design(_design_body(
            randomization={"csv_token": "z", "mode": "constant"}))
    assert _first(ei) == ("unexpected_field", "design.randomization.mode")


# ------------------------------------------------------------ requests

def test_parse_samplesize_request_defaults_and_canon():
    design, alpha0, target, canon = parse_samplesize_request(
        {"design": _design_body(), "target_power": 0.8})
    assert alpha0 == 0.05 and target == 0.8
    assert list(canon) == ["design", "alpha0", "target_power"]
    assert canon["alpha0"] == 0.05
    assert design.T == 50


def test_parse_power_request_defaults_and_canon():
    design, alpha0, n, canon = parse_power_request(
        {"design": _design_body(), "n": 25, "alpha0": 0.1})
    assert alpha0 == 0.1 and n == 25
    assert list(canon) == ["design", "alpha0", "n"]


def test_request_level_errors():
    with pytest.raises(ValidationError) as ei:
        parse_samplesize_request({"target_power": 0.8})
    assert _first(ei) == ("missing_field", "design")
    with pytest.raises(ValidationError) as ei:
        parse_samplesize_request({"design": _design_body()})
    assert _first(ei) == ("missing_field", "request.target_power")
    with pytest.raises(ValidationError) as ei:
        parse_power_request({"design": _design_body(), "n": 10, "mode": "x"})
    assert _first(ei) == ("unexpected_field", "request.mode")
    with pytest.raises(ValidationError) as ei:
        parse_power_request({"design": _design_body(), "n": 9.5})
    assert _first(ei) == ("invalid_type", "request.n")
    with pytest.raises(ValidationError) as ei:
        parse_power_request([1, 2])
    assert _first(ei) == ("invalid_type", "request")


# ------------------------------------------------------------ result payloads

def test_result_payload_wire_order():
    ss = samplesize_result_payload(
        SampleSizeResult(n=12, power_at_n=0.83,
                         warnings=[{"code": "sample_size_floor",
                                    "message": "floored"}], inputs={}),
        {"alpha0": 0.05})
    assert list(ss) == ["n", "power_at_n", "warnings", "inputs"]
    assert ss["n"] == 12 and ss["warnings"][0]["code"] == "sample_size_floor"
    assert ss["inputs"] == {"alpha0": 0.05}
    pw = power_result_payload(
        PowerCalcResult(power=0.42, n=20, inputs={}), {"n": 20})
    assert list(pw) == ["power", "n", "inputs"]
    assert pw["power"] == 0.42 and pw["inputs"] == {"n": 20}
    # both payloads are JSON-native end to end
    json.loads(dump_json(ss))
    json.loads(dump_json(pw))


# ------------------------------------------------------------ trend preview

def test_trend_preview_series():
    spec = TrendSpec(kind="linear", average=0.2, initial=0.1, role="effect")
    payload = trend_preview_payload(spec, 5)
    assert list(payload) == ["role", "days", "null", "average", "alternative"]
    assert payload["role"] == "effect"
    assert payload["days"] == [1, 2, 3, 4, 5]
    assert payload["null"] == [0.0] * 5
    assert payload["average"] == [0.2] * 5
    assert payload["alternative"] == pytest.approx([0.1, 0.15, 0.2, 0.25, 0.3])


def test_trend_preview_rejects_invalid_curve():
    spec = TrendSpec(kind="quadratic", average=0.1, initial=0.0,
                     changing_point=21.0, role="effect")
    with pytest.raises(ValidationError) as ei:
        trend_preview_payload(spec, 42)
    assert ei.value.errors[0].code == "effect_negative"


# ------------------------------------------------------------ history CSV

def _sample_entries():
    ss_inputs = {
        "design": {
            "days": 42, "per_day": 5,
            "randomization": {"mode": "constant", "values": 0.5},
            "availability": {"kind": "constant", "average": 0.7},
            "effect": {"kind": "quadratic", "average": 0.1, "initial": 0.0,
                       "changing_point": 29.0},
        },
        "alpha0": 0.05, "target_power": 0.8,
    }
    pw_inputs = {
        "design": {
            "days": 3, "per_day": 2,
            "randomization": {"mode": "per_day", "values": [0.4, 0.5, 0.6]},
            "availability": {"kind": "linear", "average": 0.7, "initial": 0.8},
            "effect": {"kind": "constant", "average": 0.12},
        },
        "alpha0": 0.1, "n": 30,
    }
    return [
        history_entry("samplesize", "2026-08-14T12:00:00Z", {
            "n": 10, "power_at_n": 0.8388,
            "warnings": [{"code": "sample_size_floor", "message": "m"}],
            "inputs": ss_inputs}),
        history_entry("power", "2026-08-14T12:01:00Z", {
            "power": 0.42, "n": 30, "inputs": pw_inputs}),
    ]


def test_history_entry_shape():
    e = history_entry("power", "t0", {"power": 0.5})
    assert e == {"kind": "power", "timestamp": "t0", "result": {"power": 0.5}}


def test_history_to_csv_golden():
    got = history_to_csv(_sample_entries())
    expected = (
        ",".join(HISTORY_CSV_COLUMNS) + "\r\n"
        "10,10,0.8388,0.05,0.8,42,5,constant,0.5,"
        "constant,0.7,,,quadratic,0.1,0.0,29.0,sample_size_floor\r\n"
        "0.42,30,0.42,0.1,,3,2,per_day,0.4;0.5;0.6,"
        "linear,0.7,0.8,,constant,0.12,,,\r\n"
    )
    assert got == expected


def test_history_to_csv_empty_is_header_only():
    assert history_to_csv([]) == ",".join(HISTORY_CSV_COLUMNS) + "\r\n"
