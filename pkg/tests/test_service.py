"""HTTP API tests: session lifecycle, history and export byte-identity,
field-addressed errors, CSV upload tokens, and TTL expiry."""
import time

import pytest
from fastapi.testclient import TestClient

from mrtpower.payloads import dump_json, history_to_csv
from mrtpower.power import power_at, solve_sample_size
from mrtpower.payloads import parse_power_request, power_result_payload
from mrtpower.service import SESSION_COOKIE, create_app


def _client(**kwargs):
    return TestClient(create_app(**kwargs), base_url="http://test")


def _design_body(**over):
    body = {
        "days": 10,
        "per_day": 5,
        "randomization": 0.5,
        "availability": {"kind": "constant", "average": 0.7},
        "effect": {"kind": "constant", "average": 0.12},
    }
    body.update(over)
    return body


def _power_body(**over):
    return {"design": _design_body(), "n": 20, **over}


CSV_PER_DAY = "index,probability\n1,0.4\n2,0.5\n3,0.6\n"


# ------------------------------------------------------------ sessions

def test_first_request_creates_session_cookie_and_header():
    client = _client()
    r = client.post("/v1/power", json=_power_body())
    assert r.status_code == 200
    token = r.headers["X-Session-Token"]
    assert client.cookies.get(SESSION_COOKIE) == token
    # cookie now rides along: same session, no fresh Set-Cookie
    r2 = client.get("/v1/history")
    assert r2.headers["X-Session-Token"] == token
    assert "set-cookie" not in r2.headers
    assert len(r2.json()["entries"]) == 1


def test_header_token_works_without_cookies():
    client = _client()
    r = client.post("/v1/power", json=_power_body())
    token = r.headers["X-Session-Token"]
    client.cookies.clear()
    r2 = client.get("/v1/history", headers={"X-Session-Token": token})
    assert r2.headers["X-Session-Token"] == token
    assert len(r2.json()["entries"]) == 1


def test_unknown_token_gets_fresh_empty_session():
    client = _client()
    r = client.get("/v1/history", headers={"X-Session-Token": "bogus"})
    assert r.status_code == 200
    assert r.json() == {"entries": []}
    assert r.headers["X-Session-Token"] != "bogus"


def test_session_ttl_expiry_rotates_token():
    client = _client(session_ttl=0.05)
    r = client.post("/v1/power", json=_power_body())
    old = r.headers["X-Session-Token"]
    time.sleep(0.12)
    client.cookies.clear()
    r2 = client.get("/v1/history", headers={"X-Session-Token": old})
    assert r2.headers["X-Session-Token"] != old
    assert r2.json() == {"entries": []}


# ------------------------------------------------------------ compute routes

def test_power_route_matches_library_byte_for_byte():
    client = _client()
    body = _power_body()
    r = client.post("/v1/power", json=body)
    assert r.status_code == 200
    assert r.headers["content-type"] == "application/json"
    design, alpha0, n, canon = parse_power_request(body)
    expected = power_at(design, alpha0, n)
    from mrtpower.power import PowerCalcResult
    payload = power_result_payload(PowerCalcResult(power=expected, n=n), canon)
    assert r.content == dump_json(payload).encode()
    assert r.json()["power"] == pytest.approx(expected, abs=1e-15)
    assert r.json()["inputs"]["alpha0"] == 0.05


def test_samplesize_route_matches_library():
    client = _client()
    body = {"design": _design_body(days=42, per_day=5, effect={
        "kind": "quadratic", "average": 0.1, "initial": 0.0,
        "changing_point": 29}), "target_power": 0.8}
    r = client.post("/v1/samplesize", json=body)
    assert r.status_code == 200
    got = r.json()
    assert list(got) == ["n", "power_at_n", "warnings", "inputs"]
    from mrtpower.payloads import parse_samplesize_request
    design, alpha0, target, _ = parse_samplesize_request(body)
    res = solve_sample_size(design, alpha0, target)
    assert got["n"] == res.n
    assert got["power_at_n"] == pytest.approx(res.power_at_n, abs=1e-15)


def test_error_requests_do_not_touch_history():
    client = _client()
    client.post("/v1/power", json=_power_body())
    r = client.post("/v1/power", json={"design": "nope", "n": 10})
    assert r.status_code == 400
    r = client.get("/v1/history")
    assert len(r.json()["entries"]) == 1


def test_history_records_kinds_in_order():
    client = _client()
    client.post("/v1/power", json=_power_body())
    client.post("/v1/samplesize",
                json={"design": _design_body(), "target_power": 0.8})
    entries = client.get("/v1/history").json()["entries"]
    assert [e["kind"] for e in entries] == ["power", "samplesize"]
    for e in entries:
        assert set(e) == {"kind", "timestamp", "result"}
        assert e["timestamp"].endswith("Z")


# ------------------------------------------------------------ errors

def test_invalid_json_body_is_400():
    client = _client()
    r = client.post("/v1/power", content=b"{not json",
                    headers={"Content-Type": "application/json"})
    assert r.status_code == 400
    err = r.json()["error"]
    assert err["code"] == "invalid_json"
    assert err["fields"][0]["field"] == "body"


def test_field_errors_carry_dotted_paths():
    client = _client()
    r = client.post("/v1/power", json={
        "design": _design_body(days=42, effect={
            "kind": "quadratic", "average": 0.1, "initial": 0.0,
            "changing_point": 21}),
        "n": 20})
    assert r.status_code == 400
    err = r.json()["error"]
    assert err["code"] == "effect_negative"
    f = err["fields"][0]
    assert f["field"] == "design.effect"
    assert 42 in f["detail"]["days"]


def test_solver_cap_is_422_with_power_at_cap():
    client = _client()
    r = client.post("/v1/samplesize", json={
        "design": _design_body(effect={"kind": "constant", "average": 1e-4}),
        "target_power": 0.8})
    assert r.status_code == 422
    err = r.json()["error"]
    assert err["code"] == "cap_exceeded"
    assert err["cap"] == 10000
    assert 0.0 < err["power_at_cap"] < 0.8


def test_unknown_route_is_404():
    client = _client()
    assert client.get("/v1/nope").status_code == 404


# ------------------------------------------------------------ trend preview

def test_trend_preview_happy_path():
    client = _client()
    r = client.get("/v1/trend/preview", params={
        "kind": "linear", "average": 0.2, "initial": 0.1, "days": 5})
    assert r.status_code == 200
    got = r.json()
    assert got["role"] == "effect"
    assert got["null"] == [0.0] * 5
    assert got["average"] == [0.2] * 5
    assert got["alternative"] == pytest.approx([0.1, 0.15, 0.2, 0.25, 0.3])


def test_trend_preview_rejects_negative_effect_curve():
    client = _client()
    r = client.get("/v1/trend/preview", params={
        "kind": "quadratic", "average": 0.1, "initial": 0.0,
        "changing_point": 21, "days": 42})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "effect_negative"


def test_trend_preview_param_errors():
    client = _client()
    r = client.get("/v1/trend/preview",
                   params={"role": "slope", "days": 5, "average": 0.1,
                           "kind": "constant"})
    assert r.status_code == 400 and r.json()["error"]["code"] == "invalid_role"
    r = client.get("/v1/trend/preview", params={"kind": "constant",
                                                "average": 0.1})
    assert r.status_code == 400 and r.json()["error"]["code"] == "missing_field"
    r = client.get("/v1/trend/preview",
                   params={"kind": "constant", "days": 5, "average": "abc"})
    assert r.status_code == 400 and r.json()["error"]["code"] == "invalid_type"


# ------------------------------------------------------------ CSV upload

def test_csv_upload_and_token_flow():
    client = _client()
    r = client.post("/v1/randomization-csv",
                    params={"mode": "day", "days": 3, "per_day": 2},
                    content=CSV_PER_DAY.encode(),
                    headers={"Content-Type": "text/csv"})
    assert r.status_code == 200
    got = r.json()
    assert got["mode"] == "per_day" and got["count"] == 3
    assert got["preview"] == [
        {"index": 1, "probability": 0.4},
        {"index": 2, "probability": 0.5},
        {"index": 3, "probability": 0.6},
    ]
    token = got["token"]
    body = {"design": _design_body(days=3, per_day=2,
                                   randomization={"csv_token": token}),
            "n": 20}
    r2 = client.post("/v1/power", json=body)
    assert r2.status_code == 200
    assert r2.json()["inputs"]["design"]["randomization"] == {
        "mode": "per_day", "values": [0.4, 0.5, 0.6]}


def test_csv_upload_multipart_and_preview_truncation():
    client = _client()
    rows = "".join(f"{i},0.5\n" for i in range(1, 15))
    r = client.post("/v1/randomization-csv",
                    params={"mode": "time", "days": 7, "per_day": 2},
                    files={"file": ("rand.csv",
                                    ("index,probability\n" + rows).encode(),
                                    "text/csv")})
    assert r.status_code == 200
    got = r.json()
    assert got["mode"] == "per_time" and got["count"] == 14
    assert len(got["preview"]) == 10
    assert got["preview"][-1] == {"index": 10, "probability": 0.5}


def test_csv_upload_errors():
    client = _client()
    r = client.post("/v1/randomization-csv",
                    params={"mode": "weekly", "days": 3, "per_day": 2},
                    content=CSV_PER_DAY.encode())
    assert r.status_code == 400 and r.json()["error"]["code"] == "invalid_mode"
    r = client.post("/v1/randomization-csv", params={"mode": "day"},
                    content=CSV_PER_DAY.encode())
    assert r.status_code == 400 and r.json()["error"]["code"] == "missing_field"
    bad = "index,probability\n1,0.4\n1,0.5\n3,0.6\n"
    r = client.post("/v1/randomization-csv",
                    params={"mode": "day", "days": 3, "per_day": 2},
                    content=bad.encode())
    assert r.status_code == 400
    err = r.json()["error"]
    assert err["code"] == "csv_duplicate_index"
    assert err["fields"][0]["detail"] == {"line": 3, "index": 1}
    r = client.post("/v1/randomization-csv",
                    params={"mode": "day", "days": 3, "per_day": 2},
                    files={})
    assert r.status_code == 400


def test_csv_token_expires_with_ttl():
    client = _client(session_ttl=0.05)
    r = client.post("/v1/randomization-csv",
                    params={"mode": "day", "days": 3, "per_day": 2},
                    content=CSV_PER_DAY.encode())
    token = r.json()["token"]
    time.sleep(0.12)
    body = {"design": _design_body(days=3, per_day=2,
                                   randomization={"csv_token": token}),
            "n": 20}
    r2 = client.post("/v1/power", json=body)
    assert r2.status_code == 400
    assert r2.json()["error"]["code"] == "unknown_token"


# ------------------------------------------------------------ export

def test_history_export_csv_bytes_match_library():
    client = _client()
    client.post("/v1/power", json=_power_body())
    client.post("/v1/samplesize",
                json={"design": _design_body(), "target_power": 0.8})
    entries = client.get("/v1/history").json()["entries"]
    r = client.get("/v1/history/export", params={"format": "csv"})
    assert r.status_code == 200
    assert r.headers["content-type"].startswith("text/csv")
    assert r.headers["Content-Disposition"] == \
        'attachment; filename="mrtpower-history.csv"'
    assert r.content == history_to_csv(entries).encode()


def test_history_export_json_bytes_match_library():
    client = _client()
    client.post("/v1/power", json=_power_body())
    entries = client.get("/v1/history").json()["entries"]
    r = client.get("/v1/history/export", params={"format": "json"})
    assert r.status_code == 200
    assert r.headers["Content-Disposition"] == \
        'attachment; filename="mrtpower-history.json"'
    assert r.content == dump_json({"entries": entries}).encode()


def test_history_export_default_is_csv_and_bad_format_rejected():
    client = _client()
    r = client.get("/v1/history/export")
    assert r.headers["content-type"].startswith("text/csv")
    r = client.get("/v1/history/export", params={"format": "xml"})
    assert r.status_code == 400
    assert r.json()["error"]["code"] == "invalid_format"
