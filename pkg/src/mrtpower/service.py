"""HTTP JSON API wrapping the design/power/simulate stack.

Versioned under /v1. Sessions are opaque bearer tokens (cookie or
X-Session-Token header) backed by an in-memory TTL store; each successful
compute call appends exactly one entry to the session's history. All
responses are serialized through payloads.dump_json, so a CLI run with the
same inputs produces byte-identical JSON.
"""
from __future__ import annotations

import os
import secrets
import threading
import time
from datetime import datetime, timezone
from pathlib import Path

from fastapi import FastAPI, Request, Response
from fastapi.staticfiles import StaticFiles

from . import payloads
from .design import parse_probability_csv
from .errors import FieldError, SampleSizeCapError, ValidationError
from .power import PowerCalcResult, power_at, solve_sample_size
from .trends import TrendSpec

__all__ = ["create_app", "SESSION_COOKIE"]

SESSION_COOKIE = "mrt_session"
DEFAULT_TTL_SECONDS = 7200


class SessionStore:
    """In-memory session history + uploaded randomization schedules, both
    expiring after the TTL. Appends are atomic under one lock."""

    def __init__(self, ttl_seconds: float):
        self.ttl = ttl_seconds
        self._lock = threading.Lock()
        self._sessions: dict[str, dict] = {}
        self._schedules: dict[str, dict] = {}

    def _prune(self, now: float) -> None:
        for table in (self._sessions, self._schedules):
            dead = [k for k, v in table.items() if v["expires"] <= now]
            for k in dead:
                del table[k]

    def ensure_session(self, token: str | None) -> tuple[str, bool]:
        """Return (token, created). Unknown or expired tokens get a fresh
        session."""
        now = time.monotonic()
        with self._lock:
            self._prune(now)
            if token and token in self._sessions:
                self._sessions[token]["expires"] = now + self.ttl
                return token, False
            token = secrets.token_urlsafe(16)
            self._sessions[token] = {"entries": [], "expires": now + self.ttl}
            return token, True

    def append(self, token: str, entry: dict) -> None:
        with self._lock:
            self._sessions[token]["entries"].append(entry)
            self._sessions[token]["expires"] = time.monotonic() + self.ttl

    def entries(self, token: str) -> list[dict]:
        with self._lock:
            return list(self._sessions[token]["entries"])

    def store_schedule(self, schedule) -> str:
        token = secrets.token_urlsafe(16)
        with self._lock:
            self._schedules[token] = {"schedule": schedule,
                                      "expires": time.monotonic() + self.ttl}
        return token

    def resolve_schedule(self, token):
        now = time.monotonic()
        with self._lock:
            self._prune(now)
            item = self._schedules.get(token)
            return item["schedule"] if item else None


def _now_iso() -> str:
    return datetime.now(timezone.utc).isoformat().replace("+00:00", "Z")


async def _read_json(request: Request):
    try:
        return await request.json()
    except Exception:
        raise ValidationError(FieldError(
            "invalid_json", "body", "request body is not valid JSON")) from None


def _json_response(payload, status_code: int = 200) -> Response:
    return Response(content=payloads.dump_json(payload),
                    status_code=status_code, media_type="application/json")


def _error_response(exc) -> Response:
    if isinstance(exc, SampleSizeCapError):
        return _json_response(exc.to_payload(), 422)
    if isinstance(exc, ValidationError):
        return _json_response(exc.to_payload(), 400)
    return _json_response(
        {"error": {"code": "internal_error", "message": str(exc)}}, 500)


def create_app(session_ttl: float | None = None,
               static_dir: str | None = None) -> FastAPI:
    if session_ttl is None:
        session_ttl = float(os.environ.get("MRTPOWER_SESSION_TTL",
                                           DEFAULT_TTL_SECONDS))
    app = FastAPI(title="mrtpower", docs_url=None, redoc_url=None,
                  openapi_url=None)
    store = SessionStore(session_ttl)
    app.state.store = store

    def _session(request: Request) -> tuple[str, bool]:
        token = request.cookies.get(SESSION_COOKIE) \
            or request.headers.get("X-Session-Token")
        return store.ensure_session(token)

    def _finish(response: Response, token: str, created: bool) -> Response:
        if created:
            response.set_cookie(SESSION_COOKIE, token, httponly=True,
                                samesite="lax")
        response.headers["X-Session-Token"] = token
        return response

    @app.post("/v1/samplesize")
    async def samplesize(request: Request) -> Response:
        token, created = _session(request)
        try:
            body = await _read_json(request)
            design, alpha0, target, canon = payloads.parse_samplesize_request(
                body, resolve_token=store.resolve_schedule)
            result = solve_sample_size(design, alpha0, target)
        except (ValidationError, SampleSizeCapError) as exc:
            return _finish(_error_response(exc), token, created)
        payload = payloads.samplesize_result_payload(result, canon)
        store.append(token, payloads.history_entry(
            "samplesize", _now_iso(), payload))
        return _finish(_json_response(payload), token, created)

    @app.post("/v1/power")
    async def power(request: Request) -> Response:
        token, created = _session(request)
        try:
            body = await _read_json(request)
            design, alpha0, n, canon = payloads.parse_power_request(
                body, resolve_token=store.resolve_schedule)
            value = power_at(design, alpha0, n)
        except (ValidationError, SampleSizeCapError) as exc:
            return _finish(_error_response(exc), token, created)
        payload = payloads.power_result_payload(
            PowerCalcResult(power=value, n=n), canon)
        store.append(token, payloads.history_entry("power", _now_iso(), payload))
        return _finish(_json_response(payload), token, created)

    @app.post("/v1/randomization-csv")
    async def randomization_csv(request: Request) -> Response:
        token, created = _session(request)
        params = request.query_params
        try:
            mode = params.get("mode", "")
            if mode not in ("day", "time"):
                raise ValidationError(FieldError(
                    "invalid_mode", "mode",
                    "query parameter mode must be day or time"))
            try:
                days = int(params["days"])
                per_day = int(params["per_day"])
            except (KeyError, ValueError):
                raise ValidationError(FieldError(
                    "missing_field", "days",
                    "integer query parameters days and per_day are required"
                )) from None
            content_type = request.headers.get("content-type", "")
            if content_type.startswith("multipart/form-data"):
                form = await request.form()
                upload = form.get("file")
                if upload is None:
                    raise ValidationError(FieldError(
                        "missing_field", "file",
                        "multipart upload must include a 'file' part"))
                data = await upload.read()
            else:
                data = await request.body()
            schedule = parse_probability_csv(
                data, mode="per_day" if mode == "day" else "per_time",
                days=days, per_day=per_day)
        except ValidationError as exc:
            return _finish(_error_response(exc), token, created)
        csv_token = store.store_schedule(schedule)
        values = list(schedule.values)
        preview = [{"index": i + 1, "probability": float(v)}
                   for i, v in enumerate(values[:10])]
        payload = {"token": csv_token, "mode": schedule.mode,
                   "count": len(values), "preview": preview}
        return _finish(_json_response(payload), token, created)

    @app.get("/v1/trend/preview")
    async def trend_preview(request: Request) -> Response:
        token, created = _session(request)
        params = request.query_params

        def _fnum(key):
            raw = params.get(key)
            if raw is None or raw == "":
                return None
            try:
                return float(raw)
            except ValueError:
                raise ValidationError(FieldError(
                    "invalid_type", key, f"{key} must be a number")) from None

        try:
            role = params.get("role", "effect")
            if role not in ("effect", "availability"):
                raise ValidationError(FieldError(
                    "invalid_role", "role",
                    "role must be effect or availability"))
            try:
                days = int(params["days"])
            except (KeyError, ValueError):
                raise ValidationError(FieldError(
                    "missing_field", "days",
                    "integer query parameter days is required")) from None
            average = _fnum("average")
            if average is None:
                raise ValidationError(FieldError(
                    "missing_field", "average", "average is required"))
            spec = TrendSpec(kind=params.get("kind", ""), average=average,
                             initial=_fnum("initial"),
                             changing_point=_fnum("changing_point"), role=role)
            payload = payloads.trend_preview_payload(spec, days)
        except ValidationError as exc:
            return _finish(_error_response(exc), token, created)
        return _finish(_json_response(payload), token, created)

    @app.get("/v1/history")
    async def history(request: Request) -> Response:
        token, created = _session(request)
        payload = {"entries": store.entries(token)}
        return _finish(_json_response(payload), token, created)

    @app.get("/v1/history/export")
    async def history_export(request: Request) -> Response:
        token, created = _session(request)
        fmt = request.query_params.get("format", "csv")
        entries = store.entries(token)
        if fmt == "json":
            response = _json_response({"entries": entries})
            response.headers["Content-Disposition"] = \
                'attachment; filename="mrtpower-history.json"'
        elif fmt == "csv":
            response = Response(content=payloads.history_to_csv(entries),
                                media_type="text/csv")
            response.headers["Content-Disposition"] = \
                'attachment; filename="mrtpower-history.csv"'
        else:
            response = _error_response(ValidationError(FieldError(
                "invalid_format", "format", "format must be csv or json")))
        return _finish(response, token, created)

    if static_dir is None:
        candidate = Path(__file__).resolve().parents[2] / "frontend" / "dist"
        static_dir = str(candidate) if candidate.is_dir() else None
    if static_dir:
        app.mount("/", StaticFiles(directory=static_dir, html=True), name="ui")
    return app
