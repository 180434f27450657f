"""HTTP facade for live exercises.

Participant endpoints emulate browsing the active fileshare: listing file
names and opening documents, where each successful open is synthesized
into a document-open event. They are deliberately blind: no motive, type,
score, or campaign-mechanics vocabulary ever appears in their responses.

Operator endpoints expose the full campaign state and a server-sent event
stream of engine transitions, both gated by a static shared token. The
built console assets, when present, are served from the same process.
"""

from __future__ import annotations

import hmac
import json
import queue
import secrets
import threading
import time
from collections import OrderedDict
from dataclasses import dataclass, field
from datetime import datetime, timezone
from pathlib import Path
from typing import Callable

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse, StreamingResponse
from fastapi.staticfiles import StaticFiles

from .engine import (
    CampaignEngine,
    CampaignMismatchError,
    StaleEventError,
    TransitionOutcome,
    UnknownEnvironmentError,
)
from .ingest import EventValidationError, IngestSummary, parse_event, record_outcome
from .model import AccessEvent, CampaignConfig, CampaignStatus, DocumentLocation

STREAM_HEARTBEAT_S = 1.0
_IDEMPOTENCY_CACHE_LIMIT = 1024


@dataclass(frozen=True)
class ServerSettings:
    """Everything `serve` needs: the campaign plus HTTP specifics."""

    campaign: CampaignConfig
    port: int = 8000
    host: str = "127.0.0.1"
    operator_token: str = ""
    console_dir: str | None = None

    def __post_init__(self) -> None:
        if not 0 < self.port < 65536:
            raise ValueError(f"port out of range: {self.port}")
        if not self.operator_token:
            raise ValueError("operator_token must be set")

    def to_dict(self) -> dict:
        data = self.campaign.to_dict()
        data["port"] = self.port
        data["host"] = self.host
        data["operator_token"] = self.operator_token
        if self.console_dir:
            data["console_dir"] = self.console_dir
        return data

    @classmethod
    def from_dict(cls, data: dict) -> "ServerSettings":
        extra = {"port", "host", "operator_token", "console_dir"}
        campaign = CampaignConfig.from_dict(
            {k: v for k, v in data.items() if k not in extra}
        )
        if not data.get("operator_token"):
            raise ValueError("configuration is missing 'operator_token'")
        return cls(
            campaign=campaign,
            port=data.get("port", 8000),
            host=data.get("host", "127.0.0.1"),
            operator_token=data["operator_token"],
            console_dir=data.get("console_dir"),
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "ServerSettings":
        raw = Path(path).read_text(encoding="utf-8")
        return cls.from_dict(json.loads(raw))

    def write(self, path: str | Path) -> None:
        Path(path).write_text(
            json.dumps(self.to_dict(), indent=2, sort_keys=True) + "\n",
            encoding="utf-8",
        )


def default_settings(root_dir: str) -> ServerSettings:
    return ServerSettings(
        campaign=CampaignConfig(root_dir=root_dir),
        operator_token=secrets.token_hex(16),
    )


@dataclass
class _OpenCache:
    """Replay-safe memory for Idempotency-Key on document opens."""

    entries: "OrderedDict[str, tuple[int, dict]]" = field(default_factory=OrderedDict)
    lock: threading.Lock = field(default_factory=threading.Lock)

    def get(self, key: str) -> tuple[int, dict] | None:
        with self.lock:
            return self.entries.get(key)

    def put(self, key: str, status: int, payload: dict) -> None:
        with self.lock:
            self.entries[key] = (status, payload)
            while len(self.entries) > _IDEMPOTENCY_CACHE_LIMIT:
                self.entries.popitem(last=False)


def _sse_message(payload: dict) -> str:
    body = json.dumps(payload, sort_keys=True)
    return f"id: {payload['seq']}\nevent: transition\ndata: {body}\n\n"


def create_app(
    engine: CampaignEngine,
    operator_token: str,
    console_dir: str | Path | None = None,
    clock: Callable[[], datetime] | None = None,
) -> FastAPI:
    """Wire one engine behind the HTTP surface.

    `clock` stamps synthesized open events; tests inject a fixed one.
    """
    if not operator_token:
        raise ValueError("operator_token must be set")
    now = clock or (lambda: datetime.now(timezone.utc))
    app = FastAPI(title="fileshare exercise gateway", docs_url=None, redoc_url=None)
    summary = IngestSummary()
    open_cache = _OpenCache()
    app.state.engine = engine
    app.state.ingest_summary = summary

    def require_operator(request: Request) -> None:
        supplied = request.headers.get("x-operator-token", "")
        auth = request.headers.get("authorization", "")
        if auth.lower().startswith("bearer "):
            supplied = supplied or auth[7:]
        supplied = supplied or request.query_params.get("token", "")
        if not supplied or not hmac.compare_digest(supplied, operator_token):
            raise HTTPException(status_code=401, detail="operator token required")

    def participant_view() -> dict:
        env = engine.active_environment
        env_status = "active" if engine.status is CampaignStatus.RUNNING else "complete"
        return {
            "env_index": env.index,
            "files": sorted(env.files),
            "env_status": env_status,
            "next_environment_available": False,
        }

    @app.get("/api/participant/files")
    def participant_files(env: int | None = None) -> JSONResponse:
        if not engine.environments:
            raise HTTPException(status_code=404, detail="no active campaign")
        view = participant_view()
        if env is not None:
            if not 1 <= env <= len(engine.environments):
                raise HTTPException(status_code=404, detail="no such environment")
            if env != view["env_index"]:
                # The requested share was rotated out; tell the client a
                # fresher one exists without revealing anything else.
                previous = engine.environments[env - 1]
                view = {
                    "env_index": previous.index,
                    "files": sorted(previous.files),
                    "env_status": "closed",
                    "next_environment_available": True,
                }
        return JSONResponse(view)

    @app.post("/api/participant/open")
    async def participant_open(request: Request) -> JSONResponse:
        idem_key = request.headers.get("idempotency-key")
        if idem_key:
            cached = open_cache.get(idem_key)
            if cached:
                return JSONResponse(cached[1], status_code=cached[0])
        try:
            payload = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            raise HTTPException(status_code=400, detail="request body must be JSON")
        if not isinstance(payload, dict) or not isinstance(payload.get("name"), str):
            raise HTTPException(status_code=400, detail="body must carry a 'name' string")
        name = payload["name"]
        requested_env = payload.get("env_index")

        if engine.status is not CampaignStatus.RUNNING:
            raise HTTPException(status_code=409, detail="the exercise is complete")
        env = engine.active_environment
        if requested_env is not None and requested_env != env.index:
            if isinstance(requested_env, int) and 1 <= requested_env < env.index:
                raise HTTPException(
                    status_code=409, detail="that fileshare is no longer available"
                )
            raise HTTPException(status_code=404, detail="no such environment")
        if name not in env.files:
            raise HTTPException(status_code=404, detail=f"no document named {name!r}")

        location = DocumentLocation(
            path=str(Path(env.directory) / name), host=env.host_name
        )
        event = AccessEvent(
            campaign_id=engine.campaign_id,
            env_index=env.index,
            location=location,
            timestamp=now(),
        )
        try:
            transition = engine.handle_access(event)
        except (StaleEventError, CampaignMismatchError):
            summary.errors += 1
            raise HTTPException(status_code=409, detail="that fileshare was rotated out")
        record_outcome(summary, transition)
        try:
            body = (Path(env.directory) / name).read_text(encoding="utf-8")
        except OSError:
            raise HTTPException(status_code=404, detail=f"no document named {name!r}")
        finalized = transition.outcome in (
            TransitionOutcome.ENVIRONMENT_FINALIZED,
            TransitionOutcome.CAMPAIGN_FINISHED,
        )
        result = {
            "name": name,
            "body": body,
            "duplicate": transition.outcome is TransitionOutcome.DUPLICATE_IGNORED,
            "finalized": finalized,
            "exercise_complete": transition.outcome
            is TransitionOutcome.CAMPAIGN_FINISHED,
        }
        if idem_key:
            open_cache.put(idem_key, 200, result)
        return JSONResponse(result)

    @app.post("/api/events")
    async def post_event(request: Request) -> JSONResponse:
        try:
            payload = json.loads(await request.body())
        except (json.JSONDecodeError, UnicodeDecodeError):
            summary.errors += 1
            raise HTTPException(status_code=400, detail="request body must be JSON")
        try:
            event = parse_event(payload)
        except EventValidationError as exc:
            summary.errors += 1
            raise HTTPException(status_code=400, detail=str(exc))
        if event.kind != "doc_open":
            summary.filtered += 1
            return JSONResponse({"status": "filtered"}, status_code=202)
        try:
            transition = engine.handle_access(event)
        except (StaleEventError, CampaignMismatchError) as exc:
            summary.errors += 1
            raise HTTPException(status_code=409, detail=str(exc))
        except (UnknownEnvironmentError, ValueError) as exc:
            summary.errors += 1
            raise HTTPException(status_code=400, detail=str(exc))
        record_outcome(summary, transition)
        return JSONResponse(
            {"status": "accepted", "outcome": transition.outcome.value},
            status_code=202,
        )

    @app.get("/api/operator/status")
    def operator_status(request: Request) -> JSONResponse:
        require_operator(request)
        snapshot = engine.status_snapshot()
        snapshot["ingest"] = summary.to_dict()
        return JSONResponse(snapshot)

    @app.get("/api/operator/stream")
    def operator_stream(request: Request, since: int = 0) -> StreamingResponse:
        require_operator(request)
        last_id = request.headers.get("last-event-id")
        if last_id and last_id.isdigit():
            since = max(since, int(last_id))

        def generate():
            history, channel = engine.subscribe(since)
            try:
                yield "retry: 2000\n\n"
                for item in history:
                    yield _sse_message(item)
                while True:
                    try:
                        item = channel.get(timeout=STREAM_HEARTBEAT_S)
                    except queue.Empty:
                        yield ": keep-alive\n\n"
                        continue
                    yield _sse_message(item)
            finally:
                engine.unsubscribe(channel)

        return StreamingResponse(generate(), media_type="text/event-stream")

    if console_dir is not None and Path(console_dir).is_dir():
        app.mount("/", StaticFiles(directory=str(console_dir), html=True), name="console")

    return app


def start_idle_watchdog(engine: CampaignEngine) -> threading.Thread | None:
    """Finalize abandoned environments once the configured timeout lapses."""
    timeout = engine.config.idle_timeout_s
    if not timeout:
        return None

    def watch() -> None:
        while engine.status is CampaignStatus.RUNNING:
            time.sleep(min(1.0, timeout / 4))
            if (
                engine.status is CampaignStatus.RUNNING
                and engine.seconds_since_last_event() >= timeout
            ):
                try:
                    engine.finalize_idle()
                except Exception:
                    # Provisioning hiccups retry on the next tick.
                    continue

    thread = threading.Thread(target=watch, name="idle-watchdog", daemon=True)
    thread.start()
    return thread


def serve(settings: ServerSettings, engine: CampaignEngine | None = None) -> None:
    """Run the gateway under uvicorn until interrupted."""
    import uvicorn

    if engine is None:
        engine = CampaignEngine.start_campaign(settings.campaign)
    start_idle_watchdog(engine)
    app = create_app(engine, settings.operator_token, settings.console_dir)
    uvicorn.run(app, host=settings.host, port=settings.port, log_level="warning")


__all__ = [
    "ServerSettings",
    "create_app",
    "default_settings",
    "serve",
]
