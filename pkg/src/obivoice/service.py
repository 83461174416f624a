"""HTTP + SSE service exposing sessions to operator frontends.

Each session runs in its own worker thread; commands queue through it so
one session never interleaves cycles.  Every cue, trace event, and state
snapshot becomes a wire event with a monotonically increasing sequence
number, kept in a bounded ring buffer.  Clients replay history with
``GET .../events?from=N`` and stream live with ``follow=true``; asking for
evicted history yields ``410 Gone``.
"""

from __future__ import annotations

import json
import queue
import threading
import uuid
from collections import deque
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator

import yaml
from fastapi import Depends, FastAPI, HTTPException, Query, Request
from fastapi.middleware.cors import CORSMiddleware
from fastapi.responses import StreamingResponse
from pydantic import BaseModel

from . import __version__
from .adapters import HttpChatAdapter, MockAdapter, ScriptedAdapter
from .eval_harness.oracles import ORACLES, grade
from .plan_language import (
    ACCEL_MAX,
    FUNCTION_ARITY,
    LEVEL_MAX,
    MAX_LOOP_NESTING,
    SPEED_MAX,
    VARIABLES,
    SafetyLimits,
)
from .session import Cue, CueKind, FeedingSession, control_for
from .robot_sim import Status, WallClock

RING_CAPACITY = 10_000


# ---------------------------------------------------------------------------
# Settings and adapter construction.


@dataclass
class ServiceSettings:
    adapter: str = "mock"  # mock | scripted | live
    prompt_version: str = "v3"
    api_key: str | None = None  # bearer token required from clients when set
    live_base_url: str = "http://127.0.0.1:8800"
    live_model: str = "gpt-4"
    live_api_key_env: str = "OBIVOICE_API_KEY"
    mock_table: str | None = None  # YAML path overriding the packaged table
    ring_capacity: int = RING_CAPACITY

    @classmethod
    def from_file(cls, path: str | Path) -> "ServiceSettings":
        with open(path, "r", encoding="utf-8") as fh:
            raw = yaml.safe_load(fh) or {}
        return cls(**raw)


def build_adapter(kind: str, settings: ServiceSettings):
    if kind == "mock":
        if settings.mock_table:
            return MockAdapter.from_file(settings.mock_table)
        return MockAdapter.default()
    if kind == "scripted":
        return ScriptedAdapter.canonical()
    if kind == "live":
        return HttpChatAdapter(
            settings.live_base_url,
            model=settings.live_model,
            api_key_env=settings.live_api_key_env,
        )
    raise ValueError(f"unknown adapter kind {kind!r}")


# ---------------------------------------------------------------------------
# Session handles: worker thread + event ring.


_SHUTDOWN = object()


class SessionHandle:
    """One live session: its worker, its event ring, its lifecycle."""

    def __init__(self, session_id: str, session: FeedingSession, capacity: int) -> None:
        self.id = session_id
        self.session = session
        self.ring: deque[tuple[int, dict]] = deque(maxlen=capacity)
        self.next_seq = 0
        self.first_seq = 0  # sequence of the oldest retained event
        self.cond = threading.Condition()
        self.commands: "queue.Queue" = queue.Queue()
        self.closed = False
        self.worker = threading.Thread(target=self._run, daemon=True)

    # -- event ring -------------------------------------------------------

    def push(self, wire_type: str, payload: dict) -> None:
        with self.cond:
            wire = {
                "seq": self.next_seq,
                "t": self.session.sim.clock.t,
                "type": wire_type,
                "payload": payload,
            }
            self.ring.append((self.next_seq, wire))
            self.next_seq += 1
            self.first_seq = self.ring[0][0]
            self.cond.notify_all()

    def events_since(self, from_seq: int) -> tuple[list[dict], bool]:
        """Retained events at or after ``from_seq``; flags evicted history."""
        with self.cond:
            gone = from_seq < self.first_seq
            return [w for seq, w in self.ring if seq >= from_seq], gone

    # -- worker -------------------------------------------------------------

    def start(self) -> None:
        self.worker.start()

    def _run(self) -> None:
        while True:
            item = self.commands.get()
            if item is _SHUTDOWN:
                return
            kind, text = item
            try:
                if kind == "command":
                    self.session.process_command(text)
                else:  # transcript chunk, wake phrase required
                    self.session.submit_transcript(text)
            except Exception as exc:  # never kill the worker
                self.push("state", {"error": f"internal: {exc}"})
            self.push("state", self.session.state_jsonable())

    def submit(self, text: str, raw: bool) -> None:
        self.commands.put(("command" if raw else "transcript", text))

    def close(self) -> None:
        with self.cond:
            self.closed = True
            self.cond.notify_all()
        self.commands.put(_SHUTDOWN)


# ---------------------------------------------------------------------------
# Request/response bodies.


class CreateSessionBody(BaseModel):
    prompt_version: str | None = None
    adapter: str | None = None
    time_scale: float | None = None  # None = virtual clock (instant)


class CommandBody(BaseModel):
    text: str
    raw: bool = True


class ControlBody(BaseModel):
    action: str  # stop | pause | start | continue | resume


class GradeBody(BaseModel):
    task: str
    default_speed: float | None = None


# ---------------------------------------------------------------------------
# Application factory.


def create_app(settings: ServiceSettings | None = None) -> FastAPI:
    settings = settings or ServiceSettings()
    app = FastAPI(title="obivoice", version=__version__)
    app.add_middleware(
        CORSMiddleware,
        allow_origins=["*"],
        allow_methods=["*"],
        allow_headers=["*"],
    )
    handles: dict[str, SessionHandle] = {}
    lock = threading.Lock()

    def check_auth(request: Request) -> None:
        if settings.api_key is None:
            return
        header = request.headers.get("Authorization", "")
        if header != f"Bearer {settings.api_key}":
            raise HTTPException(status_code=401, detail="missing or bad bearer token")

    def get_handle(session_id: str) -> SessionHandle:
        with lock:
            handle = handles.get(session_id)
        if handle is None or handle.closed:
            raise HTTPException(status_code=404, detail="no such session")
        return handle

    @app.get("/healthz")
    def healthz() -> dict:
        return {"ok": True, "version": __version__}

    @app.get("/schema", dependencies=[Depends(check_auth)])
    def schema() -> dict:
        limits = SafetyLimits()
        return {
            "version": __version__,
            "functions": {
                name: {"arity": arity, "bowl_range": [0, 3] if arity else None}
                for name, arity in FUNCTION_ARITY.items()
            },
            "variables": sorted(VARIABLES),
            "levels": {
                "max_level": LEVEL_MAX,
                "speed_per_level": SPEED_MAX / LEVEL_MAX,
                "accel_per_level": ACCEL_MAX / LEVEL_MAX,
            },
            "limits": {
                "max_loop_iterations": limits.max_loop_iterations,
                "max_plan_steps": limits.max_plan_steps,
                "max_sleep_seconds": limits.max_sleep_seconds,
                "speed_ceiling": limits.speed_ceiling,
                "accel_ceiling": limits.accel_ceiling,
                "max_loop_nesting": MAX_LOOP_NESTING,
            },
            "cues": [kind.value for kind in CueKind],
            "tasks": sorted(ORACLES),
        }

    @app.post("/sessions", dependencies=[Depends(check_auth)])
    def create_session(body: CreateSessionBody) -> dict:
        adapter_kind = body.adapter or settings.adapter
        try:
            adapter = build_adapter(adapter_kind, settings)
        except ValueError as exc:
            raise HTTPException(status_code=422, detail=str(exc))
        clock = WallClock(scale=body.time_scale) if body.time_scale else None
        session_id = uuid.uuid4().hex[:12]
        holder: dict = {}

        def on_cue(cue: Cue) -> None:
            holder["handle"].push("cue", cue.to_jsonable())

        def on_event(event, state) -> None:
            holder["handle"].push("trace", event.to_jsonable())

        def on_snapshot(snap: dict) -> None:
            holder["handle"].push("state", snap)

        session = FeedingSession(
            adapter,
            prompt_version=body.prompt_version or settings.prompt_version,
            clock=clock,
            on_cue=on_cue,
            on_event=on_event,
            on_snapshot=on_snapshot,
        )
        handle = SessionHandle(session_id, session, settings.ring_capacity)
        holder["handle"] = handle
        with lock:
            handles[session_id] = handle
        handle.start()
        return {
            "session_id": session_id,
            "prompt_version": session.prompt_version,
            "adapter": adapter_kind,
            "wake_phrases": list(session.wake.aliases),
        }

    @app.post("/sessions/{session_id}/command", dependencies=[Depends(check_auth)])
    def submit_command(session_id: str, body: CommandBody) -> dict:
        handle = get_handle(session_id)
        if not body.text.strip():
            raise HTTPException(status_code=422, detail="text must be non-empty")
        handle.submit(body.text, raw=body.raw)
        return {"queued": True}

    @app.post("/sessions/{session_id}/control", dependencies=[Depends(check_auth)])
    def submit_control(session_id: str, body: ControlBody) -> dict:
        handle = get_handle(session_id)
        action = control_for(body.action)
        if action is None:
            raise HTTPException(status_code=422, detail=f"unknown control {body.action!r}")
        applied = handle.session.handle_control(action)
        return {"applied": applied, "action": action.value}

    @app.get("/sessions/{session_id}/state", dependencies=[Depends(check_auth)])
    def session_state(session_id: str) -> dict:
        handle = get_handle(session_id)
        state = handle.session.state_jsonable()
        with handle.cond:
            state["events"] = {
                "next_seq": handle.next_seq,
                "first_retained": handle.first_seq,
            }
        return state

    @app.post("/sessions/{session_id}/grade", dependencies=[Depends(check_auth)])
    def grade_last(session_id: str, body: GradeBody) -> dict:
        handle = get_handle(session_id)
        if body.task not in ORACLES:
            raise HTTPException(status_code=422, detail=f"unknown task {body.task!r}")
        result = handle.session.last_result
        if result is None:
            raise HTTPException(status_code=409, detail="no command has run yet")
        default_speed = body.default_speed
        if default_speed is None:
            verdict = grade(body.task, result.trace)
        else:
            verdict = grade(body.task, result.trace, default_speed)
        return {
            "task": body.task,
            "passed": verdict.passed,
            "reason": verdict.reason,
            "command": result.command,
        }

    @app.get("/sessions/{session_id}/events", dependencies=[Depends(check_auth)])
    def events(
        session_id: str,
        from_seq: int = Query(0, alias="from", ge=0),
        follow: bool = False,
    ):
        handle = get_handle(session_id)
        with handle.cond:
            if from_seq < handle.first_seq:
                raise HTTPException(
                    status_code=410,
                    detail=f"events before seq {handle.first_seq} were evicted",
                )

        def stream() -> Iterator[str]:
            cursor = from_seq
            while True:
                batch, gone = handle.events_since(cursor)
                if gone:
                    yield "event: gone\ndata: {}\n\n"
                    return
                for wire in batch:
                    yield f"id: {wire['seq']}\ndata: {json.dumps(wire)}\n\n"
                    cursor = wire["seq"] + 1
                if not follow:
                    return
                with handle.cond:
                    if handle.closed and handle.next_seq <= cursor:
                        return
                    handle.cond.wait(timeout=0.5)

        return StreamingResponse(stream(), media_type="text/event-stream")

    @app.delete("/sessions/{session_id}", dependencies=[Depends(check_auth)])
    def close_session(session_id: str) -> dict:
        handle = get_handle(session_id)
        handle.close()
        with lock:
            handles.pop(session_id, None)
        return {"closed": True}

    app.state.settings = settings
    app.state.handles = handles
    return app
