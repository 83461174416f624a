"""Interruptible plan execution over the simulated arm.

Plans run synchronously: ``Simulator.execute`` walks the plan's steps,
advancing a clock segment by segment and appending trace events.  Controls
(stop / pause / start) arrive through a control source and take effect at
segment boundaries — a stop never cancels a milestone whose motion already
completed.  An optional immediate-halt mode cuts the active segment short
instead.

Two clocks exist: the virtual clock jumps instantly (tests, replays) and
the wall clock sleeps scaled real time, reporting interpolated arm poses
to an observer at a steady tick so a UI can animate motion.
"""

from __future__ import annotations

import queue
import threading
import time as _time
from collections import deque
from typing import Callable, Iterable, Optional

from ..plan_language import (
    ActionPlan,
    Control,
    ControlAction,
    MoveToMouth,
    Scoop,
    ScrapeThenScoop,
    Wait,
)
from .config import RobotConfig
from .state import (
    BITE_DELIVERED,
    CUE_EMITTED,
    HALTED,
    PAUSED_AT,
    RESUMED_AT,
    SCOOP_COMPLETED,
    SCRAPE_PERFORMED,
    SEGMENT_END,
    SEGMENT_START,
    WAIT_STARTED,
    AlreadyRunning,
    RobotState,
    Status,
    TraceEvent,
    reset,
)
from .timing import ZeroSpeed, segment_duration

#: Spoken action cues the executor can emit.
CUE_SCOOPING_NOW = "scooping_now"
CUE_SCRAPING_NOW = "scraping_now"


class VirtualClock:
    """Simulated time that advances instantly."""

    def __init__(self) -> None:
        self.t = 0.0

    def advance(self, seconds: float, on_tick: Optional[Callable[[float], None]] = None) -> None:
        self.t += seconds

    def advance_to(self, t: float) -> None:
        self.t = max(self.t, t)

    def jump(self, seconds: float) -> None:
        self.t += seconds


class WallClock:
    """Simulated time backed by real sleeping.

    ``scale`` is real seconds per simulated second (1.0 = real time,
    0.05 = twenty times faster).  ``advance`` sleeps in slices and invokes
    ``on_tick(fraction_complete)`` at better than 5 Hz so observers can
    interpolate motion; the final simulated timestamp is set exactly.
    """

    TICK_REAL_SECONDS = 0.1

    def __init__(self, scale: float = 1.0) -> None:
        if scale <= 0:
            raise ValueError("scale must be positive")
        self.scale = scale
        self.t = 0.0

    def advance(self, seconds: float, on_tick: Optional[Callable[[float], None]] = None) -> None:
        start = self.t
        real_total = seconds * self.scale
        slept = 0.0
        while slept < real_total:
            chunk = min(self.TICK_REAL_SECONDS, real_total - slept)
            _time.sleep(chunk)
            slept += chunk
            self.t = start + min(seconds, slept / self.scale)
            if on_tick is not None and real_total > 0:
                on_tick(min(1.0, slept / real_total))
        self.t = start + seconds

    def advance_to(self, t: float) -> None:
        self.t = max(self.t, t)

    def jump(self, seconds: float) -> None:
        self.t += seconds


class ScheduledControls:
    """Controls that fire at preset simulated times (virtual-clock runs)."""

    def __init__(self, schedule: Iterable[tuple[float, ControlAction]] = ()) -> None:
        self._pending = sorted(schedule, key=lambda item: item[0])

    def poll(self, now: float) -> list[ControlAction]:
        due = [action for t, action in self._pending if t <= now]
        self._pending = [(t, a) for t, a in self._pending if t > now]
        return due

    def peek(self) -> tuple[float, ControlAction] | None:
        return self._pending[0] if self._pending else None

    def next_pending_time(self) -> float | None:
        return self._pending[0][0] if self._pending else None


class QueueControls:
    """Thread-safe control channel for live (wall-clock) sessions."""

    def __init__(self) -> None:
        self._queue: "queue.Queue[ControlAction]" = queue.Queue()

    def send(self, action: ControlAction) -> None:
        self._queue.put(action)

    def poll(self, now: float) -> list[ControlAction]:
        due = []
        while True:
            try:
                due.append(self._queue.get_nowait())
            except queue.Empty:
                return due

    def next_pending_time(self) -> float | None:
        return None

    def wait_next(self, timeout: float) -> ControlAction | None:
        try:
            return self._queue.get(timeout=timeout)
        except queue.Empty:
            return None


class Simulator:
    """One arm, one plan at a time, one trace per execution."""

    def __init__(
        self,
        config: RobotConfig | None = None,
        clock: VirtualClock | WallClock | None = None,
        controls: ScheduledControls | QueueControls | None = None,
        on_event: Optional[Callable[[TraceEvent, RobotState], None]] = None,
        on_snapshot: Optional[Callable[[dict], None]] = None,
        immediate_halt: bool = False,
    ) -> None:
        self.config = config or RobotConfig.default()
        self.state = RobotState(self.config)
        self.clock = clock or VirtualClock()
        self.controls = controls if controls is not None else ScheduledControls()
        self.on_event = on_event
        self.on_snapshot = on_snapshot
        self.immediate_halt = immediate_halt
        self.trace: list[TraceEvent] = []

    # -- plumbing ----------------------------------------------------------

    def _emit(self, kind: str, **payload) -> TraceEvent:
        event = TraceEvent(t=self.clock.t, kind=kind, payload=payload)
        self.trace.append(event)
        if self.on_event is not None:
            self.on_event(event, self.state)
        return event

    def _publish_snapshot(self) -> None:
        if self.on_snapshot is not None:
            self.on_snapshot(self.state.snapshot())

    def reset(self) -> None:
        reset(self.state)
        self._publish_snapshot()

    # -- execution ---------------------------------------------------------

    def execute(self, plan: ActionPlan) -> list[TraceEvent]:
        """Run a plan to completion, halt, or pause-resume cycles.

        Returns the trace of this run.  The simulator keeps cumulative
        time across runs; callers wanting isolated timing start with a
        fresh clock.
        """
        if self.state.status is not Status.IDLE:
            if self.state.status is Status.STOPPED:
                raise AlreadyRunning("robot is stopped; reset before submitting a plan")
            raise AlreadyRunning(f"a plan is already {self.state.status.value}")
        self.trace = []
        self.state.status = Status.RUNNING
        self._publish_snapshot()

        try:
            for pc, step in enumerate(plan.steps):
                self.state.program_counter = pc
                if self._handle_controls():
                    return self.trace
                if isinstance(step, Wait):
                    self._emit(WAIT_STARTED, seconds=step.seconds)
                    self.clock.advance(step.seconds)
                elif isinstance(step, Control):
                    if self._handle_plan_control(step.action):
                        return self.trace
                else:
                    if self._run_motion_step(pc, step):
                        return self.trace
            self.state.status = Status.IDLE
            self.state.program_counter = len(plan.steps)
        except ZeroSpeed as exc:
            self.state.status = Status.STOPPED
            self._emit(HALTED, reason=str(exc), cause="error")
        finally:
            self._publish_snapshot()
        return self.trace

    def _halt(self, reason: str, cause: str) -> None:
        self.state.status = Status.STOPPED
        self._emit(HALTED, reason=reason, cause=cause)

    def _handle_plan_control(self, action: ControlAction) -> bool:
        """Apply a control embedded in the plan; True when execution ends."""
        if action is ControlAction.STOP:
            self._halt("stop instruction in plan", cause="plan")
            return True
        if action is ControlAction.PAUSE_INDEFINITELY:
            return self._pause()
        return False  # START while already running is a no-op

    def _handle_controls(self) -> bool:
        """Apply controls due at this boundary; True when execution ends."""
        pending = deque(self.controls.poll(self.clock.t))
        while pending:
            action = pending.popleft()
            if action is ControlAction.STOP:
                self._halt("stopped by user", cause="control")
                return True
            if action is ControlAction.PAUSE_INDEFINITELY:
                # Controls polled together stay in order: a stop or start
                # already due must be seen while paused, not dropped.
                if self._pause(pending):
                    return True
            # START while running is a no-op.
        return False

    def _pause(self, pending: Optional[deque] = None) -> bool:
        """Suspend until a start (resume) or stop arrives; True if halted."""
        self.state.status = Status.PAUSED
        self._emit(PAUSED_AT)
        self._publish_snapshot()
        pending = pending if pending is not None else deque()
        while True:
            while pending:
                action = pending.popleft()
                if action is ControlAction.STOP:
                    self._halt("stopped by user", cause="control")
                    return True
                if action is ControlAction.START:
                    self.state.status = Status.RUNNING
                    self._emit(RESUMED_AT)
                    self._publish_snapshot()
                    return False
                # A repeated pause while paused changes nothing.
            if isinstance(self.controls, ScheduledControls):
                horizon = self.controls.next_pending_time()
                if horizon is None:
                    # Scheduled run with nothing left: do not deadlock.
                    self._halt("paused with no pending resume", cause="stalled")
                    return True
                self.clock.advance_to(horizon)
                pending.extend(self.controls.poll(self.clock.t))
            else:
                action = self.controls.wait_next(timeout=0.05)
                if action is not None:
                    pending.append(action)

    def _run_motion_step(self, pc: int, step) -> bool:
        """Execute one motion step's segments; True when execution ends."""
        if isinstance(step, Scoop):
            action, bowl, cue = "scoop", step.bowl, CUE_SCOOPING_NOW
        elif isinstance(step, ScrapeThenScoop):
            action, bowl, cue = "scrape_then_scoop", step.bowl, CUE_SCRAPING_NOW
        elif isinstance(step, MoveToMouth):
            action, bowl, cue = "move_to_mouth", None, None
        else:  # pragma: no cover
            raise TypeError(f"not a motion step: {step!r}")

        if cue is not None:
            self._emit(CUE_EMITTED, cue=cue)
        names, milestones = self.config.path_for(action, bowl)
        after = {index: event for index, event in milestones}

        for seg, name in enumerate(names):
            self.state.segment_index = seg
            origin = self.state.arm.pose
            target = self.config.waypoint(name)
            displacements = [abs(b - a) for a, b in zip(origin, target)]
            duration = segment_duration(displacements, step.speed, step.accel)

            if self.immediate_halt and self._interrupt_within(duration):
                return True

            self._emit(
                SEGMENT_START,
                step_index=pc,
                segment_index=seg,
                action=action,
                target=name,
                speed=step.speed,
                accel=step.accel,
                duration=duration,
            )
            self.clock.advance(duration, on_tick=self._tick(origin, target))
            self.state.arm.pose = target
            self._emit(SEGMENT_END, step_index=pc, segment_index=seg, duration=duration)
            self._publish_snapshot()

            event = after.get(seg)
            if event == "scoop":
                units = self.state.perform_scoop(bowl, step.deep)
                b = self.state.bowls[bowl]
                self._emit(
                    SCOOP_COMPLETED,
                    bowl=bowl,
                    units=units,
                    deep=step.deep,
                    speed=step.speed,
                    center_after=b.center_units,
                    edge_after=b.edge_units,
                    spoon_load=self.state.arm.spoon_load,
                )
            elif event == "scrape":
                moved = self.state.perform_scrape(bowl)
                b = self.state.bowls[bowl]
                self._emit(
                    SCRAPE_PERFORMED,
                    bowl=bowl,
                    units_moved=moved,
                    center_after=b.center_units,
                    edge_after=b.edge_units,
                )
            elif event == "bite":
                units = self.state.deliver_bite()
                self._emit(BITE_DELIVERED, units=units)

            if seg != len(names) - 1 and self._handle_controls():
                return True
        return False

    def _tick(self, origin: tuple[float, ...], target: tuple[float, ...]):
        if self.on_snapshot is None:
            return None

        def on_tick(fraction: float) -> None:
            self.state.arm.pose = tuple(
                a + (b - a) * fraction for a, b in zip(origin, target)
            )
            self._publish_snapshot()

        return on_tick

    def _interrupt_within(self, duration: float) -> bool:
        """Immediate-halt mode: stop mid-segment when a stop is due inside it.

        Only a stop that is the next pending control cuts the segment;
        anything else keeps segment-boundary semantics.
        """
        if not isinstance(self.controls, ScheduledControls):
            return False
        pending = self.controls.peek()
        if pending is None:
            return False
        due_at, action = pending
        if action is ControlAction.STOP and due_at <= self.clock.t + duration:
            self.clock.advance_to(due_at)
            self.controls.poll(self.clock.t)  # consume the stop
            self._halt("stopped by user", cause="control")
            return True
        return False
