"""Voice-interaction session: wake phrase, cue protocol, command cycle.

A session owns one simulator, one interaction memory, and one persistent
variable state.  Text reaches it either as transcript chunks (wake phrase
required) or as raw commands (wake already stripped).  Every command cycle
emits a cue sequence of the shape

    Beep, GotItProcessing, (ScoopingNow|ScrapingNow)*,
    (ReadyForAnother | ErrorMessage)

where the terminal cue is ``ErrorMessage`` exactly when the model backend
failed, the completion was rejected, or execution halted on a runtime
error.  A halt caused by the user's own stop/pause is not an error: the
session still closes the cycle with ``ReadyForAnother``.

Bare control words ("stop", "pause", "start") take a fast path that never
touches the model and is not a command cycle.
"""

from __future__ import annotations

import enum
import re
from collections import deque
from dataclasses import dataclass, field

from .adapters import ModelUnavailable, normalize_command
from .plan_language import (
    ControlAction,
    PlanError,
    RobotVariableSet,
    SafetyLimits,
    VariableMode,
    VariableState,
    lower,
    parse,
    plan_to_jsonable,
    validate,
)
from .prompt_engine import (
    EnvironmentConfig,
    InteractionMemory,
    MemoryScope,
    PromptTemplate,
    ResetEvent,
    assemble_prompt,
    record_interaction,
    reset_memory,
)
from .robot_sim import (
    CUE_SCOOPING_NOW,
    CUE_SCRAPING_NOW,
    CUE_EMITTED,
    HALTED,
    QueueControls,
    RobotConfig,
    Simulator,
    Status,
    TraceEvent,
    VirtualClock,
)


class CueKind(enum.Enum):
    BEEP = "beep"
    GOT_IT_PROCESSING = "got_it_processing"
    SCOOPING_NOW = "scooping_now"
    SCRAPING_NOW = "scraping_now"
    READY_FOR_ANOTHER = "ready_for_another"
    ERROR_MESSAGE = "error_message"


@dataclass(frozen=True)
class Cue:
    """One acoustic/spoken cue; only ERROR_MESSAGE carries text."""

    kind: CueKind
    text: str | None = None

    def to_jsonable(self) -> dict:
        payload: dict = {"kind": self.kind.value}
        if self.text is not None:
            payload["text"] = self.text
        return payload


class Phase(enum.Enum):
    AWAITING_WAKE = "awaiting_wake"
    CAPTURING_COMMAND = "capturing_command"
    PROCESSING = "processing"
    EXECUTING = "executing"


@dataclass(frozen=True)
class WakeConfig:
    """Wake phrase plus transcription-error aliases.

    Matching is case-insensitive, tolerates punctuation, and looks for the
    alias as a contiguous word sequence anywhere in the chunk; the text
    after the match is the command remainder.
    """

    phrase: str = "Hey Obi"
    aliases: tuple[str, ...] = ("hey obi", "hey obie", "hey opie", "hey ob")


_WORD = re.compile(r"[a-z0-9']+")


def detect_wake(chunk: str, config: WakeConfig | None = None) -> str | None:
    """Return the command remainder if the chunk wakes the session.

    A match with nothing after it returns ``""`` (wake-only chunk); no
    match returns ``None``.
    """
    config = config or WakeConfig()
    lowered = chunk.lower()
    words = [(m.group(), m.start(), m.end()) for m in _WORD.finditer(lowered)]
    tokens = [w[0] for w in words]
    # Prefer the longest alias so "hey obie" is not shadowed by "hey ob".
    for alias in sorted(config.aliases, key=lambda a: -len(a.split())):
        alias_tokens = alias.lower().split()
        span = len(alias_tokens)
        for start in range(len(tokens) - span + 1):
            if tokens[start : start + span] == alias_tokens:
                end = words[start + span - 1][2]
                return chunk[end:].lstrip(" \t,.!?;:-")
    return None


_CONTROL_WORDS = {
    "stop": ControlAction.STOP,
    "pause": ControlAction.PAUSE_INDEFINITELY,
    "start": ControlAction.START,
    "continue": ControlAction.START,
    "resume": ControlAction.START,
}


def control_for(text: str) -> ControlAction | None:
    """Map a bare control utterance to a control, else None."""
    return _CONTROL_WORDS.get(normalize_command(text))


@dataclass
class CommandResult:
    """Everything one command cycle produced."""

    command: str
    ok: bool
    cues: list[Cue]
    completion: str | None = None
    warnings: list[str] = field(default_factory=list)
    plan_json: dict | None = None
    trace: list[TraceEvent] = field(default_factory=list)
    error: str | None = None


class FeedingSession:
    """One user's dialogue with the robot."""

    def __init__(
        self,
        adapter,
        *,
        prompt_version: str = "v3",
        robot_config: RobotConfig | None = None,
        environment: EnvironmentConfig | None = None,
        clock=None,
        controls=None,
        limits: SafetyLimits | None = None,
        defaults: RobotVariableSet | None = None,
        memory_scope: MemoryScope = MemoryScope.PER_SESSION,
        wake: WakeConfig | None = None,
        template_root=None,
        params: dict | None = None,
        on_cue=None,
        on_event=None,
        on_snapshot=None,
    ) -> None:
        self.adapter = adapter
        self.prompt_version = prompt_version
        self.template = PromptTemplate.load(prompt_version, root=template_root)
        self.mode = (
            VariableMode.LEVELS if prompt_version == "v3" else VariableMode.CONTINUOUS
        )
        self.limits = limits or SafetyLimits()
        self.defaults = defaults or RobotVariableSet()
        self.variables = VariableState.from_defaults(self.defaults, self.mode)
        self.robot_config = robot_config or RobotConfig.default()
        self.environment = environment or EnvironmentConfig(
            bowl_contents=tuple(label for label, _, _ in self.robot_config.initial_bowls)
        )
        self.memory = InteractionMemory(scope=memory_scope)
        self.wake = wake or WakeConfig()
        self.params = params or {}
        self.phase = Phase.AWAITING_WAKE
        self.on_cue = on_cue
        self.controls = controls if controls is not None else QueueControls()

        def _observe(event: TraceEvent, state) -> None:
            self._cue_from_trace(event)
            if on_event is not None:
                on_event(event, state)

        self.sim = Simulator(
            self.robot_config,
            clock=clock or VirtualClock(),
            controls=self.controls,
            on_event=_observe,
            on_snapshot=on_snapshot,
        )
        self.last_result: CommandResult | None = None
        self.results: list[CommandResult] = []
        self._pending: deque[str] = deque()
        self._cycle_cues: list[Cue] | None = None

    # ---- cue plumbing -------------------------------------------------

    def _emit(self, cue: Cue) -> None:
        if self._cycle_cues is not None:
            self._cycle_cues.append(cue)
        if self.on_cue is not None:
            self.on_cue(cue)

    def _cue_from_trace(self, event: TraceEvent) -> None:
        if event.kind != CUE_EMITTED:
            return
        mapping = {
            CUE_SCOOPING_NOW: CueKind.SCOOPING_NOW,
            CUE_SCRAPING_NOW: CueKind.SCRAPING_NOW,
        }
        kind = mapping.get(event.payload.get("cue"))
        if kind is not None:
            self._emit(Cue(kind))

    # ---- transcript entry points --------------------------------------

    def submit_transcript(self, chunk: str) -> list[Cue]:
        """Feed one transcript chunk through wake detection.

        Returns the cues emitted while handling this chunk (empty when the
        chunk did not wake the session).
        """
        if self.phase == Phase.CAPTURING_COMMAND:
            self.phase = Phase.AWAITING_WAKE
            return self._route_text(chunk, beeped=False)
        remainder = detect_wake(chunk, self.wake)
        if remainder is None:
            return []
        self._emit_loose(Cue(CueKind.BEEP))
        if remainder == "":
            self.phase = Phase.CAPTURING_COMMAND
            return [Cue(CueKind.BEEP)]
        cues = self._route_text(remainder, beeped=True)
        return cues or [Cue(CueKind.BEEP)]

    def _emit_loose(self, cue: Cue) -> None:
        """Emit a cue outside any command cycle (wake beep, control beep)."""
        if self.on_cue is not None:
            self.on_cue(cue)

    def _route_text(self, text: str, *, beeped: bool) -> list[Cue]:
        control = control_for(text)
        if control is not None:
            if not beeped:
                self._emit_loose(Cue(CueKind.BEEP))
            self.handle_control(control)
            return [Cue(CueKind.BEEP)] if not beeped else []
        result = self.process_command(text, beeped=beeped)
        return result.cues

    # ---- control fast path ---------------------------------------------

    def handle_control(self, action: ControlAction) -> bool:
        """Dispatch a control without a model round trip.

        Controls are meaningful only while the robot is running or paused;
        at other times they are ignored (returns False).
        """
        if self.sim.state.status not in (Status.RUNNING, Status.PAUSED):
            return False
        self.controls.send(action)
        return True

    # ---- command cycle ---------------------------------------------------

    def process_command(self, command: str, *, beeped: bool = False) -> CommandResult:
        """Run one full command cycle and return its artifacts."""
        cycle: list[Cue] = []
        self._cycle_cues = cycle
        self.phase = Phase.PROCESSING
        try:
            if not beeped:
                self._emit(Cue(CueKind.BEEP))
            elif self._cycle_cues is not None:
                # The wake path already voiced the beep; keep it in the
                # cycle record without sounding it twice.
                cycle.append(Cue(CueKind.BEEP))
            self._emit(Cue(CueKind.GOT_IT_PROCESSING))
            result = self._run_cycle(command, cycle)
        finally:
            self._cycle_cues = None
            self.phase = Phase.AWAITING_WAKE
        self.last_result = result
        self.results.append(result)
        while self._pending:
            self.process_command(self._pending.popleft())
        return result

    def _run_cycle(self, command: str, cycle: list[Cue]) -> CommandResult:
        prompt = assemble_prompt(
            self.template, self.environment, self.memory, command
        )
        try:
            completion = self.adapter.complete(list(prompt.messages), self.params)
        except ModelUnavailable as exc:
            self._emit(Cue(CueKind.ERROR_MESSAGE, exc.user_message))
            return CommandResult(
                command=command, ok=False, cues=cycle, error=exc.user_message
            )
        # The exchange enters memory whether or not the completion survives
        # validation: seeing its own rejected code lets the model correct
        # itself on the next attempt.
        self.memory = record_interaction(self.memory, command, completion)
        try:
            ast = parse(completion)
            checked, warnings = validate(ast, limits=self.limits, mode=self.mode)
            plan = lower(
                checked,
                defaults=self.defaults,
                mode=self.mode,
                limits=self.limits,
                state=self.variables,
            )
        except PlanError as exc:
            self._emit(Cue(CueKind.ERROR_MESSAGE, exc.user_message))
            return CommandResult(
                command=command,
                ok=False,
                cues=cycle,
                completion=completion,
                error=exc.user_message,
            )

        if self.sim.state.status == Status.STOPPED:
            self.sim.reset()
        self.phase = Phase.EXECUTING
        trace = self.sim.execute(plan)
        halted_error = next(
            (
                e
                for e in trace
                if e.kind == HALTED and e.payload.get("cause") == "error"
            ),
            None,
        )
        if halted_error is not None:
            self._emit(Cue(CueKind.ERROR_MESSAGE, halted_error.payload.get("reason", "")))
            ok = False
            error = halted_error.payload.get("reason")
        else:
            self._emit(Cue(CueKind.READY_FOR_ANOTHER))
            ok = True
            error = None
        return CommandResult(
            command=command,
            ok=ok,
            cues=cycle,
            completion=completion,
            warnings=warnings,
            plan_json=plan_to_jsonable(plan),
            trace=trace,
            error=error,
        )

    def queue_command(self, command: str) -> None:
        """Queue a command to run after the current cycle finishes."""
        self._pending.append(command)

    def fresh_robot(self, clock=None) -> None:
        """Swap in a factory-fresh robot (full bowls, home pose, zero clock).

        Dialogue state — memory, variables, phase — is untouched; replay
        harnesses use this to grade each attempt against identical food
        state while the conversation continues.
        """
        self.sim = Simulator(
            self.robot_config,
            clock=clock or VirtualClock(),
            controls=self.controls,
            on_event=self.sim.on_event,
            on_snapshot=self.sim.on_snapshot,
        )

    # ---- boundaries -----------------------------------------------------

    def boundary(self, event: ResetEvent) -> None:
        """Apply a session/task/attempt boundary to memory and variables."""
        self.memory = reset_memory(self.memory, event)
        if event == ResetEvent.NEW_SESSION:
            self.variables = VariableState.from_defaults(self.defaults, self.mode)

    # ---- introspection ----------------------------------------------------

    def state_jsonable(self) -> dict:
        snap = self.sim.state.snapshot()
        snap["phase"] = self.phase.value
        snap["prompt_version"] = self.prompt_version
        snap["variables"] = {
            "speed": self.variables.speed,
            "accel": self.variables.accel,
            "deep_scoop": self.variables.deep_scoop,
        }
        if self.last_result is not None:
            snap["last_command"] = {
                "command": self.last_result.command,
                "ok": self.last_result.ok,
                "completion": self.last_result.completion,
                "warnings": self.last_result.warnings,
                "plan": self.last_result.plan_json,
                "error": self.last_result.error,
                "cues": [c.to_jsonable() for c in self.last_result.cues],
            }
        return snap
