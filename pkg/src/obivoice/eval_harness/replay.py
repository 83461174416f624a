"""Replay recorded commands through the pipeline and grade each attempt.

Replay follows the study protocol: one fresh dialogue per (task,
participant) case, attempts submitted in order until one is graded
successful, at most three.  Between attempts the robot is restored to
factory state so every attempt is judged against identical food, while
the dialogue memory keeps accumulating — the model sees its earlier
attempts and can self-correct.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from ..prompt_engine import MemoryScope, ResetEvent
from ..robot_sim import BITE_DELIVERED, ScheduledControls
from ..session import FeedingSession
from .corpus import CorpusCase
from .oracles import DEFAULT_SPEED, grade


@dataclass(frozen=True)
class AttemptOutcome:
    attempt: int
    command: str
    cycle_ok: bool
    graded: bool
    reason: str
    completion: str | None = None
    warnings: tuple[str, ...] = ()
    bite_times: tuple[float, ...] = ()

    @property
    def success(self) -> bool:
        return self.cycle_ok and self.graded

    def to_jsonable(self) -> dict:
        return {
            "attempt": self.attempt,
            "command": self.command,
            "cycle_ok": self.cycle_ok,
            "graded": self.graded,
            "success": self.success,
            "reason": self.reason,
            "completion": self.completion,
            "warnings": list(self.warnings),
            "bite_times": list(self.bite_times),
        }


@dataclass(frozen=True)
class CaseOutcome:
    task: str
    participant: int
    attempts: tuple[AttemptOutcome, ...]

    @property
    def solved(self) -> bool:
        return any(a.success for a in self.attempts)

    @property
    def attempts_used(self) -> int | None:
        for outcome in self.attempts:
            if outcome.success:
                return outcome.attempt
        return None

    def to_jsonable(self) -> dict:
        return {
            "task": self.task,
            "participant": self.participant,
            "solved": self.solved,
            "attempts_used": self.attempts_used,
            "attempts": [a.to_jsonable() for a in self.attempts],
        }


def replay_case(
    case: CorpusCase,
    adapter,
    *,
    prompt_version: str = "v3",
    stop_at_success: bool = True,
) -> CaseOutcome:
    """Run one case's attempts through a fresh session."""
    session = FeedingSession(
        adapter,
        prompt_version=prompt_version,
        controls=ScheduledControls(()),
        memory_scope=MemoryScope.PER_TASK,
    )
    if hasattr(adapter, "begin_case"):
        adapter.begin_case(case.task)
    default_speed = session.variables.speed
    outcomes: list[AttemptOutcome] = []
    for attempt_no, command in enumerate(case.attempts, 1):
        if attempt_no > 1:
            session.boundary(ResetEvent.NEW_ATTEMPT)
            session.fresh_robot()
        if hasattr(adapter, "begin_attempt"):
            adapter.begin_attempt(attempt_no)
        result = session.process_command(command)
        if result.ok:
            verdict = grade(case.task, result.trace, default_speed)
            graded, reason = verdict.passed, verdict.reason
        else:
            graded, reason = False, result.error or "command cycle failed"
        bite_times = tuple(e.t for e in result.trace if e.kind == BITE_DELIVERED)
        outcomes.append(
            AttemptOutcome(
                attempt=attempt_no,
                command=command,
                cycle_ok=result.ok,
                graded=graded,
                reason=reason,
                completion=result.completion,
                warnings=tuple(result.warnings),
                bite_times=bite_times,
            )
        )
        if outcomes[-1].success and stop_at_success:
            break
    return CaseOutcome(task=case.task, participant=case.participant, attempts=tuple(outcomes))


def run_replay(
    cases: list[CorpusCase],
    adapter,
    *,
    prompt_version: str = "v3",
    stop_at_success: bool = True,
) -> list[CaseOutcome]:
    """Replay every case in corpus order."""
    return [
        replay_case(
            case, adapter, prompt_version=prompt_version, stop_at_success=stop_at_success
        )
        for case in cases
    ]


def summarize(outcomes: list[CaseOutcome]) -> dict:
    """Per-task and overall counts: cases, solved, attempt histogram."""
    per_task: dict[str, dict] = {}
    for outcome in outcomes:
        bucket = per_task.setdefault(
            outcome.task,
            {"cases": 0, "solved": 0, "attempt_histogram": {1: 0, 2: 0, 3: 0}},
        )
        bucket["cases"] += 1
        if outcome.solved:
            bucket["solved"] += 1
            bucket["attempt_histogram"][outcome.attempts_used] += 1
    overall = {
        "cases": sum(b["cases"] for b in per_task.values()),
        "solved": sum(b["solved"] for b in per_task.values()),
        "attempt_histogram": {
            n: sum(b["attempt_histogram"][n] for b in per_task.values()) for n in (1, 2, 3)
        },
    }
    return {"per_task": per_task, "overall": overall}
