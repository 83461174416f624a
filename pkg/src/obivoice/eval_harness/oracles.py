"""Task oracles: judge from a trace alone whether a task was accomplished.

Oracles read only the emitted trace events — never the plan or the
executor's internals — so they stay independent of how the pipeline
lowers and runs code.  Food-handling order is judged on the food-event
subsequence (scoops, scrapes, bites); pause requirements are checked
against wait events between the relevant food events.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..robot_sim import (
    BITE_DELIVERED,
    SCOOP_COMPLETED,
    SCRAPE_PERFORMED,
    WAIT_STARTED,
    TraceEvent,
)

DEFAULT_SPEED = 48.0  # deg/s: the level-3 default the robot starts with
MIN_PAUSE_SECONDS = 4.0  # the default between-bites delay users can rely on

_HANDLING_KINDS = (SCOOP_COMPLETED, SCRAPE_PERFORMED, BITE_DELIVERED)


def food_events(trace: list[TraceEvent]) -> list[TraceEvent]:
    """The food-handling subsequence: scoops, scrapes, and bites in order."""
    return [e for e in trace if e.kind in _HANDLING_KINDS]


@dataclass(frozen=True)
class GradeResult:
    passed: bool
    reason: str


def _ok(reason: str) -> GradeResult:
    return GradeResult(True, reason)


def _fail(reason: str) -> GradeResult:
    return GradeResult(False, reason)


def _kinds(food: list[TraceEvent]) -> list[str]:
    return [e.kind for e in food]


def _wait_between(trace: list[TraceEvent], t_from: float, t_to: float) -> bool:
    """Is there a long-enough wait between two trace timestamps?"""
    return any(
        e.kind == WAIT_STARTED
        and e.payload["seconds"] >= MIN_PAUSE_SECONDS
        and t_from <= e.t <= t_to
        for e in trace
    )


def grade_practice(trace: list[TraceEvent], default_speed: float = DEFAULT_SPEED) -> GradeResult:
    """Any scoop that later reaches the mouth counts."""
    food = food_events(trace)
    for i, event in enumerate(food):
        if event.kind == SCOOP_COMPLETED and any(
            later.kind == BITE_DELIVERED for later in food[i + 1 :]
        ):
            return _ok("a scoop was delivered to the mouth")
    return _fail("no scoop reached the mouth")


def grade_t1(trace: list[TraceEvent], default_speed: float = DEFAULT_SPEED) -> GradeResult:
    """Exactly one scoop from bowl 0, delivered, faster than the default."""
    food = food_events(trace)
    scoops = [e for e in food if e.kind == SCOOP_COMPLETED]
    if len(scoops) != 1:
        return _fail(f"expected exactly one scoop, saw {len(scoops)}")
    scoop = scoops[0]
    if scoop.payload["bowl"] != 0:
        return _fail(f"scooped bowl {scoop.payload['bowl']}, expected bowl 0")
    if not any(e.kind == BITE_DELIVERED and e.t >= scoop.t for e in food):
        return _fail("the scoop never reached the mouth")
    if scoop.payload["speed"] <= default_speed:
        return _fail(
            f"speed {scoop.payload['speed']:g} deg/s is not above the default {default_speed:g}"
        )
    return _ok("one faster-than-default scoop from bowl 0 was delivered")


def grade_t2(trace: list[TraceEvent], default_speed: float = DEFAULT_SPEED) -> GradeResult:
    """Exactly one deep scoop from bowl 2, delivered."""
    food = food_events(trace)
    scoops = [e for e in food if e.kind == SCOOP_COMPLETED]
    if len(scoops) != 1:
        return _fail(f"expected exactly one scoop, saw {len(scoops)}")
    scoop = scoops[0]
    if scoop.payload["bowl"] != 2:
        return _fail(f"scooped bowl {scoop.payload['bowl']}, expected bowl 2")
    if not scoop.payload["deep"]:
        return _fail("the scoop was not a deep scoop")
    if not any(e.kind == BITE_DELIVERED and e.t >= scoop.t for e in food):
        return _fail("the scoop never reached the mouth")
    return _ok("one deep scoop from bowl 2 was delivered")


def grade_t3(trace: list[TraceEvent], default_speed: float = DEFAULT_SPEED) -> GradeResult:
    """Scrape bowl 0, immediately scoop from it, then deliver."""
    food = food_events(trace)
    for i, event in enumerate(food[:-1]):
        nxt = food[i + 1]
        if (
            event.kind == SCRAPE_PERFORMED
            and event.payload["bowl"] == 0
            and nxt.kind == SCOOP_COMPLETED
            and nxt.payload["bowl"] == 0
        ):
            if any(e.kind == BITE_DELIVERED and e.t >= nxt.t for e in food):
                return _ok("bowl 0 was scraped, scooped, and delivered")
            return _fail("the post-scrape scoop never reached the mouth")
    return _fail("no scrape of bowl 0 immediately followed by a scoop from it")


def grade_t4(trace: list[TraceEvent], default_speed: float = DEFAULT_SPEED) -> GradeResult:
    """Three scoop-and-deliver cycles from bowl 1, paused between bites."""
    food = food_events(trace)
    if _kinds(food) != [SCOOP_COMPLETED, BITE_DELIVERED] * 3:
        return _fail(
            "expected three scoop-then-bite cycles, saw " + ", ".join(_kinds(food) or ["nothing"])
        )
    scoops = [e for e in food if e.kind == SCOOP_COMPLETED]
    wrong = [e.payload["bowl"] for e in scoops if e.payload["bowl"] != 1]
    if wrong:
        return _fail(f"scoops must all come from bowl 1, saw bowls {wrong}")
    bites = [e for e in food if e.kind == BITE_DELIVERED]
    for i in range(2):
        if not _wait_between(trace, bites[i].t, scoops[i + 1].t):
            return _fail(
                f"no pause of at least {MIN_PAUSE_SECONDS:g}s between bite "
                f"{i + 1} and the next scoop"
            )
    return _ok("three paced bites from bowl 1 were delivered")


def grade_t5(trace: list[TraceEvent], default_speed: float = DEFAULT_SPEED) -> GradeResult:
    """A bite from bowl 2, a pause, then a bite from bowl 0."""
    food = food_events(trace)
    if _kinds(food) != [SCOOP_COMPLETED, BITE_DELIVERED] * 2:
        return _fail(
            "expected two scoop-then-bite cycles, saw " + ", ".join(_kinds(food) or ["nothing"])
        )
    scoops = [e for e in food if e.kind == SCOOP_COMPLETED]
    bowls = [e.payload["bowl"] for e in scoops]
    if bowls != [2, 0]:
        return _fail(f"expected bowls [2, 0] in order, saw {bowls}")
    bites = [e for e in food if e.kind == BITE_DELIVERED]
    if not _wait_between(trace, bites[0].t, scoops[1].t):
        return _fail(
            f"no pause of at least {MIN_PAUSE_SECONDS:g}s between the two bites"
        )
    return _ok("a bite from bowl 2 then a bite from bowl 0 were delivered")


ORACLES = {
    "practice": grade_practice,
    "t1": grade_t1,
    "t2": grade_t2,
    "t3": grade_t3,
    "t4": grade_t4,
    "t5": grade_t5,
}


def grade(task: str, trace: list[TraceEvent], default_speed: float = DEFAULT_SPEED) -> GradeResult:
    """Judge one task's trace; unknown tasks are a caller error."""
    if task not in ORACLES:
        raise ValueError(f"no oracle for task {task!r}")
    return ORACLES[task](trace, default_speed)
