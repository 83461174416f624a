"""Robot state: arm pose, bowl inventories, execution status, trace events."""

from __future__ import annotations

import enum
import json
import math
from dataclasses import dataclass, field
from typing import Iterable, Iterator

from .config import BOWLS, RobotConfig


class Status(enum.Enum):
    IDLE = "idle"
    RUNNING = "running"
    PAUSED = "paused"
    STOPPED = "stopped"


class AlreadyRunning(Exception):
    """A plan was submitted while the robot was not idle."""


class ResetWhileRunning(Exception):
    """Reset was requested while a plan was running or paused."""


# Trace event kinds.
SEGMENT_START = "segment_start"
SEGMENT_END = "segment_end"
SCOOP_COMPLETED = "scoop_completed"
SCRAPE_PERFORMED = "scrape_performed"
BITE_DELIVERED = "bite_delivered"
WAIT_STARTED = "wait_started"
CUE_EMITTED = "cue_emitted"
HALTED = "halted"
PAUSED_AT = "paused_at"
RESUMED_AT = "resumed_at"

#: Event kinds describing food handling; task oracles look only at these.
FOOD_EVENT_KINDS = frozenset(
    {SCOOP_COMPLETED, SCRAPE_PERFORMED, BITE_DELIVERED, WAIT_STARTED}
)

#: Event kinds that indicate the arm did something after a halt (used to
#: check that a stop really is absorbing).
MOTION_EVENT_KINDS = frozenset(
    {SEGMENT_START, SEGMENT_END, SCOOP_COMPLETED, SCRAPE_PERFORMED, BITE_DELIVERED}
)


@dataclass(frozen=True)
class TraceEvent:
    t: float
    kind: str
    payload: dict = field(default_factory=dict)

    def to_jsonable(self) -> dict:
        return {"t": self.t, "kind": self.kind, **self.payload}


def food_events(trace: Iterable[TraceEvent]) -> list[TraceEvent]:
    return [e for e in trace if e.kind in FOOD_EVENT_KINDS]


def trace_to_jsonl(trace: Iterable[TraceEvent]) -> str:
    """One JSON object per line, one line per event."""
    return "\n".join(json.dumps(e.to_jsonable(), sort_keys=True) for e in trace)


@dataclass
class BowlState:
    label: str
    center_units: int
    edge_units: int

    @property
    def empty(self) -> bool:
        return self.center_units == 0 and self.edge_units == 0


@dataclass
class ArmState:
    pose: tuple[float, ...]
    spoon_load: int = 0


class RobotState:
    """Mutable simulation state with exact per-bowl food accounting."""

    def __init__(self, config: RobotConfig | None = None) -> None:
        self.config = config or RobotConfig.default()
        self.bowls: list[BowlState] = [
            BowlState(label, center, edge) for label, center, edge in self.config.initial_bowls
        ]
        self.initial_units = [b.center_units + b.edge_units for b in self.bowls]
        self.delivered = [0] * BOWLS
        self.spoon_by_bowl = [0] * BOWLS
        self.arm = ArmState(pose=self.config.waypoint("home"))
        self.status = Status.IDLE
        self.program_counter = 0
        self.segment_index = 0

    # -- food handling ----------------------------------------------------

    def perform_scoop(self, bowl: int, deep: bool) -> int:
        """Take food from the bowl's center onto the spoon.

        A deep scoop takes more; an empty center yields zero units (the
        spoon passes through air) — still a valid, observable outcome.
        """
        want = self.config.scoop_units_deep if deep else self.config.scoop_units_normal
        b = self.bowls[bowl]
        units = min(b.center_units, want)
        b.center_units -= units
        self.spoon_by_bowl[bowl] += units
        self.arm.spoon_load += units
        return units

    def perform_scrape(self, bowl: int) -> int:
        """Push edge food back to the bowl's center; returns units moved."""
        b = self.bowls[bowl]
        moved = min(b.edge_units, math.ceil(self.config.scrape_fraction * b.edge_units))
        b.edge_units -= moved
        b.center_units += moved
        return moved

    def deliver_bite(self) -> int:
        """Empty the spoon at the mouth; returns units delivered."""
        units = self.arm.spoon_load
        for bowl in range(BOWLS):
            self.delivered[bowl] += self.spoon_by_bowl[bowl]
            self.spoon_by_bowl[bowl] = 0
        self.arm.spoon_load = 0
        return units

    # -- bookkeeping -------------------------------------------------------

    def conservation_error(self) -> str | None:
        """None when every bowl's food is fully accounted for."""
        for bowl in range(BOWLS):
            b = self.bowls[bowl]
            total = b.center_units + b.edge_units + self.delivered[bowl] + self.spoon_by_bowl[bowl]
            if total != self.initial_units[bowl]:
                return (
                    f"bowl {bowl}: {self.initial_units[bowl]} initial != "
                    f"{b.center_units}+{b.edge_units}+{self.delivered[bowl]}"
                    f"+{self.spoon_by_bowl[bowl]}"
                )
            if b.center_units < 0 or b.edge_units < 0 or self.spoon_by_bowl[bowl] < 0:
                return f"bowl {bowl}: negative units"
        return None

    def snapshot(self) -> dict:
        """An immutable plain-data copy for observers."""
        return {
            "status": self.status.value,
            "pose": list(self.arm.pose),
            "spoon_load": self.arm.spoon_load,
            "program_counter": self.program_counter,
            "segment_index": self.segment_index,
            "bowls": [
                {
                    "label": b.label,
                    "center_units": b.center_units,
                    "edge_units": b.edge_units,
                }
                for b in self.bowls
            ],
            "delivered": list(self.delivered),
        }


def reset(state: RobotState) -> RobotState:
    """Return the arm home and the executor to idle; bowls are untouched."""
    if state.status in (Status.RUNNING, Status.PAUSED):
        raise ResetWhileRunning(f"cannot reset while {state.status.value}")
    state.arm.pose = state.config.waypoint("home")
    state.status = Status.IDLE
    state.program_counter = 0
    state.segment_index = 0
    return state
