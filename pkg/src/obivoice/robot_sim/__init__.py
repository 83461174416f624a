"""Deterministic kinematic and food-state simulation of the feeding arm."""

from .config import ActionPath, RobotConfig
from .executor import (
    CUE_SCOOPING_NOW,
    CUE_SCRAPING_NOW,
    QueueControls,
    ScheduledControls,
    Simulator,
    VirtualClock,
    WallClock,
)
from .state import (
    BITE_DELIVERED,
    CUE_EMITTED,
    FOOD_EVENT_KINDS,
    HALTED,
    MOTION_EVENT_KINDS,
    PAUSED_AT,
    RESUMED_AT,
    SCOOP_COMPLETED,
    SCRAPE_PERFORMED,
    SEGMENT_END,
    SEGMENT_START,
    WAIT_STARTED,
    AlreadyRunning,
    ArmState,
    BowlState,
    ResetWhileRunning,
    RobotState,
    Status,
    TraceEvent,
    food_events,
    reset,
    trace_to_jsonl,
)
from .timing import ZeroSpeed, segment_duration

__all__ = [
    "ActionPath",
    "RobotConfig",
    "QueueControls",
    "ScheduledControls",
    "Simulator",
    "VirtualClock",
    "WallClock",
    "CUE_SCOOPING_NOW",
    "CUE_SCRAPING_NOW",
    "AlreadyRunning",
    "ArmState",
    "BowlState",
    "ResetWhileRunning",
    "RobotState",
    "Status",
    "TraceEvent",
    "food_events",
    "reset",
    "trace_to_jsonl",
    "ZeroSpeed",
    "segment_duration",
    "BITE_DELIVERED",
    "CUE_EMITTED",
    "FOOD_EVENT_KINDS",
    "HALTED",
    "MOTION_EVENT_KINDS",
    "PAUSED_AT",
    "RESUMED_AT",
    "SCOOP_COMPLETED",
    "SCRAPE_PERFORMED",
    "SEGMENT_END",
    "SEGMENT_START",
    "WAIT_STARTED",
]
