"""Simulated arm geometry: named waypoints and per-action segment paths."""

from __future__ import annotations

import math
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

import yaml

JOINTS = 6
BOWLS = 4


@dataclass(frozen=True)
class ActionPath:
    """Ordered waypoint names for one action, with milestone markers.

    ``milestones`` maps a segment index to the food event ("scoop",
    "scrape", or "bite") that fires when that segment completes.
    """

    path: tuple[str, ...]
    milestones: tuple[tuple[int, str], ...]


@dataclass(frozen=True)
class RobotConfig:
    waypoints: dict[str, tuple[float, ...]]
    action_segments: dict[str, ActionPath]
    scoop_units_normal: int
    scoop_units_deep: int
    scrape_fraction: float
    initial_bowls: tuple[tuple[str, int, int], ...]  # (label, center, edge)

    def __post_init__(self) -> None:
        for name, pose in self.waypoints.items():
            if len(pose) != JOINTS:
                raise ValueError(f"waypoint {name!r} must have {JOINTS} joint angles")
            if not all(math.isfinite(a) for a in pose):
                raise ValueError(f"waypoint {name!r} has a non-finite joint angle")
        for action, spec in self.action_segments.items():
            for template in spec.path:
                if "{bowl}" in template:
                    for bowl in range(BOWLS):
                        self._require(template.format(bowl=bowl), action)
                else:
                    self._require(template, action)
            for index, event in spec.milestones:
                if not 0 <= index < len(spec.path):
                    raise ValueError(f"{action}: milestone index {index} out of range")
                if event not in ("scoop", "scrape", "bite"):
                    raise ValueError(f"{action}: unknown milestone event {event!r}")
        if "home" not in self.waypoints:
            raise ValueError("a 'home' waypoint is required")
        if len(self.initial_bowls) != BOWLS:
            raise ValueError(f"exactly {BOWLS} initial bowls required")

    def _require(self, name: str, action: str) -> None:
        if name not in self.waypoints:
            raise ValueError(f"action {action!r} references undefined waypoint {name!r}")

    def waypoint(self, name: str) -> tuple[float, ...]:
        return self.waypoints[name]

    def path_for(self, action: str, bowl: int | None) -> tuple[list[str], list[tuple[int, str]]]:
        """Concrete waypoint names and milestones for one step."""
        spec = self.action_segments[action]
        names = [
            t.format(bowl=bowl) if "{bowl}" in t else t for t in spec.path
        ]
        return names, list(spec.milestones)

    @classmethod
    def from_mapping(cls, raw: dict) -> "RobotConfig":
        waypoints = {
            str(name): tuple(float(a) for a in pose)
            for name, pose in (raw.get("waypoints") or {}).items()
        }
        actions: dict[str, ActionPath] = {}
        for action, spec in (raw.get("action_segments") or {}).items():
            milestones = tuple(
                (int(m["after_segment"]), str(m["event"]))
                for m in spec.get("milestones", ())
            )
            actions[str(action)] = ActionPath(
                path=tuple(str(p) for p in spec["path"]), milestones=milestones
            )
        units = raw.get("scoop_units") or {}
        bowls = tuple(
            (str(b["label"]), int(b["center"]), int(b["edge"]))
            for b in raw.get("initial_bowls") or ()
        )
        return cls(
            waypoints=waypoints,
            action_segments=actions,
            scoop_units_normal=int(units.get("normal", 1)),
            scoop_units_deep=int(units.get("deep", 2)),
            scrape_fraction=float(raw.get("scrape_fraction", 1.0)),
            initial_bowls=bowls,
        )

    @classmethod
    def from_file(cls, path: str | Path) -> "RobotConfig":
        with open(path, "r", encoding="utf-8") as fh:
            return cls.from_mapping(yaml.safe_load(fh) or {})

    @classmethod
    def default(cls) -> "RobotConfig":
        ref = resources.files("obivoice").joinpath("data", "robot_default.yaml")
        return cls.from_mapping(yaml.safe_load(ref.read_text(encoding="utf-8")))
