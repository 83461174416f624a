"""Shared test helpers: random dialect programs and independent oracles.

The reference interpreter here is deliberately written as a plain
sequential walk with its own variable environment, so it can serve as an
independent check on the lowering pipeline's snapshot/unroll behavior.
"""

from __future__ import annotations

import math
import random

from obivoice.plan_language import (
    ActionPlan,
    Assign,
    Ast,
    Call,
    Control,
    ControlAction,
    ForRange,
    MoveToMouth,
    Scoop,
    ScrapeThenScoop,
    Sleep,
    Wait,
)

# ---------------------------------------------------------------------------
# Independent closed-form motion-time oracle (accelerate/cruise/decelerate).


def reference_motion_time(distance: float, speed: float, accel: float) -> float:
    if distance == 0:
        return 0.0
    if distance >= speed * speed / accel:
        return speed / accel + distance / speed
    return 2.0 * math.sqrt(distance / accel)


# ---------------------------------------------------------------------------
# Reference interpreter over the dialect AST: sequential execution with an
# explicit variable environment, clamping on assignment.


def interpret_reference(ast: Ast, mode: str = "levels") -> list[tuple]:
    """Return the step tuples a sequential execution of ``ast`` produces.

    Tuples: ("scoop"|"scrape", bowl, deep, speed, accel), ("mouth", speed,
    accel), ("wait", seconds), ("control", name).
    """
    if mode == "levels":
        env = {"speed": 3, "accel": 3, "deep_scoop": False}
    else:
        env = {"speed": 48.0, "accel": 150.0, "deep_scoop": False}

    def clamp_assign(name, value):
        if name == "deep_scoop":
            return bool(value)
        if mode == "levels":
            v = round(value)
            return max(0, min(5, v))
        high = 80.0 if name == "speed" else 250.0
        return max(0.0, min(high, float(value)))

    def physical(name):
        if mode == "levels":
            per = 16.0 if name == "speed" else 50.0
            return env[name] * per
        return env[name]

    steps: list[tuple] = []

    def run(stmts):
        for stmt in stmts:
            if isinstance(stmt, Assign):
                env[stmt.variable] = clamp_assign(stmt.variable, stmt.value)
            elif isinstance(stmt, Sleep):
                steps.append(("wait", stmt.seconds))
            elif isinstance(stmt, ForRange):
                for _ in range(stmt.count):
                    run(stmt.body)
            elif isinstance(stmt, Call):
                if stmt.function == "scoop_from_bowlno":
                    steps.append(
                        ("scoop", stmt.arg, env["deep_scoop"], physical("speed"), physical("accel"))
                    )
                elif stmt.function == "scrape_down_bowlno":
                    steps.append(
                        ("scrape", stmt.arg, env["deep_scoop"], physical("speed"), physical("accel"))
                    )
                elif stmt.function == "move_to_mouth":
                    steps.append(("mouth", physical("speed"), physical("accel")))
                else:
                    steps.append(("control", stmt.function))

    run(ast.statements)
    return steps


def plan_as_tuples(plan: ActionPlan) -> list[tuple]:
    """Render an ActionPlan in the reference interpreter's tuple shape."""
    out: list[tuple] = []
    for step in plan.steps:
        if isinstance(step, Scoop):
            out.append(("scoop", step.bowl, step.deep, step.speed, step.accel))
        elif isinstance(step, ScrapeThenScoop):
            out.append(("scrape", step.bowl, step.deep, step.speed, step.accel))
        elif isinstance(step, MoveToMouth):
            out.append(("mouth", step.speed, step.accel))
        elif isinstance(step, Wait):
            out.append(("wait", step.seconds))
        else:
            out.append(("control", step.action.value))
    return out


# ---------------------------------------------------------------------------
# Random grammar-legal program sources.


def random_source(
    rng: random.Random,
    *,
    allow_controls: bool = False,
    allow_out_of_range_values: bool = True,
    max_top_level: int = 8,
    max_loop_depth: int = 2,
) -> str:
    """Generate a random program inside the dialect grammar.

    Bowls stay in 0..3 and loops/sleeps inside the default safety limits,
    so the result always survives validation; variable values may range
    outside the legal window to exercise clamping.
    """
    lines: list[str] = []
    unrolled = 0  # step-producing statements after loop unrolling

    def assign_line() -> str:
        var = rng.choice(["speed", "accel", "deep_scoop"])
        if var == "deep_scoop":
            value = rng.choice(["True", "False"])
        elif allow_out_of_range_values:
            value = rng.choice(
                [str(rng.randint(-3, 9)), f"{rng.uniform(-2.0, 7.5):.2f}", str(rng.randint(0, 5))]
            )
        else:
            value = str(rng.randint(0, 5))
        return f"obi.{var} = {value}"

    def call_line() -> str:
        choices = ["scoop_from_bowlno", "scrape_down_bowlno", "move_to_mouth"]
        if allow_controls:
            choices += ["start", "stop", "pause_indefinitely"]
        name = rng.choice(choices)
        if name in ("scoop_from_bowlno", "scrape_down_bowlno"):
            return f"obi.{name}({rng.randint(0, 3)})"
        return f"obi.{name}()"

    def sleep_line() -> str:
        return f"time.sleep({rng.choice([1, 2, 4, 0.5, 2.5])})"

    def gen_block(depth: int, multiplier: int, max_stmts: int, indent: str) -> list[str]:
        nonlocal unrolled
        body: list[str] = []
        for _ in range(rng.randint(1, max_stmts)):
            kind = rng.choices(
                ["assign", "call", "sleep", "loop"],
                weights=[2, 5, 2, 1 if depth < max_loop_depth else 0],
            )[0]
            if kind == "assign":
                body.append(indent + assign_line())
            elif kind == "loop":
                count = rng.randint(0, 4)
                inner = gen_block(depth + 1, multiplier * count, 3, indent + "    ")
                if not inner:
                    inner = [indent + "    " + assign_line()]
                body.append(indent + f"for i in range({count}):")
                body.extend(inner)
            else:
                line = call_line() if kind == "call" else sleep_line()
                if unrolled + multiplier > 100:
                    continue
                unrolled += multiplier
                body.append(indent + line)
        return body

    lines = gen_block(0, 1, max_top_level, "")
    if not any(l.lstrip().startswith(("obi.", "time.")) for l in lines):
        lines.append("obi.move_to_mouth()")
    return "\n".join(lines)


_BROKEN_SOURCES = [
    "import os\nobi.move_to_mouth()",
    "from os import path",
    "def feed():\n    obi.move_to_mouth()",
    "class X:\n    pass",
    "obi.self_destruct()",
    "print('hi')",
    "os.system('ls')",
    "while True:\n    obi.move_to_mouth()",
    "if True:\n    obi.move_to_mouth()",
    "obi.scoop_from_bowlno(9)",
    "obi.scoop_from_bowlno(-2)",
    "obi.scoop_from_bowlno()",
    "obi.move_to_mouth(1)",
    "time.sleep(-3)",
    "time.sleep(999)",
    "for i in range(1000):\n    obi.move_to_mouth()",
    "obi.speed = 'fast'",
    "x = 5",
    "obi.speed += 1",
    "obi.scoop_from_bowlno(1",
    "",
    "   \n\n",
    "I will feed you yogurt now!",
    "for i in range(2):\n    for j in range(2):\n        for k in range(2):\n            obi.move_to_mouth()",
]


def random_completion(rng: random.Random, valid_ratio: float = 0.6) -> tuple[str, bool]:
    """A completion for cue-protocol tests: (source, intended_valid)."""
    if rng.random() < valid_ratio:
        return random_source(rng, allow_controls=False), True
    return rng.choice(_BROKEN_SOURCES), False


# ---------------------------------------------------------------------------
# Random ActionPlans (for executor-level tests that skip the parser).


def random_plan(
    rng: random.Random,
    *,
    min_steps: int = 1,
    max_steps: int = 10,
    allow_controls: bool = False,
    min_speed_level: int = 1,
) -> ActionPlan:
    steps = []
    for _ in range(rng.randint(min_steps, max_steps)):
        speed = rng.randint(min_speed_level, 5) * 16.0
        accel = rng.randint(1, 5) * 50.0
        kind = rng.choices(
            ["scoop", "scrape", "mouth", "wait", "control"],
            weights=[4, 2, 4, 2, 1 if allow_controls else 0],
        )[0]
        if kind == "scoop":
            steps.append(Scoop(bowl=rng.randint(0, 3), deep=rng.random() < 0.3, speed=speed, accel=accel))
        elif kind == "scrape":
            steps.append(
                ScrapeThenScoop(bowl=rng.randint(0, 3), deep=rng.random() < 0.3, speed=speed, accel=accel)
            )
        elif kind == "mouth":
            steps.append(MoveToMouth(speed=speed, accel=accel))
        elif kind == "wait":
            steps.append(Wait(seconds=rng.choice([0.5, 1.0, 2.0, 4.0])))
        else:
            steps.append(Control(action=rng.choice([ControlAction.STOP, ControlAction.START])))
    return ActionPlan(steps=tuple(steps))


class StubAdapter:
    """Model stand-in returning queued completions (or raising queued errors)."""

    def __init__(self, completions):
        self.completions = list(completions)
        self.calls: list[list[dict]] = []

    def complete(self, messages, params=None):
        self.calls.append(list(messages))
        if not self.completions:
            from obivoice.adapters import ModelUnavailable

            raise ModelUnavailable("no completion queued")
        item = self.completions.pop(0)
        if isinstance(item, Exception):
            raise item
        return item
