"""The restricted code dialect the model is allowed to speak.

Model completions are Python-shaped but only a tiny imperative subset is
accepted: ``obi.<variable> = <literal>`` assignments, ``obi.<function>(...)``
calls, ``time.sleep(<number>)``, and ``for _ in range(<int>):`` loops over
those statements.  Everything else — imports, definitions, conditionals,
arithmetic, unknown callables — is rejected with a specific error so the
session can speak a useful error message.  Nothing in a completion is ever
executed; sources are parsed into a small AST, validated against safety
limits, and lowered into a plan of physically-parameterized steps.
"""

from __future__ import annotations

import ast as pyast
import enum
import re
from dataclasses import dataclass, replace
from typing import Union


# --------------------------------------------------------------------------
# Errors.  Parse errors describe why a completion is not in the dialect;
# validation errors describe why an in-dialect program is unsafe to run.
# Every error carries a human-readable reason for the spoken error cue.


class PlanError(Exception):
    """Base class for plan rejections with a user-facing reason."""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.user_message = message


class ImportForbidden(PlanError):
    pass


class DefinitionForbidden(PlanError):
    pass


class UnknownCallable(PlanError):
    pass


class UnsupportedConstruct(PlanError):
    pass


class PlanSyntaxError(PlanError):
    pass


class BowlOutOfRange(PlanError):
    pass


class LoopBoundExceeded(PlanError):
    pass


class SleepTooLong(PlanError):
    pass


class PlanTooLarge(PlanError):
    pass


# --------------------------------------------------------------------------
# Whitelist and limits.

#: Robot functions the model may call, with required argument count.
FUNCTION_ARITY: dict[str, int] = {
    "scoop_from_bowlno": 1,
    "scrape_down_bowlno": 1,
    "move_to_mouth": 0,
    "start": 0,
    "stop": 0,
    "pause_indefinitely": 0,
}

#: Functions whose single argument is a bowl index.
BOWL_FUNCTIONS = frozenset({"scoop_from_bowlno", "scrape_down_bowlno"})

#: Robot variables the model may assign.
VARIABLES = frozenset({"speed", "accel", "deep_scoop"})

#: Loops may nest at most this deep.
MAX_LOOP_NESTING = 2

#: Hardware full speed; the software ceiling must stay strictly below it.
HARDWARE_SPEED_LIMIT = 120.0

SPEED_MAX = 80.0
ACCEL_MAX = 250.0
LEVEL_MAX = 5


@dataclass(frozen=True)
class SafetyLimits:
    """Bounds every plan is checked against before execution."""

    max_loop_iterations: int = 20
    max_plan_steps: int = 100
    max_sleep_seconds: float = 60.0
    speed_ceiling: float = SPEED_MAX
    accel_ceiling: float = ACCEL_MAX

    def __post_init__(self) -> None:
        if not 0 < self.speed_ceiling <= SPEED_MAX:
            raise ValueError(
                f"speed ceiling must stay in (0, {SPEED_MAX}] deg/s, "
                f"below the hardware's {HARDWARE_SPEED_LIMIT} deg/s"
            )
        if not 0 < self.accel_ceiling <= ACCEL_MAX:
            raise ValueError(f"accel ceiling must stay in (0, {ACCEL_MAX}]")


# --------------------------------------------------------------------------
# AST.


@dataclass(frozen=True)
class Assign:
    variable: str
    value: Union[int, float, bool]


@dataclass(frozen=True)
class Call:
    function: str
    arg: int | None = None


@dataclass(frozen=True)
class Sleep:
    seconds: float


@dataclass(frozen=True)
class ForRange:
    count: int
    body: tuple["Stmt", ...]


Stmt = Union[Assign, Call, Sleep, ForRange]


@dataclass(frozen=True)
class Ast:
    statements: tuple[Stmt, ...]


# --------------------------------------------------------------------------
# Parsing.

_FENCE_RE = re.compile(r"```[a-zA-Z0-9_+-]*\n(.*?)```", re.DOTALL)


def strip_code_fences(source: str) -> str:
    """If the completion contains fenced code blocks, keep only their contents."""
    blocks = _FENCE_RE.findall(source)
    if blocks:
        return "\n".join(block.strip("\n") for block in blocks)
    return source


def _literal_number(node: pyast.expr) -> Union[int, float, bool, None]:
    """Evaluate an int/float/bool literal, allowing a leading minus. None if not one."""
    if isinstance(node, pyast.UnaryOp) and isinstance(node.op, pyast.USub):
        inner = _literal_number(node.operand)
        if isinstance(inner, bool) or inner is None:
            return None
        return -inner
    if isinstance(node, pyast.Constant) and isinstance(node.value, (int, float, bool)):
        return node.value
    return None


def _convert_assign(node: pyast.Assign) -> Assign:
    if len(node.targets) != 1:
        raise UnsupportedConstruct("chained assignment is not supported")
    target = node.targets[0]
    if not (
        isinstance(target, pyast.Attribute)
        and isinstance(target.value, pyast.Name)
        and target.value.id == "obi"
    ):
        raise UnsupportedConstruct("only obi.<variable> may be assigned")
    if target.attr not in VARIABLES:
        raise UnsupportedConstruct(f"unknown robot variable 'obi.{target.attr}'")
    value = _literal_number(node.value)
    if value is None:
        raise UnsupportedConstruct(
            f"obi.{target.attr} must be assigned a plain number or True/False"
        )
    if target.attr == "deep_scoop":
        if not isinstance(value, bool):
            raise UnsupportedConstruct("obi.deep_scoop must be True or False")
    elif isinstance(value, bool):
        raise UnsupportedConstruct(f"obi.{target.attr} must be assigned a number")
    return Assign(variable=target.attr, value=value)


def _convert_call(node: pyast.Call) -> Union[Call, Sleep]:
    func = node.func
    if node.keywords:
        raise UnsupportedConstruct("keyword arguments are not supported")
    if not isinstance(func, pyast.Attribute) or not isinstance(func.value, pyast.Name):
        raise UnknownCallable("only obi.<function>() and time.sleep() may be called")
    obj, name = func.value.id, func.attr

    if obj == "time" and name == "sleep":
        if len(node.args) != 1:
            raise UnsupportedConstruct("time.sleep takes exactly one number")
        seconds = _literal_number(node.args[0])
        if seconds is None or isinstance(seconds, bool):
            raise UnsupportedConstruct("time.sleep duration must be a plain number")
        if seconds < 0:
            raise UnsupportedConstruct("time.sleep duration must be non-negative")
        # Quantize to milliseconds so durations stay exact downstream.
        return Sleep(seconds=round(float(seconds) * 1000.0) / 1000.0)

    if obj != "obi":
        raise UnknownCallable(f"'{obj}.{name}' is not callable here")
    if name not in FUNCTION_ARITY:
        raise UnknownCallable(f"'obi.{name}' is not a robot function")
    arity = FUNCTION_ARITY[name]
    if len(node.args) != arity:
        raise UnsupportedConstruct(
            f"obi.{name} takes {arity} argument{'s' if arity != 1 else ''}, "
            f"got {len(node.args)}"
        )
    if arity == 0:
        return Call(function=name)
    arg = _literal_number(node.args[0])
    if not isinstance(arg, int) or isinstance(arg, bool):
        raise UnsupportedConstruct(f"obi.{name} argument must be an integer literal")
    return Call(function=name, arg=arg)


def _convert_for(node: pyast.For, depth: int) -> ForRange:
    if depth + 1 > MAX_LOOP_NESTING:
        raise UnsupportedConstruct(
            f"loops may nest at most {MAX_LOOP_NESTING} levels deep"
        )
    if node.orelse:
        raise UnsupportedConstruct("for/else is not supported")
    if not isinstance(node.target, pyast.Name):
        raise UnsupportedConstruct("loop target must be a simple name")
    it = node.iter
    if not (
        isinstance(it, pyast.Call)
        and isinstance(it.func, pyast.Name)
        and it.func.id == "range"
    ):
        raise UnsupportedConstruct("loops must iterate over range(<count>)")
    if len(it.args) != 1 or it.keywords:
        raise UnsupportedConstruct("range() takes exactly one count here")
    count = _literal_number(it.args[0])
    if not isinstance(count, int) or isinstance(count, bool) or count < 0:
        raise UnsupportedConstruct("range count must be a non-negative integer literal")
    body = _convert_stmts(node.body, depth + 1)
    return ForRange(count=count, body=body)


def _convert_stmts(nodes: list[pyast.stmt], depth: int) -> tuple[Stmt, ...]:
    out: list[Stmt] = []
    for node in nodes:
        if isinstance(node, (pyast.Import, pyast.ImportFrom)):
            names = ", ".join(alias.name for alias in node.names)
            raise ImportForbidden(f"disallowed import of '{names}'")
        if isinstance(node, (pyast.FunctionDef, pyast.AsyncFunctionDef, pyast.ClassDef)):
            raise DefinitionForbidden("defining functions or classes is not allowed")
        if isinstance(node, pyast.Assign):
            out.append(_convert_assign(node))
        elif isinstance(node, pyast.Expr) and isinstance(node.value, pyast.Call):
            out.append(_convert_call(node.value))
        elif isinstance(node, pyast.For):
            out.append(_convert_for(node, depth))
        else:
            raise UnsupportedConstruct(
                f"'{type(node).__name__}' statements are not part of the robot dialect"
            )
    return tuple(out)


def parse(source: str) -> Ast:
    """Parse a raw model completion into the dialect AST.

    The completion is never executed.  Code fences are stripped first; any
    statement outside the dialect raises one of the parse errors.
    """
    text = strip_code_fences(source)
    try:
        tree = pyast.parse(text)
    except SyntaxError as exc:
        raise PlanSyntaxError(f"could not read the generated code: {exc.msg}") from exc
    except (ValueError, RecursionError, MemoryError) as exc:
        raise PlanSyntaxError(f"could not read the generated code: {exc}") from exc
    statements = _convert_stmts(tree.body, depth=0)
    if not statements:
        raise UnsupportedConstruct("the generated code contains no robot instructions")
    return Ast(statements=statements)


# --------------------------------------------------------------------------
# Variables and scaling.


class ScaleKind(enum.Enum):
    SPEED = "speed"
    ACCEL = "accel"


def scale_to_physical(level: int, kind: ScaleKind) -> float:
    """Map a discrete 0–5 level linearly onto the physical range."""
    if kind is ScaleKind.SPEED:
        return level * (SPEED_MAX / LEVEL_MAX)
    return level * (ACCEL_MAX / LEVEL_MAX)


@dataclass(frozen=True)
class RobotVariableSet:
    """Session defaults for the motion variables, as discrete levels."""

    speed_level: int = 3
    accel_level: int = 3
    deep_scoop: bool = False

    def __post_init__(self) -> None:
        for name in ("speed_level", "accel_level"):
            level = getattr(self, name)
            if not 0 <= level <= LEVEL_MAX:
                raise ValueError(f"{name} must be within 0..{LEVEL_MAX}")


class VariableMode(enum.Enum):
    """How assigned speed/accel values are interpreted.

    LEVELS: discrete 0–5 levels scaled linearly to physical units (v3
    prompts).  CONTINUOUS: raw physical units clipped to the ceilings (v1/v2
    prompts).
    """

    LEVELS = "levels"
    CONTINUOUS = "continuous"


def _clamp(value: float, low: float, high: float) -> float:
    return min(max(value, low), high)


@dataclass
class VariableState:
    """The motion-variable values in effect at a point in the program."""

    mode: VariableMode
    speed: float  # deg/s
    accel: float  # deg/s^2
    deep_scoop: bool

    @classmethod
    def from_defaults(
        cls, defaults: RobotVariableSet, mode: VariableMode = VariableMode.LEVELS
    ) -> "VariableState":
        return cls(
            mode=mode,
            speed=scale_to_physical(defaults.speed_level, ScaleKind.SPEED),
            accel=scale_to_physical(defaults.accel_level, ScaleKind.ACCEL),
            deep_scoop=defaults.deep_scoop,
        )

    def assign(self, variable: str, value: Union[int, float, bool], limits: SafetyLimits) -> None:
        if variable == "deep_scoop":
            self.deep_scoop = bool(value)
        elif variable == "speed":
            self.speed = self._physical(value, ScaleKind.SPEED, limits.speed_ceiling)
        elif variable == "accel":
            self.accel = self._physical(value, ScaleKind.ACCEL, limits.accel_ceiling)
        else:  # pragma: no cover - parse whitelists variables already
            raise ValueError(f"unknown variable {variable}")

    def _physical(self, value: float, kind: ScaleKind, ceiling: float) -> float:
        if self.mode is VariableMode.LEVELS:
            level = int(_clamp(round(value), 0, LEVEL_MAX))
            return min(scale_to_physical(level, kind), ceiling)
        return _clamp(float(value), 0.0, ceiling)


# --------------------------------------------------------------------------
# Validation.


def _clamped_assign(stmt: Assign, limits: SafetyLimits, mode: VariableMode, warnings: list[str]) -> Assign:
    if stmt.variable == "deep_scoop":
        return stmt
    if mode is VariableMode.LEVELS:
        low, high = 0, LEVEL_MAX
        clamped: Union[int, float] = int(_clamp(round(stmt.value), low, high))
    else:
        low, high = 0.0, (
            limits.speed_ceiling if stmt.variable == "speed" else limits.accel_ceiling
        )
        clamped = _clamp(float(stmt.value), low, high)
    if clamped != stmt.value:
        warnings.append(
            f"obi.{stmt.variable} value {stmt.value} adjusted to {clamped} "
            f"(allowed range {low} to {high})"
        )
    return Assign(variable=stmt.variable, value=clamped)


def _validate_stmts(
    stmts: tuple[Stmt, ...],
    limits: SafetyLimits,
    mode: VariableMode,
    warnings: list[str],
) -> tuple[tuple[Stmt, ...], int]:
    """Return (rewritten statements, unrolled step count)."""
    out: list[Stmt] = []
    steps = 0
    for stmt in stmts:
        if isinstance(stmt, Assign):
            out.append(_clamped_assign(stmt, limits, mode, warnings))
        elif isinstance(stmt, Call):
            if stmt.function in BOWL_FUNCTIONS and not 0 <= (stmt.arg or 0) <= 3:
                raise BowlOutOfRange(
                    f"bowl {stmt.arg} does not exist; bowls are numbered 0 to 3"
                )
            steps += 1
            out.append(stmt)
        elif isinstance(stmt, Sleep):
            if stmt.seconds > limits.max_sleep_seconds:
                raise SleepTooLong(
                    f"a {stmt.seconds} s wait exceeds the "
                    f"{limits.max_sleep_seconds} s limit"
                )
            steps += 1
            out.append(stmt)
        else:  # ForRange
            if stmt.count > limits.max_loop_iterations:
                raise LoopBoundExceeded(
                    f"{stmt.count} repetitions exceed the "
                    f"{limits.max_loop_iterations}-repetition limit"
                )
            body, body_steps = _validate_stmts(stmt.body, limits, mode, warnings)
            steps += stmt.count * body_steps
            out.append(ForRange(count=stmt.count, body=body))
    return tuple(out), steps


def validate(
    ast: Ast,
    limits: SafetyLimits | None = None,
    mode: VariableMode = VariableMode.LEVELS,
) -> tuple[Ast, list[str]]:
    """Check an AST against the safety limits.

    Out-of-range variable values are clamped with a warning (never an
    error); structural violations — bad bowls, oversized loops or sleeps,
    oversized plans — are rejected.
    """
    limits = limits or SafetyLimits()
    warnings: list[str] = []
    statements, steps = _validate_stmts(ast.statements, limits, mode, warnings)
    if steps > limits.max_plan_steps:
        raise PlanTooLarge(
            f"the plan would run {steps} steps; the limit is {limits.max_plan_steps}"
        )
    return Ast(statements=statements), warnings


# --------------------------------------------------------------------------
# Lowering.


class ControlAction(enum.Enum):
    START = "start"
    STOP = "stop"
    PAUSE_INDEFINITELY = "pause_indefinitely"


@dataclass(frozen=True)
class Scoop:
    bowl: int
    deep: bool
    speed: float
    accel: float


@dataclass(frozen=True)
class ScrapeThenScoop:
    bowl: int
    deep: bool
    speed: float
    accel: float


@dataclass(frozen=True)
class MoveToMouth:
    speed: float
    accel: float


@dataclass(frozen=True)
class Wait:
    seconds: float


@dataclass(frozen=True)
class Control:
    action: ControlAction


Step = Union[Scoop, ScrapeThenScoop, MoveToMouth, Wait, Control]


@dataclass(frozen=True)
class ActionPlan:
    steps: tuple[Step, ...]


def _lower_stmts(
    stmts: tuple[Stmt, ...],
    state: VariableState,
    limits: SafetyLimits,
    out: list[Step],
) -> None:
    for stmt in stmts:
        if isinstance(stmt, Assign):
            state.assign(stmt.variable, stmt.value, limits)
        elif isinstance(stmt, Sleep):
            out.append(Wait(seconds=stmt.seconds))
        elif isinstance(stmt, ForRange):
            for _ in range(stmt.count):
                _lower_stmts(stmt.body, state, limits, out)
        else:
            name = stmt.function
            if name == "scoop_from_bowlno":
                out.append(
                    Scoop(bowl=stmt.arg, deep=state.deep_scoop, speed=state.speed, accel=state.accel)
                )
            elif name == "scrape_down_bowlno":
                out.append(
                    ScrapeThenScoop(
                        bowl=stmt.arg, deep=state.deep_scoop, speed=state.speed, accel=state.accel
                    )
                )
            elif name == "move_to_mouth":
                out.append(MoveToMouth(speed=state.speed, accel=state.accel))
            else:
                out.append(Control(action=ControlAction(name)))


def lower(
    ast: Ast,
    defaults: RobotVariableSet | None = None,
    mode: VariableMode = VariableMode.LEVELS,
    limits: SafetyLimits | None = None,
    state: VariableState | None = None,
) -> ActionPlan:
    """Lower a validated AST into an executable plan.

    Loops are unrolled; each call snapshots the variable values in effect
    at that point of the program (defaults overlaid by prior assignments).
    Passing ``state`` lets a session carry variable values across commands;
    the state object is mutated to reflect the program's final values.
    """
    limits = limits or SafetyLimits()
    if state is None:
        state = VariableState.from_defaults(defaults or RobotVariableSet(), mode)
    steps: list[Step] = []
    _lower_stmts(ast.statements, state, limits, steps)
    return ActionPlan(steps=tuple(steps))


def compile_completion(
    source: str,
    defaults: RobotVariableSet | None = None,
    mode: VariableMode = VariableMode.LEVELS,
    limits: SafetyLimits | None = None,
    state: VariableState | None = None,
) -> tuple[ActionPlan, list[str]]:
    """parse → validate → lower in one call; returns (plan, warnings)."""
    ast = parse(source)
    checked, warnings = validate(ast, limits, mode)
    plan = lower(checked, defaults, mode, limits, state)
    return plan, warnings


def plan_to_jsonable(plan: ActionPlan) -> list[dict]:
    """A plain-data rendering of a plan for CLI output and the wire."""
    out = []
    for step in plan.steps:
        if isinstance(step, Scoop):
            out.append(
                {"kind": "scoop", "bowl": step.bowl, "deep": step.deep,
                 "speed": step.speed, "accel": step.accel}
            )
        elif isinstance(step, ScrapeThenScoop):
            out.append(
                {"kind": "scrape_then_scoop", "bowl": step.bowl, "deep": step.deep,
                 "speed": step.speed, "accel": step.accel}
            )
        elif isinstance(step, MoveToMouth):
            out.append({"kind": "move_to_mouth", "speed": step.speed, "accel": step.accel})
        elif isinstance(step, Wait):
            out.append({"kind": "wait", "seconds": step.seconds})
        else:
            out.append({"kind": "control", "action": step.action.value})
    return out
