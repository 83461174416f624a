"""Prompt assembly for the feeding-robot speech interface.

A prompt is built from a fixed framework of nine components.  Three template
versions exist: v1 carries the five core components, v2 adds the robot motion
variables, and v3 adds the remaining three (instructional materials, user
control functions, feedback).  Of those last three only the user control
functions contribute prompt text; instructional materials and feedback are
rollout documents (reference sheet, spoken cues) kept alongside the template
so the whole framework ships together.

Default section bodies live under ``obivoice/prompts/<version>/`` as plain
text files, one per component, and can be overridden by pointing the loader
at another directory with the same layout.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from string import Template

import yaml


class PromptComponentKind(enum.Enum):
    """The nine framework components a prompt can be built from."""

    ENVIRONMENT_DESCRIPTION = "environment_description"
    ROBOT_FUNCTIONS = "robot_functions"
    FUNCTION_APPLICATIONS = "function_applications"
    CODE_SPECIFICATIONS = "code_specifications"
    SAFETY = "safety"
    ROBOT_VARIABLES = "robot_variables"
    INSTRUCTIONAL_MATERIALS = "instructional_materials"
    USER_CONTROL_FUNCTIONS = "user_control_functions"
    FEEDBACK = "feedback"


K = PromptComponentKind

#: Components included in each template version.
VERSION_COMPONENTS: dict[str, frozenset[PromptComponentKind]] = {
    "v1": frozenset(
        {
            K.ENVIRONMENT_DESCRIPTION,
            K.ROBOT_FUNCTIONS,
            K.FUNCTION_APPLICATIONS,
            K.CODE_SPECIFICATIONS,
            K.SAFETY,
        }
    ),
}
VERSION_COMPONENTS["v2"] = VERSION_COMPONENTS["v1"] | {K.ROBOT_VARIABLES}
VERSION_COMPONENTS["v3"] = VERSION_COMPONENTS["v2"] | {
    K.INSTRUCTIONAL_MATERIALS,
    K.USER_CONTROL_FUNCTIONS,
    K.FEEDBACK,
}

#: Components that render into the model prompt (the other two are
#: human-facing rollout documents).
PROMPT_BEARING: frozenset[PromptComponentKind] = frozenset(PromptComponentKind) - {
    K.INSTRUCTIONAL_MATERIALS,
    K.FEEDBACK,
}

#: Fixed rendering order for prompt-bearing sections.
SECTION_ORDER: tuple[PromptComponentKind, ...] = (
    K.ENVIRONMENT_DESCRIPTION,
    K.ROBOT_FUNCTIONS,
    K.FUNCTION_APPLICATIONS,
    K.ROBOT_VARIABLES,
    K.USER_CONTROL_FUNCTIONS,
    K.CODE_SPECIFICATIONS,
    K.SAFETY,
)

SECTION_TITLES: dict[PromptComponentKind, str] = {
    K.ENVIRONMENT_DESCRIPTION: "Environment",
    K.ROBOT_FUNCTIONS: "Robot Functions",
    K.FUNCTION_APPLICATIONS: "How to Use the Functions",
    K.ROBOT_VARIABLES: "Robot Variables",
    K.USER_CONTROL_FUNCTIONS: "User Control Functions",
    K.CODE_SPECIFICATIONS: "Code Requirements",
    K.SAFETY: "Safety",
}


class MissingComponent(Exception):
    """A template lacks a component its version requires."""


@dataclass(frozen=True)
class PromptTemplate:
    """An ordered set of (component, body text) sections for one version."""

    version: str
    sections: tuple[tuple[PromptComponentKind, str], ...]

    def body(self, kind: PromptComponentKind) -> str:
        for k, text in self.sections:
            if k is kind:
                return text
        raise MissingComponent(f"template {self.version} has no {kind.value} section")

    @classmethod
    def load(cls, version: str, root: Path | None = None) -> "PromptTemplate":
        """Load the section bodies for ``version`` from text files.

        ``root`` overrides the packaged defaults; it must contain a
        ``<version>/`` directory with one ``<component>.txt`` per component.
        """
        if version not in VERSION_COMPONENTS:
            raise ValueError(f"unknown prompt version {version!r}")
        wanted = VERSION_COMPONENTS[version]
        ordered = [k for k in SECTION_ORDER if k in wanted]
        # Rollout documents come after the prompt-bearing sections.
        ordered += [k for k in (K.INSTRUCTIONAL_MATERIALS, K.FEEDBACK) if k in wanted]
        sections = []
        for kind in ordered:
            fname = f"{kind.value}.txt"
            if root is not None:
                path = Path(root) / version / fname
                if not path.exists():
                    raise MissingComponent(f"{path} missing for version {version}")
                text = path.read_text(encoding="utf-8")
            else:
                ref = resources.files("obivoice").joinpath("prompts", version, fname)
                if not ref.is_file():
                    raise MissingComponent(f"packaged {version}/{fname} missing")
                text = ref.read_text(encoding="utf-8")
            sections.append((kind, text.strip("\n")))
        return cls(version=version, sections=tuple(sections))


@dataclass(frozen=True)
class EnvironmentConfig:
    """What the robot cannot perceive and must be told: the four bowls."""

    bowl_contents: tuple[str, str, str, str]
    task_description: str = ""
    mouth_position_note: str = ""

    def __post_init__(self) -> None:
        if len(self.bowl_contents) != 4:
            raise ValueError("exactly 4 bowl slots required")
        object.__setattr__(self, "bowl_contents", tuple(self.bowl_contents))

    @classmethod
    def default(cls) -> "EnvironmentConfig":
        return cls(bowl_contents=("blueberries", "granola", "yogurt", "Empty"))

    def render_bowls(self) -> str:
        lines = []
        for i, label in enumerate(self.bowl_contents):
            if label.lower() == "empty":
                lines.append(f"Bowl {i} is empty.")
            else:
                lines.append(f"Bowl {i} contains {label}.")
        return "\n".join(lines)


def load_environment(path: str | Path) -> EnvironmentConfig:
    """Read an environment description from a YAML file."""
    with open(path, "r", encoding="utf-8") as fh:
        raw = yaml.safe_load(fh) or {}
    return EnvironmentConfig(
        bowl_contents=tuple(raw.get("bowls", ())),
        task_description=raw.get("task_description", ""),
        mouth_position_note=raw.get("mouth_position_note", ""),
    )


class MemoryScope(enum.Enum):
    PER_TASK = "per_task"
    PER_SESSION = "per_session"


class ResetEvent(enum.Enum):
    NEW_TASK = "new_task"
    NEW_ATTEMPT = "new_attempt"
    NEW_SESSION = "new_session"


@dataclass(frozen=True)
class InteractionMemory:
    """Append-only history of (user command, model output) pairs."""

    scope: MemoryScope = MemoryScope.PER_SESSION
    entries: tuple[tuple[str, str], ...] = ()


def record_interaction(memory: InteractionMemory, command: str, output: str) -> InteractionMemory:
    """Return a memory with one more (command, output) entry appended."""
    return InteractionMemory(scope=memory.scope, entries=memory.entries + ((command, output),))


def reset_memory(memory: InteractionMemory, event: ResetEvent) -> InteractionMemory:
    """Apply a boundary event, clearing the memory when its scope says so.

    Per-task memory survives new attempts at the same task but not a new
    task; per-session memory survives everything short of a new session.
    """
    cleared = InteractionMemory(scope=memory.scope, entries=())
    if event is ResetEvent.NEW_SESSION:
        return cleared
    if event is ResetEvent.NEW_TASK and memory.scope is MemoryScope.PER_TASK:
        return cleared
    return memory


@dataclass(frozen=True)
class PromptText:
    """An assembled prompt: system text plus the full chat message list.

    ``messages`` is ready for a chat-completion call: the system prompt,
    then memory entries as alternating user/assistant turns, then the
    current command as the final user turn.
    """

    system: str
    messages: tuple[dict, ...]

    @property
    def text(self) -> str:
        """A flat, deterministic rendering of the whole exchange."""
        parts = []
        for msg in self.messages:
            parts.append(f"[{msg['role']}]\n{msg['content']}")
        return "\n\n".join(parts)


def assemble_prompt(
    template: PromptTemplate,
    env: EnvironmentConfig,
    memory: InteractionMemory,
    command: str,
) -> PromptText:
    """Render the versioned prompt for one command.

    The system text holds one section per prompt-bearing component in the
    template's fixed order, with the environment substituted into the
    environment description.  Memory entries follow chronologically as
    chat turns, and the command is appended last.
    """
    if not command:
        raise ValueError("command must be non-empty")
    present = {k for k, _ in template.sections}
    mandatory = VERSION_COMPONENTS[template.version] & PROMPT_BEARING
    missing = mandatory - present
    if missing:
        names = ", ".join(sorted(k.value for k in missing))
        raise MissingComponent(f"template {template.version} lacks: {names}")

    substitutions = {
        "bowl_contents": env.render_bowls(),
        "task_description": env.task_description,
        "mouth_position_note": env.mouth_position_note,
    }
    rendered = []
    for kind, body in template.sections:
        if kind not in PROMPT_BEARING:
            continue
        text = Template(body).safe_substitute(substitutions).strip()
        rendered.append(f"## {SECTION_TITLES[kind]}\n{text}")
    system = "\n\n".join(rendered)

    messages: list[dict] = [{"role": "system", "content": system}]
    for past_command, past_output in memory.entries:
        messages.append({"role": "user", "content": past_command})
        messages.append({"role": "assistant", "content": past_output})
    messages.append({"role": "user", "content": command})
    return PromptText(system=system, messages=tuple(messages))
