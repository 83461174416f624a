"""The recorded command corpus: one JSONL record per (task, participant).

Each record holds the verbatim spoken commands a participant used for one
task, in attempt order (one to three attempts).  ``notes`` optionally marks
whether a third attempt was reported successful ("S") or unsuccessful
("U"); earlier attempts carry no mark.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from importlib import resources
from pathlib import Path

TASKS = ("practice", "t1", "t2", "t3", "t4", "t5")
MAX_ATTEMPTS = 3
_FIELDS = {"task", "participant", "attempts", "notes"}


class MalformedRecord(Exception):
    """A corpus line that does not satisfy the record schema."""

    def __init__(self, line_no: int, message: str) -> None:
        super().__init__(f"line {line_no}: {message}")
        self.line_no = line_no


@dataclass(frozen=True)
class CorpusCase:
    task: str
    participant: int
    attempts: tuple[str, ...]
    notes: str | None = None

    @property
    def case_id(self) -> str:
        return f"{self.task}-p{self.participant}"

    def to_jsonable(self) -> dict:
        record: dict = {
            "task": self.task,
            "participant": self.participant,
            "attempts": list(self.attempts),
        }
        if self.notes is not None:
            record["notes"] = self.notes
        return record


def _case_from_record(line_no: int, record) -> CorpusCase:
    if not isinstance(record, dict):
        raise MalformedRecord(line_no, "record must be a JSON object")
    unknown = set(record) - _FIELDS
    if unknown:
        raise MalformedRecord(line_no, f"unknown fields: {sorted(unknown)}")
    task = record.get("task")
    if task not in TASKS:
        raise MalformedRecord(line_no, f"task must be one of {TASKS}, got {task!r}")
    participant = record.get("participant")
    if not isinstance(participant, int) or isinstance(participant, bool) or participant < 1:
        raise MalformedRecord(line_no, f"participant must be a positive integer, got {participant!r}")
    attempts = record.get("attempts")
    if (
        not isinstance(attempts, list)
        or not 1 <= len(attempts) <= MAX_ATTEMPTS
        or not all(isinstance(a, str) and a.strip() for a in attempts)
    ):
        raise MalformedRecord(
            line_no, f"attempts must be 1..{MAX_ATTEMPTS} non-empty strings"
        )
    notes = record.get("notes")
    if notes is not None and notes not in ("S", "U"):
        raise MalformedRecord(line_no, f"notes must be 'S' or 'U', got {notes!r}")
    return CorpusCase(
        task=task, participant=participant, attempts=tuple(attempts), notes=notes
    )


def load_corpus(path: str | Path) -> list[CorpusCase]:
    """Read a JSONL corpus, failing loudly with the offending line number."""
    cases = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, 1):
            line = line.strip()
            if not line:
                continue
            try:
                record = json.loads(line)
            except json.JSONDecodeError as exc:
                raise MalformedRecord(line_no, f"invalid JSON: {exc}") from exc
            cases.append(_case_from_record(line_no, record))
    return cases


def dump_corpus(cases: list[CorpusCase], path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        for case in cases:
            fh.write(json.dumps(case.to_jsonable(), ensure_ascii=False) + "\n")


def default_corpus() -> list[CorpusCase]:
    """The packaged study-command corpus."""
    ref = resources.files("obivoice").joinpath("data", "corpus", "study_commands.jsonl")
    with resources.as_file(ref) as path:
        return load_corpus(path)
