"""Pluggable model and transcript backends.

The live adapter speaks the chat-completion wire protocol over HTTP; the
mock adapter replays a (command -> completion) table from a YAML file; the
scripted adapter serves pre-authored completions per task for corpus
replays.  All of them expose ``complete(messages, params) -> str``.
"""

from __future__ import annotations

import os
import re
from importlib import resources
from pathlib import Path

import requests
import yaml


class ModelUnavailable(Exception):
    """The model backend could not produce a completion."""

    def __init__(self, message: str) -> None:
        super().__init__(message)
        self.user_message = message


def normalize_command(text: str) -> str:
    """Case- and punctuation-insensitive key for command lookup."""
    return " ".join(re.sub(r"[^a-z0-9' ]+", " ", text.lower()).split())


class HttpChatAdapter:
    """POSTs to ``{base_url}/v1/chat/completions`` with bearer-token auth.

    The API key is read from the environment variable named by
    ``api_key_env`` so configs never hold secrets.
    """

    def __init__(
        self,
        base_url: str,
        model: str,
        temperature: float | None = None,
        api_key_env: str = "OBIVOICE_API_KEY",
        timeout: float = 60.0,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.model = model
        self.temperature = temperature
        self.api_key_env = api_key_env
        self.timeout = timeout

    def complete(self, messages: list[dict], params: dict | None = None) -> str:
        body: dict = {"model": self.model, "messages": list(messages)}
        temperature = (params or {}).get("temperature", self.temperature)
        if temperature is not None:
            body["temperature"] = temperature
        headers = {}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        try:
            response = requests.post(
                f"{self.base_url}/v1/chat/completions",
                json=body,
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ModelUnavailable(f"model request failed: {exc}") from exc
        if response.status_code != 200:
            raise ModelUnavailable(
                f"model request returned status {response.status_code}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"]
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ModelUnavailable("malformed model response") from exc


class MockAdapter:
    """Deterministic (command -> completion) replay table."""

    def __init__(self, table: dict[str, str]) -> None:
        self.table = {normalize_command(k): v for k, v in table.items()}

    @classmethod
    def from_file(cls, path: str | Path) -> "MockAdapter":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(yaml.safe_load(fh) or {})

    @classmethod
    def default(cls) -> "MockAdapter":
        ref = resources.files("obivoice").joinpath("data", "fixtures", "mock_completions.yaml")
        return cls(yaml.safe_load(ref.read_text(encoding="utf-8")))

    def complete(self, messages: list[dict], params: dict | None = None) -> str:
        command = ""
        for message in reversed(messages):
            if message.get("role") == "user":
                command = message.get("content", "")
                break
        key = normalize_command(command)
        if key not in self.table:
            raise ModelUnavailable(f"no scripted completion for {command!r}")
        return self.table[key]


class ScriptedAdapter:
    """Serves a pre-authored completion per (task, attempt) for replays.

    A task's entry may be a single completion (used for every attempt) or a
    list indexed by attempt.  The replay harness announces case boundaries
    through ``begin_case``/``begin_attempt``.
    """

    def __init__(self, by_task: dict[str, str | list[str]]) -> None:
        self.by_task = by_task
        self._task: str | None = None
        self._attempt = 1

    @classmethod
    def canonical(cls) -> "ScriptedAdapter":
        ref = resources.files("obivoice").joinpath(
            "data", "fixtures", "canonical_completions.yaml"
        )
        return cls(yaml.safe_load(ref.read_text(encoding="utf-8")))

    @classmethod
    def from_file(cls, path: str | Path) -> "ScriptedAdapter":
        with open(path, "r", encoding="utf-8") as fh:
            return cls(yaml.safe_load(fh) or {})

    def begin_case(self, task_id: str) -> None:
        self._task = task_id
        self._attempt = 1

    def begin_attempt(self, attempt: int) -> None:
        self._attempt = attempt

    def complete(self, messages: list[dict], params: dict | None = None) -> str:
        if self._task is None or self._task not in self.by_task:
            raise ModelUnavailable(f"no scripted completion for task {self._task!r}")
        entry = self.by_task[self._task]
        if isinstance(entry, list):
            index = min(self._attempt, len(entry)) - 1
            return entry[index]
        return entry


class TextTranscript:
    """Transcript source for simulation: a FIFO of typed/recorded chunks."""

    def __init__(self, chunks: list[str] | None = None) -> None:
        self._chunks = list(chunks or [])

    def push(self, text: str) -> None:
        self._chunks.append(text)

    def next_chunk(self) -> str | None:
        if not self._chunks:
            return None
        return self._chunks.pop(0)
