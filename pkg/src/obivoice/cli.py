"""Command-line front door: compile plans, replay the corpus, serve HTTP."""

from __future__ import annotations

import json
import sys
from pathlib import Path

import click

from . import __version__
from .adapters import HttpChatAdapter, MockAdapter, ScriptedAdapter
from .eval_harness import default_corpus, load_corpus, run_replay, summarize, write_report
from .eval_harness.report import render_text_report
from .plan_language import PlanError, VariableMode, compile_completion, plan_to_jsonable

_MODES = {"levels": VariableMode.LEVELS, "continuous": VariableMode.CONTINUOUS}


@click.group()
@click.version_option(version=__version__, prog_name="obivoice")
def main() -> None:
    """Speech-to-action pipeline for a feeding robot: compile model
    completions into safe motion plans, replay recorded commands, and serve
    sessions over HTTP."""


@main.command(name="plan")
@click.argument("source", type=click.File("r"), default="-")
@click.option(
    "--mode",
    type=click.Choice(sorted(_MODES)),
    default="levels",
    show_default=True,
    help="How variable assignments are interpreted: 0-5 levels or raw units.",
)
def plan_command(source, mode: str) -> None:
    """Compile a completion (file or stdin) and print the plan as JSON."""
    text = source.read()
    try:
        plan, warnings = compile_completion(text, mode=_MODES[mode])
    except PlanError as exc:
        click.echo(f"{type(exc).__name__}: {exc.user_message}", err=True)
        raise SystemExit(2)
    click.echo(json.dumps({"plan": plan_to_jsonable(plan), "warnings": warnings}, indent=2))


@main.group(name="eval")
def eval_group() -> None:
    """Replay recorded commands and grade the resulting traces."""


@eval_group.command(name="run")
@click.option(
    "--corpus",
    "corpus_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="JSONL corpus; defaults to the packaged study commands.",
)
@click.option(
    "--adapter",
    type=click.Choice(["scripted", "mock", "live"]),
    default="scripted",
    show_default=True,
    help="Where completions come from: canonical scripts, the demo table, or a live model endpoint.",
)
@click.option("--prompt-version", type=click.Choice(["v1", "v2", "v3"]), default="v3", show_default=True)
@click.option(
    "--report",
    "report_dir",
    type=click.Path(file_okay=False),
    default=None,
    help="Directory to render report.jsonl, report.txt, and attempts_histogram.png into.",
)
@click.option("--live-base-url", default="http://127.0.0.1:8800", show_default=True)
@click.option("--live-model", default="gpt-4", show_default=True)
@click.option(
    "--strict/--no-strict",
    default=False,
    help="Exit nonzero when any case stays unsolved.",
)
def eval_run(
    corpus_path: str | None,
    adapter: str,
    prompt_version: str,
    report_dir: str | None,
    live_base_url: str,
    live_model: str,
    strict: bool,
) -> None:
    """Replay the corpus through the pipeline and summarize the verdicts."""
    cases = load_corpus(corpus_path) if corpus_path else default_corpus()
    if adapter == "scripted":
        backend = ScriptedAdapter.canonical()
    elif adapter == "mock":
        backend = MockAdapter.default()
    else:
        backend = HttpChatAdapter(live_base_url, model=live_model)
    outcomes = run_replay(cases, backend, prompt_version=prompt_version)
    metrics = summarize(outcomes)
    click.echo(render_text_report(outcomes, metrics))
    if report_dir:
        paths = write_report(outcomes, report_dir)
        click.echo(f"report: {paths['jsonl']}")
        click.echo(f"        {paths['text']}")
        click.echo(f"        {paths['figure']}")
    unsolved = metrics["overall"]["cases"] - metrics["overall"]["solved"]
    if strict and unsolved:
        click.echo(f"{unsolved} case(s) unsolved", err=True)
        raise SystemExit(1)


@main.command(name="serve")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--port", default=8008, show_default=True, type=int)
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False),
    default=None,
    help="YAML file of service settings.",
)
@click.option("--adapter", type=click.Choice(["mock", "scripted", "live"]), default=None)
@click.option("--api-key", default=None, help="Require this bearer token from clients.")
def serve(host: str, port: int, config_path: str | None, adapter: str | None, api_key: str | None) -> None:
    """Run the HTTP + SSE service."""
    import uvicorn

    from .service import ServiceSettings, create_app

    settings = ServiceSettings.from_file(config_path) if config_path else ServiceSettings()
    if adapter:
        settings.adapter = adapter
    if api_key:
        settings.api_key = api_key
    uvicorn.run(create_app(settings), host=host, port=port, log_level="warning")


if __name__ == "__main__":
    main()
