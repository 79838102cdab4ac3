"""Command-line interface.

Exit codes: 0 success, 1 usage error (bad flags, missing files, unknown
ids), 2 backend failure (LLM provider unreachable, port already taken).
Data goes to stdout, diagnostics to stderr.
"""

from __future__ import annotations

import json
import socket
import sys
from pathlib import Path

import click

from . import __version__
from .config import Config, ConfigError, completion_params, create_provider, load_config
from .errors import (
    BlockaidError,
    EmptyResponse,
    NothingUsable,
    ProviderUnavailable,
    TargetScriptMissing,
)
from .lint import Issue, run_detectors
from .llm import MODE_NEW_ISSUES, MODE_PERFUMES, create_prompt_provider
from .llm import orchestrator as tasks
from .model.sb3 import load_sb3, save_sb3
from .text.printer import PROGRAM_SCOPE


class ServeError(BlockaidError):
    pass


def main(argv: list[str] | None = None) -> int:
    try:
        cli.main(args=argv, standalone_mode=False)
    except click.exceptions.Exit as exc:
        return exc.exit_code
    except click.ClickException as exc:
        exc.show()
        return 1
    except (ProviderUnavailable, EmptyResponse, ServeError) as exc:
        click.echo(f"error: {exc}", err=True)
        return 2
    except BlockaidError as exc:
        click.echo(f"error: {exc}", err=True)
        return 1
    return 0


@click.group()
@click.version_option(__version__)
def cli() -> None:
    """Scratch program analysis with LLM-assisted explanations and fixes."""


@cli.group(name="llm")
def llm_group() -> None:
    """Model-backed tasks: analyze, explain, fix, ask, complete."""


def _common_options(fn):
    fn = click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False),
                      default=None, help="TOML configuration file.")(fn)
    fn = click.option("--api-key", default=None,
                      help="LLM API key (overrides environment and config file).")(fn)
    fn = click.option("--language", default="en", show_default=True,
                      help="IETF tag for the answer language.")(fn)
    return fn


def _setup(config_path: str | None, api_key: str | None) -> Config:
    try:
        return load_config(config_path, overrides={"llm.openai.api-key": api_key})
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc


def _load_program(path: Path):
    return load_sb3(path.read_bytes())


def _issue_rows(issues: list[Issue]) -> str:
    headers = ("ID", "KIND", "SEVERITY", "LOCATION", "DESCRIPTION")
    rows = [
        (
            issue.id,
            issue.kind,
            issue.severity,
            f"{issue.location.target}/{issue.location.script_id or '-'}",
            issue.generic_description,
        )
        for issue in issues
    ]
    widths = [max(len(h), *(len(r[i]) for r in rows)) if rows else len(h)
              for i, h in enumerate(headers)]
    lines = ["  ".join(h.ljust(widths[i]) for i, h in enumerate(headers)).rstrip()]
    for row in rows:
        lines.append("  ".join(cell.ljust(widths[i]) for i, cell in enumerate(row)).rstrip())
    return "\n".join(lines)


def _issues_json(issues: list[Issue]) -> str:
    return json.dumps(
        [
            {
                "id": i.id,
                "finder": i.finder,
                "kind": i.kind,
                "severity": i.severity,
                "description": i.generic_description,
                "explanation": i.llm_explanation,
                "location": {
                    "target": i.location.target,
                    "script": i.location.script_id,
                    "block": i.location.block_index,
                },
            }
            for i in issues
        ],
        indent=2,
    )


@llm_group.command()
@click.option("--path", required=True,
              type=click.Path(exists=True, path_type=Path, file_okay=True, dir_okay=True),
              help="A .sb3 file, or a directory of them for batch mode.")
@click.option("--target", default=None, help="Restrict analysis to one sprite or the stage.")
@click.option("--new-issues", is_flag=True, help="Also ask the model for issues the detectors missed.")
@click.option("--perfumes", is_flag=True, help="Also ask the model for code perfumes.")
@click.option("--format", "fmt", type=click.Choice(["table", "json"]), default="table",
              show_default=True)
@_common_options
def analyze(path: Path, target: str | None, new_issues: bool, perfumes: bool, fmt: str,
            config_path: str | None, api_key: str | None, language: str) -> None:
    """Report static issues, optionally extended by model findings."""
    config = _setup(config_path, api_key)
    files = sorted(path.glob("*.sb3")) if path.is_dir() else [path]
    if not files:
        raise click.UsageError(f"no .sb3 files in {path}")
    for file in files:
        program = _load_program(file)
        issues = run_detectors(program)
        if target is not None:
            if program.target(target) is None:
                raise click.UsageError(f"no sprite or stage named {target!r} in {file.name}")
            issues = [i for i in issues if i.location.target == target]
        warnings: list[str] = []
        if new_issues or perfumes:
            provider = create_provider(config)
            prompts = create_prompt_provider(config.llm_prompt_provider)
            params = completion_params(config)
            scope = target or PROGRAM_SCOPE
            modes = [m for m, on in ((MODE_NEW_ISSUES, new_issues), (MODE_PERFUMES, perfumes)) if on]
            for mode in modes:
                report = tasks.analyze(program, scope, mode, provider, prompts,
                                       language=language, params=params)
                issues.extend(report.issues)
                warnings.extend(report.warnings)
        if len(files) > 1:
            click.echo(f"== {file.name}")
        click.echo(_issues_json(issues) if fmt == "json" else _issue_rows(issues))
        for warning in warnings:
            click.echo(f"warning: {warning}", err=True)


def _find_issue(program, issue_id: str) -> Issue:
    for issue in run_detectors(program):
        if issue.id == issue_id:
            return issue
    raise click.UsageError(f"no issue with id {issue_id!r} (run `blockaid llm analyze` to list ids)")


@llm_group.command()
@click.option("--path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--issue", "issue_id", required=True, help="Issue id as printed by analyze.")
@_common_options
def explain(path: Path, issue_id: str, config_path: str | None, api_key: str | None,
            language: str) -> None:
    """Append a model-generated explanation to one issue."""
    config = _setup(config_path, api_key)
    program = _load_program(path)
    issue = _find_issue(program, issue_id)
    updated = tasks.explain_issue(
        program, issue, create_provider(config),
        create_prompt_provider(config.llm_prompt_provider),
        language=language, params=completion_params(config),
    )
    click.echo(updated.generic_description)
    click.echo("")
    click.echo(updated.llm_explanation)


@llm_group.command()
@click.option("--path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--issue", "issue_id", required=True, help="Issue id as printed by analyze.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Where to write the fixed archive (default: <name>.fixed.sb3).")
@_common_options
def fix(path: Path, issue_id: str, out: Path | None, config_path: str | None,
        api_key: str | None, language: str) -> None:
    """Ask the model for a fix and write the patched archive."""
    config = _setup(config_path, api_key)
    program = _load_program(path)
    issue = _find_issue(program, issue_id)
    try:
        outcome = tasks.fix_issue(
            program, issue, create_provider(config),
            create_prompt_provider(config.llm_prompt_provider),
            language=language, params=completion_params(config),
        )
    except NothingUsable as exc:
        raise ServeError(f"the model returned nothing usable: {exc}") from exc
    destination = out or path.with_suffix(".fixed.sb3")
    destination.write_bytes(save_sb3(outcome.updated))
    for entry in outcome.dropped:
        click.echo(f"warning: dropped unparseable script: {entry.text.splitlines()[0]}...", err=True)
    click.echo(str(destination))


@llm_group.command()
@click.option("--path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--question", required=True)
@click.option("--target", default=None, help="Scope the question to one sprite.")
@_common_options
def ask(path: Path, question: str, target: str | None, config_path: str | None,
        api_key: str | None, language: str) -> None:
    """Ask a free-form question about the program or one sprite."""
    config = _setup(config_path, api_key)
    program = _load_program(path)
    if not question.strip():
        raise click.UsageError("question must not be empty")
    answer = tasks.ask(
        program, question, target or "program", create_provider(config),
        create_prompt_provider(config.llm_prompt_provider),
        language=language, params=completion_params(config),
    )
    click.echo(answer)


@llm_group.command()
@click.option("--path", required=True, type=click.Path(exists=True, dir_okay=False, path_type=Path))
@click.option("--script", "script_id", required=True, help="Script id, e.g. Boat:1.")
@click.option("--out", type=click.Path(dir_okay=False, path_type=Path), default=None,
              help="Where to write the extended archive (default: <name>.fixed.sb3).")
@_common_options
def complete(path: Path, script_id: str, out: Path | None, config_path: str | None,
             api_key: str | None, language: str) -> None:
    """Have the model extend one script with suitable code."""
    config = _setup(config_path, api_key)
    program = _load_program(path)
    if program.find_script(script_id) is None:
        raise click.UsageError(f"no script with id {script_id!r}")
    try:
        outcome = tasks.complete_script(
            program, script_id, create_provider(config),
            create_prompt_provider(config.llm_prompt_provider),
            language=language, params=completion_params(config),
        )
    except (NothingUsable, TargetScriptMissing) as exc:
        raise ServeError(f"the model returned nothing usable: {exc}") from exc
    destination = out or path.with_suffix(".fixed.sb3")
    destination.write_bytes(save_sb3(outcome.updated))
    click.echo(str(destination))


@cli.command()
@click.option("--port", type=int, default=None, help="Overrides server.port from the config.")
@click.option("--host", default="127.0.0.1", show_default=True)
@click.option("--config", "config_path", type=click.Path(exists=True, dir_okay=False), default=None)
def serve(port: int | None, host: str, config_path: str | None) -> None:
    """Run the HTTP service for the web panel."""
    try:
        config = load_config(config_path, overrides={"server.port": port})
    except ConfigError as exc:
        raise click.UsageError(str(exc)) from exc
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    try:
        probe.bind((host, config.server_port))
    except OSError as exc:
        raise ServeError(f"cannot bind {host}:{config.server_port}: {exc}") from exc
    finally:
        probe.close()

    import uvicorn

    from .service import create_app

    uvicorn.run(create_app(config), host=host, port=config.server_port, log_level="info")


if __name__ == "__main__":
    sys.exit(main())
