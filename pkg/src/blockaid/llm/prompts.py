"""Prompt rendering.

The default provider fills plain-text template files shipped with the
package.  A different provider can be registered under a name and selected
through the ``llm.prompt-provider`` configuration key, which is the intended
way to customise prompt wording without touching the orchestration.
"""

from __future__ import annotations

from importlib import resources
from typing import Callable

from ..lint import Issue
from ..text.parser import FailedScript
from ..text.printer import AnnotatedText
from .tasks import (
    AnalyzeTask,
    AskTask,
    CompleteTask,
    ExplainTask,
    FixTask,
    MODE_PERFUMES,
    PromptTask,
)


class PromptProvider:
    """Renders a task plus its code context into the final prompt string."""

    def render(self, task: PromptTask, code: AnnotatedText, issue: Issue | None = None) -> str:
        raise NotImplementedError

    def render_retry(self, failures: list[FailedScript], language: str) -> str:
        raise NotImplementedError

    def render_target_reminder(self, script_id: str, code: AnnotatedText, language: str) -> str:
        raise NotImplementedError


def _template(name: str) -> str:
    return resources.files(__package__).joinpath(f"templates/{name}.txt").read_text("utf-8")


class DefaultPromptProvider(PromptProvider):
    _FOCUS = {
        MODE_PERFUMES: (
            "Look for code perfumes: places where the code follows recommended "
            "practice and deserves praise."
        ),
    }
    _FOCUS_DEFAULT = (
        "Look for additional bugs or bad practices (code smells) that simple "
        "pattern-based checks would miss."
    )

    def render(self, task: PromptTask, code: AnnotatedText, issue: Issue | None = None) -> str:
        if isinstance(task, ExplainTask):
            issue = issue or task.issue
            return _template("explain").format(
                issue_description=issue.generic_description,
                code=code.text,
                language=task.output_language,
            )
        if isinstance(task, FixTask):
            issue = issue or task.issue
            return _template("fix").format(
                issue_description=issue.generic_description,
                code=code.text,
                language=task.output_language,
            )
        if isinstance(task, AskTask):
            return _template("ask").format(
                question=task.question,
                code=code.text,
                language=task.output_language,
            )
        if isinstance(task, AnalyzeTask):
            focus = self._FOCUS.get(task.mode, self._FOCUS_DEFAULT)
            return _template("analyze").format(
                code=code.text,
                focus=focus,
                language=task.output_language,
            )
        if isinstance(task, CompleteTask):
            return _template("complete").format(
                code=code.text,
                script_id=task.script_id,
                language=task.output_language,
            )
        raise TypeError(f"unknown task type {type(task).__name__}")

    def render_retry(self, failures: list[FailedScript], language: str) -> str:
        errors = []
        scripts = []
        for failure in failures:
            for diag in failure.diagnostics:
                errors.append(f"line {diag.line}: {diag.message}")
            header = f"// script-id: {failure.script_id}\n" if failure.script_id else ""
            scripts.append(header + failure.text)
        return _template("retry").format(
            errors="\n".join(errors),
            scripts="\n\n".join(scripts),
        )

    def render_target_reminder(self, script_id: str, code: AnnotatedText, language: str) -> str:
        return _template("remind_id").format(script_id=script_id, code=code.text)


_PROVIDERS: dict[str, Callable[[], PromptProvider]] = {"default": DefaultPromptProvider}


def register_prompt_provider(name: str, factory: Callable[[], PromptProvider]) -> None:
    _PROVIDERS[name] = factory


def create_prompt_provider(name: str = "default") -> PromptProvider:
    try:
        return _PROVIDERS[name]()
    except KeyError:
        raise KeyError(f"no prompt provider registered under {name!r}") from None
