"""The five model-facing task kinds."""

from __future__ import annotations

from dataclasses import dataclass

from ..lint import Issue

MODE_NEW_ISSUES = "new-issues"
MODE_PERFUMES = "perfumes"


@dataclass(frozen=True)
class PromptTask:
    #: IETF language tag for the natural-language part of the answer
    output_language: str = "en"


@dataclass(frozen=True)
class ExplainTask(PromptTask):
    issue: Issue = None  # type: ignore[assignment]


@dataclass(frozen=True)
class FixTask(PromptTask):
    issue: Issue = None  # type: ignore[assignment]


@dataclass(frozen=True)
class AskTask(PromptTask):
    question: str = ""
    #: "program" or a sprite name
    scope: str = "program"


@dataclass(frozen=True)
class AnalyzeTask(PromptTask):
    mode: str = MODE_NEW_ISSUES
    target: str = ""


@dataclass(frozen=True)
class CompleteTask(PromptTask):
    script_id: str = ""
