"""Bug-pattern, smell, and perfume detection over program trees."""

from __future__ import annotations

from dataclasses import dataclass, replace
from importlib import resources
from typing import Callable, Iterable

from ..errors import DuplicateName, UnknownDetector
from ..model.ast import Program, Script, Target

KIND_BUG = "bug"
KIND_SMELL = "smell"
KIND_PERFUME = "perfume"

SEVERITY_INFO = "info"
SEVERITY_WARN = "warn"
SEVERITY_ERROR = "error"


@dataclass(frozen=True)
class IssueLocation:
    target: str
    script_id: str | None
    #: pre-order index of the offending block within its script
    block_index: int | None


@dataclass(frozen=True)
class Issue:
    id: str
    finder: str
    kind: str
    severity: str
    generic_description: str
    location: IssueLocation
    llm_explanation: str | None = None

    def with_explanation(self, text: str) -> "Issue":
        """The generated explanation is appended, never a replacement."""
        return replace(self, llm_explanation=text)


@dataclass(frozen=True)
class Detector:
    name: str
    kind: str
    severity: str
    scan: Callable[[Program, "Detector"], list[Issue]]

    def run(self, program: Program) -> list[Issue]:
        return self.scan(program, self)


def description_template(name: str) -> str:
    return resources.files(__package__).joinpath(f"descriptions/{name}.txt").read_text("utf-8").strip()


def make_issue(
    detector: Detector,
    target: Target,
    script: Script | None,
    block_index: int | None,
    description: str | None = None,
    **placeholders: str,
) -> Issue:
    """Build an Issue; ``description`` overrides the packaged template so
    custom detectors need not ship a data file."""
    script_id = script.id if script is not None else None
    template = description if description is not None else description_template(detector.name)
    description = template.format(sprite=target.name, **placeholders)
    # ids must stay URL-path-safe: no '#', '/', or '?'
    anchor = script_id if script_id is not None else target.name
    return Issue(
        id=f"{detector.name}@{anchor}:{block_index if block_index is not None else 0}",
        finder=detector.name,
        kind=detector.kind,
        severity=detector.severity,
        generic_description=description,
        location=IssueLocation(target=target.name, script_id=script_id, block_index=block_index),
    )


class DetectorRegistry:
    def __init__(self) -> None:
        self._detectors: dict[str, Detector] = {}

    def register(self, detector: Detector) -> None:
        if detector.name in self._detectors:
            raise DuplicateName(f"detector {detector.name!r} is already registered")
        self._detectors[detector.name] = detector

    def names(self) -> list[str]:
        return list(self._detectors)

    def get(self, name: str) -> Detector:
        if name not in self._detectors:
            raise UnknownDetector(f"no detector named {name!r}")
        return self._detectors[name]

    def run(self, program: Program, selection: Iterable[str] | None = None) -> list[Issue]:
        if selection is not None:
            wanted = set(selection)
            for name in wanted:
                self.get(name)
        issues: list[Issue] = []
        for name, detector in self._detectors.items():
            if selection is not None and name not in wanted:
                continue
            issues.extend(detector.run(program))
        return issues


_default_registry = DetectorRegistry()


def default_registry() -> DetectorRegistry:
    return _default_registry


def register_detector(detector: Detector, registry: DetectorRegistry | None = None) -> None:
    (registry or _default_registry).register(detector)


def run_detectors(
    program: Program,
    selection: Iterable[str] | None = None,
    registry: DetectorRegistry | None = None,
) -> list[Issue]:
    """Run detectors in registration order; ``selection=None`` means all."""
    return (registry or _default_registry).run(program, selection)


from . import detectors as _builtin  # noqa: E402  (registers the shipped detectors)

__all__ = [
    "Detector",
    "DetectorRegistry",
    "Issue",
    "IssueLocation",
    "KIND_BUG",
    "KIND_PERFUME",
    "KIND_SMELL",
    "SEVERITY_ERROR",
    "SEVERITY_INFO",
    "SEVERITY_WARN",
    "default_registry",
    "make_issue",
    "register_detector",
    "run_detectors",
]
