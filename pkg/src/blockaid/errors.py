"""Exception types shared across the toolkit."""

from __future__ import annotations


class BlockaidError(Exception):
    """Base class for all toolkit errors."""


class MalformedArchive(BlockaidError):
    """The uploaded file is not a zip archive or lacks project.json."""


class SchemaError(BlockaidError):
    """project.json violates the documented container subset.

    ``path`` names the offending element, e.g. ``targets[1].blocks.abc.opcode``.
    """

    def __init__(self, message: str, path: str = "") -> None:
        super().__init__(f"{path}: {message}" if path else message)
        self.path = path


class UnknownSprite(BlockaidError):
    """A named sprite or stage does not exist in the program."""


class UnknownDetector(BlockaidError):
    """A detector name was requested that is not registered."""


class DuplicateName(BlockaidError):
    """A detector with the same name is already registered."""


class UnprintableBlock(BlockaidError):
    """A script contains a block the textual grammar cannot express."""


class ProviderUnavailable(BlockaidError):
    """The LLM backend could not be reached or rejected the request."""


class EmptyResponse(BlockaidError):
    """The LLM returned an empty completion."""


class NothingUsable(BlockaidError):
    """Every code fragment in the LLM response had to be dropped."""

    def __init__(self, dropped: list, attempts_used: int) -> None:
        super().__init__(
            f"no usable script after {attempts_used} retry round(s); "
            f"{len(dropped)} fragment(s) dropped"
        )
        self.dropped = dropped
        self.attempts_used = attempts_used


class TargetScriptMissing(BlockaidError):
    """A completion response never included the requested script id."""

    def __init__(self, script_id: str, attempts_used: int) -> None:
        super().__init__(f"response never contained script {script_id!r}")
        self.script_id = script_id
        self.attempts_used = attempts_used
