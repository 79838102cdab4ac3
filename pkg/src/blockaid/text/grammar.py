"""Tokenizer and compiled template registry for the textual block notation.

A line is a sequence of words and bracketed groups: ``( )`` value inserts,
``[ ]`` text inserts or ``[... v]`` dropdowns, ``< >`` boolean inserts.
Opcode templates from the static table compile to the same token shape, so
matching a line against a template is a positional walk.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

from ..model.opcodes import OPCODES, OpcodeSpec, Shape, SlotKind

OPENERS = {"(": ")", "[": "]", "<": ">"}


@dataclass(frozen=True)
class Word:
    text: str
    col: int  # 1-based


@dataclass(frozen=True)
class Group:
    kind: str  # opening bracket: ( [ <
    content: str
    col: int

    @property
    def is_dropdown(self) -> bool:
        return self.kind in "([" and self.content.endswith(" v")

    @property
    def dropdown_value(self) -> str:
        return self.content[:-2] if self.content.endswith(" v") else self.content


@dataclass(frozen=True)
class SlotRef:
    name: str
    col: int


Token = "Word | Group | SlotRef"


class TokenizeError(ValueError):
    def __init__(self, message: str, col: int) -> None:
        super().__init__(message)
        self.col = col


def tokenize(line: str, allow_slots: bool = False) -> list:
    """Split a line into words and balanced bracket groups.

    A ``<`` followed by whitespace (and a ``>`` surrounded by whitespace)
    is the comparison operator, not a bracket.
    """
    tokens: list = []
    i = 0
    n = len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "<" and (i + 1 >= n or line[i + 1].isspace()):
            tokens.append(Word(text="<", col=i + 1))
            i += 1
            continue
        if ch in OPENERS:
            content, end = _scan_group(line, i)
            tokens.append(Group(kind=ch, content=content, col=i + 1))
            i = end
            continue
        if allow_slots and ch == "{":
            close = line.find("}", i)
            if close == -1:
                raise TokenizeError("unterminated slot marker", col=i + 1)
            tokens.append(SlotRef(name=line[i + 1:close], col=i + 1))
            i = close + 1
            continue
        start = i
        while i < n and not line[i].isspace() and line[i] not in OPENERS \
                and not (allow_slots and line[i] == "{"):
            i += 1
        tokens.append(Word(text=line[start:i], col=start + 1))
    return tokens


def _scan_group(line: str, start: int) -> tuple[str, int]:
    opener = line[start]
    n = len(line)
    if opener == "[":
        # text inserts and dropdowns hold plain text; only square brackets nest
        depth = 1
        i = start + 1
        while i < n:
            if line[i] == "[":
                depth += 1
            elif line[i] == "]":
                depth -= 1
                if depth == 0:
                    return line[start + 1:i], i + 1
            i += 1
        raise TokenizeError("unclosed '['", col=start + 1)

    i = start + 1
    while i < n:
        ch = line[i]
        if ch in "([":
            _, i = _scan_group(line, i)
            continue
        if ch == "<":
            if i + 1 < n and not line[i + 1].isspace():
                _, i = _scan_group(line, i)
                continue
            i += 1  # comparison operator
            continue
        if ch == ")" and opener == "(":
            return line[start + 1:i], i + 1
        if ch == ">" and opener == "<":
            prev_space = line[i - 1].isspace()
            next_space = i + 1 < n and line[i + 1].isspace()
            if prev_space and next_space:
                i += 1  # comparison operator inside the condition
                continue
            return line[start + 1:i], i + 1
        i += 1
    raise TokenizeError(f"unclosed {opener!r}", col=start + 1)


@dataclass(frozen=True)
class CompiledTemplate:
    spec: OpcodeSpec
    tokens: tuple
    #: number of dropdown/selection slots, used to rank candidates
    selection_count: int


class TemplateRegistry:
    """All printable templates, compiled once and grouped by shape."""

    def __init__(self) -> None:
        self.statements: list[CompiledTemplate] = []
        self.reporters: list[CompiledTemplate] = []
        self.booleans: list[CompiledTemplate] = []
        for spec in OPCODES.values():
            bucket = {
                Shape.HAT: self.statements,
                Shape.STATEMENT: self.statements,
                Shape.REPORTER: self.reporters,
                Shape.BOOLEAN: self.booleans,
            }[spec.shape]
            for template in (spec.template, *spec.aliases):
                bucket.append(compile_template(spec, template))
        for bucket in (self.statements, self.reporters, self.booleans):
            bucket.sort(key=lambda t: -t.selection_count)

    def candidates(self, bucket: list[CompiledTemplate], tokens: list) -> list[CompiledTemplate]:
        return [t for t in bucket if len(t.tokens) == len(tokens)]


def compile_template(spec: OpcodeSpec, template: str) -> CompiledTemplate:
    tokens = tuple(tokenize(template, allow_slots=True))
    selections = sum(
        1
        for t in tokens
        if isinstance(t, SlotRef) and spec.slot(t.name).kind in (SlotKind.DROPDOWN, SlotKind.BROADCAST, SlotKind.COLOR)
    )
    return CompiledTemplate(spec=spec, tokens=tokens, selection_count=selections)


_REGISTRY: TemplateRegistry | None = None


def registry() -> TemplateRegistry:
    global _REGISTRY
    if _REGISTRY is None:
        _REGISTRY = TemplateRegistry()
    return _REGISTRY


# ---------------------------------------------------------------------------
# comment lines and custom-block prototypes

SPRITE_COMMENT_RE = re.compile(r"^\s*//\s*sprite:\s*(?P<name>.+?)\s*$")
SCRIPT_COMMENT_RE = re.compile(
    r"^\s*//\s*script-id:\s*(?P<id>\S+)(?:\s*[-(]?\s*(?P<suffix>(original|modified)\s+version)\)?)?\s*$",
    re.IGNORECASE,
)
COMMENT_RE = re.compile(r"^\s*//")

_PROCCODE_MARKER_RE = re.compile(r"%[snb]")


def proccode_tokens(proccode: str) -> list:
    """Tokens of a custom-block prototype; markers become SlotRef ARG<n>."""
    counter = 0

    def replace(match: re.Match) -> str:
        nonlocal counter
        counter += 1
        return "{ARG%d:%s}" % (counter, "b" if match.group(0) == "%b" else "s")

    marked = _PROCCODE_MARKER_RE.sub(replace, proccode)
    return tokenize(marked, allow_slots=True)
