"""Best-effort parser from block text back to program-tree fragments.

The input is split into scripts first (blank lines, id comments, and hat or
``define`` lines start a new script), then each script is parsed on its own,
so a syntax error in one script never affects the others.  Scripts that fail
produce diagnostics and a retryable failure record instead of aborting.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Mapping, Sequence

from ..model.ast import (
    Block,
    BlockNode,
    Expression,
    Literal,
    Parameter,
    ParameterReporter,
    ProcedureDefinition,
    Script,
    VariableReporter,
)
from ..model.opcodes import PROCEDURE_CALL, Shape, Slot, SlotKind
from ..model.sb3 import coerce_number
from .grammar import (
    COMMENT_RE,
    SCRIPT_COMMENT_RE,
    SPRITE_COMMENT_RE,
    CompiledTemplate,
    Group,
    SlotRef,
    TokenizeError,
    Word,
    proccode_tokens,
    registry,
    tokenize,
)


@dataclass
class ParseDiagnostic:
    line: int
    column: int
    message: str
    offending_text: str


@dataclass
class ParsedFragment:
    sprite_name: str | None
    script_id: str | None
    script: Script
    id_suffix: str | None = None
    #: set when the fragment is a custom-block definition
    procedure: ProcedureDefinition | None = None


@dataclass
class FailedScript:
    text: str
    diagnostics: list[ParseDiagnostic]
    sprite_name: str | None = None
    script_id: str | None = None


@dataclass
class ParseResult:
    fragments: list[ParsedFragment] = field(default_factory=list)
    diagnostics: list[ParseDiagnostic] = field(default_factory=list)
    failures: list[FailedScript] = field(default_factory=list)


def parse_fragments(
    text: str,
    procedures: Mapping[str, Sequence[str]] | None = None,
) -> ParseResult:
    """Parse every script in ``text``.

    ``procedures`` maps sprite names to known custom-block prototypes so
    fragments may call blocks defined elsewhere in the program.
    """
    result = ParseResult()
    sections = _split_sections(text)
    local_prototypes: dict[str | None, set[str]] = {}
    for section in sections:
        proto = _prototype_of_section(section)
        if proto:
            local_prototypes.setdefault(section.sprite, set()).add(proto)
    for section in sections:
        known = set(local_prototypes.get(section.sprite, set()))
        known |= local_prototypes.get(None, set())
        if procedures and section.sprite in procedures:
            known |= set(procedures[section.sprite])
        parser = _ScriptParser(section, known)
        try:
            fragment, diagnostics = parser.parse()
        except RecursionError:
            lineno = section.lines[0][0] if section.lines else 1
            diagnostics = [ParseDiagnostic(
                line=lineno, column=1,
                message="script is nested too deeply",
                offending_text=section.lines[0][1] if section.lines else "",
            )]
            fragment = None
        result.diagnostics.extend(diagnostics)
        if diagnostics:
            result.failures.append(
                FailedScript(
                    text="\n".join(line for _, line in section.lines),
                    diagnostics=diagnostics,
                    sprite_name=section.sprite,
                    script_id=section.script_id,
                )
            )
        elif fragment is not None:
            result.fragments.append(fragment)
    return result


# ---------------------------------------------------------------------------
# script splitting


@dataclass
class _Section:
    sprite: str | None
    script_id: str | None
    id_suffix: str | None
    lines: list[tuple[int, str]]


def _split_sections(text: str) -> list[_Section]:
    sections: list[_Section] = []
    sprite: str | None = None
    pending_id: str | None = None
    pending_suffix: str | None = None
    current: _Section | None = None

    def close() -> None:
        nonlocal current
        if current is not None and current.lines:
            sections.append(current)
        current = None

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            close()
            continue
        sprite_match = SPRITE_COMMENT_RE.match(line)
        if sprite_match:
            close()
            sprite = sprite_match.group("name")
            pending_id = None
            pending_suffix = None
            continue
        script_match = SCRIPT_COMMENT_RE.match(line)
        if script_match:
            close()
            pending_id = script_match.group("id")
            suffix = script_match.group("suffix")
            pending_suffix = suffix.strip() if suffix else None
            continue
        if COMMENT_RE.match(line):
            continue
        if current is not None and _starts_new_script(line):
            close()
        if current is None:
            current = _Section(
                sprite=sprite,
                script_id=pending_id,
                id_suffix=pending_suffix,
                lines=[],
            )
            pending_id = None
            pending_suffix = None
        current.lines.append((lineno, line))
    close()
    return sections


def _starts_new_script(line: str) -> bool:
    if line.startswith("define "):
        return True
    try:
        tokens = tokenize(line)
    except TokenizeError:
        return False
    for template in registry().statements:
        if template.spec.shape is Shape.HAT and _match(tokens, template, strict=True) is not None:
            return True
    return False


def _prototype_of_section(section: _Section) -> str | None:
    if not section.lines:
        return None
    _, first = section.lines[0]
    if not first.startswith("define "):
        return None
    try:
        proccode, _ = _parse_define(first)
    except TokenizeError:
        return None
    return proccode


def _parse_define(line: str) -> tuple[str, list[Parameter]]:
    tokens = tokenize(line[len("define "):])
    parts: list[str] = []
    parameters: list[Parameter] = []
    for token in tokens:
        if isinstance(token, Word):
            parts.append(token.text)
        elif isinstance(token, Group) and token.kind == "<":
            parts.append("%b")
            parameters.append(Parameter(name=token.content.strip(), kind="boolean"))
        elif isinstance(token, Group):
            parts.append("%s")
            parameters.append(Parameter(name=token.content.strip(), kind="value"))
    return " ".join(parts), parameters


# ---------------------------------------------------------------------------
# template matching


def _match(tokens: list, template: CompiledTemplate, strict: bool) -> dict[str, Group] | None:
    if len(tokens) != len(template.tokens):
        return None
    bindings: dict[str, Group] = {}
    for tok, pattern in zip(tokens, template.tokens):
        if isinstance(pattern, Word):
            if not isinstance(tok, Word) or tok.text.casefold() != pattern.text.casefold():
                return None
        else:
            if not isinstance(tok, Group):
                return None
            slot = template.spec.slot(pattern.name)
            if not _group_fits(tok, slot, strict):
                return None
            bindings[pattern.name] = tok
    return bindings


def _group_fits(group: Group, slot: Slot, strict: bool) -> bool:
    if slot.kind in (SlotKind.DROPDOWN, SlotKind.BROADCAST):
        if slot.choices and group.dropdown_value not in slot.choices:
            return False
        if strict:
            return group.is_dropdown
        return group.kind in "(["
    if slot.kind is SlotKind.COLOR:
        return group.kind in "(["
    if slot.kind is SlotKind.BOOLEAN and strict:
        return group.kind == "<"
    return True


def _best_match(tokens: list, bucket: list[CompiledTemplate]) -> tuple[CompiledTemplate, dict] | None:
    for strict in (True, False):
        for template in bucket:
            bindings = _match(tokens, template, strict)
            if bindings is not None:
                return template, bindings
    return None


# ---------------------------------------------------------------------------
# script parsing

_EMPTY = {"(": None, "<": None}


class _ScriptParser:
    def __init__(self, section: _Section, prototypes: set[str]) -> None:
        self.section = section
        self.lines = section.lines
        self.diagnostics: list[ParseDiagnostic] = []
        self.prototypes = {p: proccode_tokens(p) for p in sorted(prototypes)}
        self.params: dict[str, str] = {}

    def parse(self) -> tuple[ParsedFragment | None, list[ParseDiagnostic]]:
        if not self.lines:
            return None, []
        procedure: ProcedureDefinition | None = None
        start = 0
        lineno, first = self.lines[0]
        if first.startswith("define "):
            try:
                proccode, parameters = _parse_define(first)
            except TokenizeError as exc:
                self._error(lineno, exc.col, str(exc), first)
                return None, self.diagnostics
            self.params = {p.name: p.kind for p in parameters}
            self.prototypes.setdefault(proccode, proccode_tokens(proccode))
            procedure = ProcedureDefinition(prototype=proccode, parameters=parameters)
            start = 1
        blocks, index, closer = self._sequence(start, depth=0)
        if closer is not None and index <= len(self.lines):
            lineno, line = self.lines[index - 1]
            self._error(lineno, 1, f"{closer!r} without an open block", line)
        if self.diagnostics:
            return None, self.diagnostics

        script_id = self.section.script_id or ""
        script = Script(id=script_id, blocks=blocks)
        sprite = self.section.sprite
        if sprite is None and self.section.script_id and ":" in self.section.script_id:
            sprite = self.section.script_id.rpartition(":")[0]
        if procedure is not None:
            procedure.body = script
        fragment = ParsedFragment(
            sprite_name=sprite,
            script_id=self.section.script_id,
            script=script,
            id_suffix=self.section.id_suffix,
            procedure=procedure,
        )
        return fragment, self.diagnostics

    def _error(self, line: int, column: int, message: str, text: str) -> None:
        self.diagnostics.append(
            ParseDiagnostic(line=line, column=max(column, 1), message=message, offending_text=text)
        )

    def _sequence(self, index: int, depth: int) -> tuple[list[BlockNode], int, str | None]:
        """Parse statements until end/else/EOF; returns (blocks, next, closer)."""
        blocks: list[BlockNode] = []
        while index < len(self.lines):
            lineno, line = self.lines[index]
            if line in ("end", "else"):
                return blocks, index + 1, line
            if blocks and isinstance(blocks[-1], Block) and blocks[-1].opcode == "control_forever":
                self._error(lineno, 1, "unreachable block after forever", line)
                return blocks, index + 1, None
            block, index = self._statement(lineno, line, index, depth)
            if block is not None:
                blocks.append(block)
            if self.diagnostics:
                return blocks, index, None
        return blocks, index, None

    def _statement(self, lineno: int, line: str, index: int, depth: int) -> tuple[Block | None, int]:
        try:
            tokens = tokenize(line)
        except TokenizeError as exc:
            self._error(lineno, exc.col, str(exc), line)
            return None, index + 1
        matched = _best_match(tokens, registry().statements)
        if matched is None:
            call = self._match_call(tokens)
            if call is not None:
                return self._finish_call(lineno, line, call, index)
            self._error(lineno, 1, f"unknown block: {line}", line)
            return None, index + 1
        template, bindings = matched
        spec = template.spec
        block = Block(opcode=spec.opcode)
        self._fill_slots(block, spec, bindings, lineno, line)
        index += 1
        if spec.substacks == 0:
            return block, index
        body, index, closer = self._sequence(index, depth + 1)
        block.substacks.append(body)
        if spec.opcode == "control_if" and closer == "else":
            block.opcode = "control_if_else"
            second, index, closer = self._sequence(index, depth + 1)
            block.substacks.append(second)
        elif spec.substacks == 2:
            block.substacks.append([])
        # a missing trailing "end" is tolerated at end of script
        return block, index

    def _match_call(self, tokens: list) -> tuple[str, dict[str, Group]] | None:
        for strict in (True, False):
            for proccode, pattern in self.prototypes.items():
                bindings = self._match_proccode(tokens, pattern, strict)
                if bindings is not None:
                    return proccode, bindings
        return None

    def _match_proccode(self, tokens: list, pattern: list, strict: bool) -> dict[str, Group] | None:
        if len(tokens) != len(pattern):
            return None
        bindings: dict[str, Group] = {}
        for tok, pat in zip(tokens, pattern):
            if isinstance(pat, Word):
                if not isinstance(tok, Word) or tok.text.casefold() != pat.text.casefold():
                    return None
            else:
                if not isinstance(tok, Group):
                    return None
                name, _, kind = pat.name.partition(":")
                if kind == "b" and strict and tok.kind != "<":
                    return None
                bindings[name] = tok
        return bindings

    def _finish_call(self, lineno: int, line: str, call: tuple[str, dict[str, Group]], index: int) -> tuple[Block | None, int]:
        proccode, bindings = call
        block = Block(opcode=PROCEDURE_CALL, fields={"PROCCODE": proccode})
        kinds = ["boolean" if m == "%b" else "value" for m in re.findall(r"%[snb]", proccode)]
        for i, kind in enumerate(kinds):
            group = bindings.get(f"ARG{i + 1}")
            if group is None:
                continue
            slot_kind = SlotKind.BOOLEAN if kind == "boolean" else SlotKind.TEXT
            block.inputs[f"ARG{i + 1}"] = self._expression(group, slot_kind, lineno, line)
        return block, index + 1

    def _fill_slots(self, block: Block, spec, bindings: dict[str, Group], lineno: int, line: str) -> None:
        for slot in spec.slots:
            group = bindings.get(slot.name)
            if slot.kind in (SlotKind.DROPDOWN, SlotKind.BROADCAST):
                block.fields[slot.name] = group.dropdown_value if group is not None else slot.default
            elif group is not None:
                block.inputs[slot.name] = self._expression(group, slot.kind, lineno, line)
            else:
                block.inputs[slot.name] = None

    def _expression(self, group: Group, kind: SlotKind, lineno: int, line: str) -> Expression | None:
        if kind is SlotKind.COLOR:
            return Literal(group.dropdown_value)
        content = group.content.strip()
        if group.kind == "[":
            if kind is SlotKind.NUMBER:
                return Literal(coerce_number(content))
            return Literal(group.content)
        if not content:
            return None
        col = group.col + 1
        try:
            tokens = tokenize(group.content)
        except TokenizeError as exc:
            self._error(lineno, group.col + exc.col, str(exc), group.content)
            return None
        if group.kind == "<":
            return self._boolean_expression(group, tokens, content, lineno, col)
        # round group: number, reporter, parameter, then variable
        value = coerce_number(content)
        if isinstance(value, (int, float)):
            return Literal(value)
        matched = _best_match(tokens, registry().reporters)
        if matched is not None:
            return self._reporter_block(matched, lineno, line)
        boolean = _best_match(tokens, registry().booleans)
        if boolean is not None:
            return self._reporter_block(boolean, lineno, line)
        if content in self.params:
            return ParameterReporter(name=content, boolean=self.params[content] == "boolean")
        if all(isinstance(t, Word) for t in tokens):
            return VariableReporter(name=content)
        self._error(lineno, col, f"unknown reporter: ({group.content})", group.content)
        return None

    def _boolean_expression(self, group: Group, tokens: list, content: str, lineno: int, col: int):
        matched = _best_match(tokens, registry().booleans)
        if matched is not None:
            return self._reporter_block(matched, lineno, content)
        if content in self.params and self.params[content] == "boolean":
            return ParameterReporter(name=content, boolean=True)
        self._error(lineno, col, f"expected a condition: <{group.content}>", group.content)
        return None

    def _reporter_block(self, matched: tuple[CompiledTemplate, dict], lineno: int, line: str) -> Block:
        template, bindings = matched
        block = Block(opcode=template.spec.opcode)
        self._fill_slots(block, template.spec, bindings, lineno, line)
        return block
