"""Pretty-printer from the program tree to annotated block text.

Output is deterministic and carries comment lines identifying sprites and
scripts so fragments coming back from an LLM can be aligned with the tree:

    // sprite: Boat

    // script-id: Boat:1
    when green flag clicked
    ...
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

from ..errors import UnknownSprite, UnprintableBlock
from ..model.ast import (
    Block,
    BlockNode,
    Expression,
    Literal,
    OpaqueBlock,
    ParameterReporter,
    ProcedureDefinition,
    Program,
    Script,
    Target,
    VariableReporter,
)
from ..model.opcodes import OPCODES, PROCEDURE_CALL, Shape, SlotKind
from ..model.sb3 import format_number
from .grammar import SlotRef, proccode_tokens

PROGRAM_SCOPE = "program"
INDENT = "  "


@dataclass
class AnnotatedText:
    text: str
    #: scripts excluded because they contain blocks the grammar cannot express
    skipped: list[str] = field(default_factory=list)


def print_program(program: Program, scope: str = PROGRAM_SCOPE) -> AnnotatedText:
    """Render the selected scope; scripts with unsupported blocks are skipped
    and reported via ``AnnotatedText.skipped``."""
    if scope == PROGRAM_SCOPE:
        targets = list(program.targets())
    else:
        target = program.target(scope)
        if target is None:
            raise UnknownSprite(f"no sprite or stage named {scope!r}")
        targets = [target]

    sections: list[str] = []
    skipped: list[str] = []
    for target in targets:
        lines = [f"// sprite: {target.name}"]
        for proc in target.procedures:
            try:
                rendered = print_procedure(target, proc)
            except UnprintableBlock:
                skipped.append(proc.body.id)
                continue
            lines.append("")
            lines.append(f"// script-id: {proc.body.id}")
            lines.extend(rendered)
        for script in target.scripts:
            try:
                rendered = print_script(target, script)
            except UnprintableBlock:
                skipped.append(script.id)
                continue
            lines.append("")
            lines.append(f"// script-id: {script.id}")
            lines.extend(rendered)
        sections.append("\n".join(lines))
    return AnnotatedText(text="\n\n".join(sections) + "\n", skipped=skipped)


def print_script(target: Target, script: Script) -> list[str]:
    """Lines of one script; raises UnprintableBlock on unsupported blocks."""
    printer = _Printer(target)
    return printer.sequence(script.blocks, 0)


def print_procedure(target: Target, proc: ProcedureDefinition) -> list[str]:
    printer = _Printer(target, params={p.name: p.kind for p in proc.parameters})
    lines = [printer.define_line(proc)]
    lines.extend(printer.sequence(proc.body.blocks, 0))
    return lines


class _Printer:
    def __init__(self, target: Target, params: dict[str, str] | None = None) -> None:
        self.target = target
        self.params = params or {}

    def define_line(self, proc: ProcedureDefinition) -> str:
        parts: list[str] = []
        index = 0
        for token in proccode_tokens(proc.prototype):
            if isinstance(token, SlotRef):
                param = proc.parameters[index] if index < len(proc.parameters) else None
                index += 1
                if param is None:
                    parts.append("()")
                elif param.kind == "boolean":
                    parts.append(f"<{param.name}>")
                else:
                    parts.append(f"({param.name})")
            else:
                parts.append(token.text)
        return "define " + " ".join(parts)

    def sequence(self, blocks: list[BlockNode], depth: int) -> list[str]:
        lines: list[str] = []
        for block in blocks:
            lines.extend(self.statement(block, depth))
        return lines

    def statement(self, block: BlockNode, depth: int) -> list[str]:
        pad = INDENT * depth
        if isinstance(block, OpaqueBlock):
            raise UnprintableBlock(f"block {block.opcode!r} has no textual form")
        if block.opcode == PROCEDURE_CALL:
            return [pad + self.call_line(block)]
        spec = OPCODES.get(block.opcode)
        if spec is None:
            raise UnprintableBlock(f"block {block.opcode!r} has no textual form")
        head = pad + self.fill_template(spec.template, spec, block)
        if spec.substacks == 0:
            return [head]
        lines = [head]
        first = block.substacks[0] if block.substacks else []
        lines.extend(self.sequence(first, depth + 1))
        if spec.substacks == 2:
            lines.append(pad + "else")
            second = block.substacks[1] if len(block.substacks) > 1 else []
            lines.extend(self.sequence(second, depth + 1))
        lines.append(pad + "end")
        return lines

    def call_line(self, block: Block) -> str:
        proccode = block.fields.get("PROCCODE", "")
        parts: list[str] = []
        index = 0
        for token in proccode_tokens(proccode):
            if isinstance(token, SlotRef):
                index += 1
                boolean = token.name.endswith(":b")
                expr = block.inputs.get(f"ARG{index}")
                parts.append(self.expression(expr, SlotKind.BOOLEAN if boolean else SlotKind.TEXT))
            else:
                parts.append(token.text)
        return " ".join(parts)

    def fill_template(self, template: str, spec, block: Block) -> str:
        def render(match: "re.Match[str]") -> str:
            slot = spec.slot(match.group(1))
            if slot.kind in (SlotKind.DROPDOWN, SlotKind.BROADCAST):
                value = block.fields.get(slot.name, slot.default)
                return f"[{value} v]"
            return self.expression(block.inputs.get(slot.name), slot.kind)

        return re.sub(r"\{([A-Z0-9_]+)\}", render, template)

    def expression(self, expr: Expression | None, kind: SlotKind) -> str:
        if expr is None:
            return {SlotKind.BOOLEAN: "<>", SlotKind.NUMBER: "()"}.get(kind, "[]")
        if isinstance(expr, Literal):
            if isinstance(expr.value, (int, float)) and not isinstance(expr.value, bool):
                return f"({format_number(expr.value)})"
            if kind is SlotKind.COLOR:
                return f"[{expr.value} v]"
            return f"[{expr.value}]"
        if isinstance(expr, VariableReporter):
            return f"({expr.name})"
        if isinstance(expr, ParameterReporter):
            return f"<{expr.name}>" if expr.boolean else f"({expr.name})"
        if isinstance(expr, OpaqueBlock):
            raise UnprintableBlock(f"block {expr.opcode!r} has no textual form")
        spec = OPCODES.get(expr.opcode)
        if spec is None:
            raise UnprintableBlock(f"block {expr.opcode!r} has no textual form")
        inner = self.fill_template(spec.template, spec, expr)
        if spec.shape is Shape.BOOLEAN:
            return f"<{inner}>"
        return f"({inner})"
