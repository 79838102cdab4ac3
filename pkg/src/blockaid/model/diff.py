"""Structural comparison of programs.

Comparison ignores script-id renumbering and everything that is pure
container carry-through (costume records, asset bytes, layer data); it
looks only at the code structure a learner can see.  The diff powers
revert assertions and fix summaries.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

from .ast import (
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
from .opcodes import OPCODES


class ChangeKind(Enum):
    ADDED_TARGET = "added-target"
    REMOVED_TARGET = "removed-target"
    ADDED_SCRIPT = "added-script"
    REMOVED_SCRIPT = "removed-script"
    MODIFIED_SCRIPT = "modified-script"
    MODIFIED_TARGET = "modified-target"  # variables/lists/costumes changed


@dataclass(frozen=True)
class Change:
    target: str
    script_id: str | None
    kind: ChangeKind


def structural_diff(a: Program, b: Program) -> list[Change]:
    """Changes required to get from ``a`` to ``b``; empty iff equivalent."""
    changes: list[Change] = []
    a_targets = {t.name: t for t in a.targets()}
    b_targets = {t.name: t for t in b.targets()}
    for name in a_targets:
        if name not in b_targets:
            changes.append(Change(name, None, ChangeKind.REMOVED_TARGET))
    for name, b_target in b_targets.items():
        a_target = a_targets.get(name)
        if a_target is None:
            changes.append(Change(name, None, ChangeKind.ADDED_TARGET))
        else:
            changes.extend(_diff_target(a_target, b_target))
    return changes


def structurally_equal(a: Program, b: Program) -> bool:
    return not structural_diff(a, b)


def scripts_equal(a: Script, b: Script) -> bool:
    return _blocks_key(a.blocks) == _blocks_key(b.blocks)


def _diff_target(a: Target, b: Target) -> list[Change]:
    changes: list[Change] = []
    if (
        a.variables != b.variables
        or a.lists != b.lists
        or a.costumes != b.costumes
        or _procs_key(a.procedures) != _procs_key(b.procedures)
    ):
        changes.append(Change(b.name, None, ChangeKind.MODIFIED_TARGET))

    a_scripts = list(a.scripts)
    b_scripts = list(b.scripts)
    a_by_id = {s.id: s for s in a_scripts}
    b_by_id = {s.id: s for s in b_scripts}

    matched_a: set[int] = set()
    matched_b: set[int] = set()
    # pass 1: same id on both sides
    for i, sa in enumerate(a_scripts):
        if sa.id in b_by_id:
            sb = b_by_id[sa.id]
            j = b_scripts.index(sb)
            matched_a.add(i)
            matched_b.add(j)
            if not scripts_equal(sa, sb):
                changes.append(Change(b.name, sa.id, ChangeKind.MODIFIED_SCRIPT))
    # pass 2: equal content under renumbering
    for i, sa in enumerate(a_scripts):
        if i in matched_a:
            continue
        for j, sb in enumerate(b_scripts):
            if j in matched_b or sb.id in a_by_id:
                continue
            if scripts_equal(sa, sb):
                matched_a.add(i)
                matched_b.add(j)
                break
    # pass 3: pair leftovers in order as modifications
    rest_a = [s for i, s in enumerate(a_scripts) if i not in matched_a]
    rest_b = [s for j, s in enumerate(b_scripts) if j not in matched_b and s.id not in a_by_id]
    for sa, sb in zip(rest_a, rest_b):
        changes.append(Change(b.name, sb.id, ChangeKind.MODIFIED_SCRIPT))
    for sa in rest_a[len(rest_b):]:
        changes.append(Change(b.name, sa.id, ChangeKind.REMOVED_SCRIPT))
    for sb in rest_b[len(rest_a):]:
        changes.append(Change(b.name, sb.id, ChangeKind.ADDED_SCRIPT))
    return changes


def _procs_key(procedures: list[ProcedureDefinition]) -> list:
    return [
        (p.prototype, tuple((q.name, q.kind) for q in p.parameters), p.warp, _blocks_key(p.body.blocks))
        for p in procedures
    ]


def _blocks_key(blocks: list[BlockNode]) -> tuple:
    return tuple(_block_key(b) for b in blocks)


def _block_key(block: BlockNode) -> tuple:
    if isinstance(block, OpaqueBlock):
        root = dict(block.records.get(block.root_id, {}))
        for positional in ("parent", "next", "x", "y", "topLevel"):
            root.pop(positional, None)
        rest = {k: v for k, v in block.records.items() if k != block.root_id}
        return ("opaque", _freeze(root), _freeze(rest))
    spec = OPCODES.get(block.opcode)
    substack_count = spec.substacks if spec else len(block.substacks)
    stacks = [
        block.substacks[i] if i < len(block.substacks) else []
        for i in range(max(substack_count, len(block.substacks)))
    ]
    return (
        block.opcode,
        tuple(sorted((k, _expr_key(v)) for k, v in block.inputs.items() if v is not None)),
        tuple(sorted(block.fields.items())),
        tuple(_blocks_key(s) for s in stacks),
    )


def _expr_key(expr: Expression) -> tuple:
    if isinstance(expr, Literal):
        value = expr.value
        if isinstance(value, (int, float)) and not isinstance(value, bool):
            return ("lit", "num", float(value))
        return ("lit", "str", str(value))
    if isinstance(expr, VariableReporter):
        return ("var", expr.name)
    if isinstance(expr, ParameterReporter):
        return ("param", expr.name, expr.boolean)
    return ("block",) + _block_key(expr)


def _freeze(value):
    if isinstance(value, dict):
        return tuple(sorted((k, _freeze(v)) for k, v in value.items()))
    if isinstance(value, list):
        return tuple(_freeze(v) for v in value)
    return value
