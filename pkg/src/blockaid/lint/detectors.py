"""The shipped detectors.

The exact predicates live in docs/detectors.md; in short:

* missing-loop: an if/if-else in a green-flag script with no enclosing loop,
  so the condition is tested exactly once at program start.
* looped-condition: the positive counterpart, an if/if-else enclosed in a
  ``forever`` or ``repeat until`` loop.
* empty-script: a hat block with nothing underneath.
* unreachable-after-forever: statements following a ``forever`` loop.
"""

from __future__ import annotations

from ..model.ast import Block, BlockNode, Program, Script, Target
from ..model.opcodes import CONDITIONAL_OPCODES, LOOP_OPCODES, is_hat
from . import (
    KIND_BUG,
    KIND_PERFUME,
    KIND_SMELL,
    SEVERITY_ERROR,
    SEVERITY_INFO,
    SEVERITY_WARN,
    Detector,
    Issue,
    make_issue,
    register_detector,
)

_CONTINUOUS_LOOPS = frozenset({"control_forever", "control_repeat_until"})


def _preorder(blocks: list[BlockNode], loops: frozenset[str]):
    """Yield (index, block, enclosing-loop opcodes) in pre-order."""
    counter = -1

    def walk(seq: list[BlockNode], enclosing: tuple[str, ...]):
        nonlocal counter
        for block in seq:
            counter += 1
            yield counter, block, enclosing
            if isinstance(block, Block):
                inner = enclosing + ((block.opcode,) if block.opcode in loops else ())
                for stack in block.substacks:
                    yield from walk(stack, inner)

    yield from walk(blocks, ())


def _scan_missing_loop(program: Program, detector: Detector) -> list[Issue]:
    issues: list[Issue] = []
    for target in program.targets():
        for script in target.scripts:
            if not script.blocks or not isinstance(script.blocks[0], Block):
                continue
            if script.blocks[0].opcode != "event_whenflagclicked":
                continue
            for index, block, enclosing in _preorder(script.blocks, LOOP_OPCODES):
                if isinstance(block, Block) and block.opcode in CONDITIONAL_OPCODES and not enclosing:
                    issues.append(make_issue(detector, target, script, index))
    return issues


def _scan_looped_condition(program: Program, detector: Detector) -> list[Issue]:
    issues: list[Issue] = []
    for target in program.targets():
        for script in target.scripts:
            for index, block, enclosing in _preorder(script.blocks, _CONTINUOUS_LOOPS):
                if isinstance(block, Block) and block.opcode in CONDITIONAL_OPCODES and enclosing:
                    issues.append(make_issue(detector, target, script, index))
    return issues


def _scan_empty_script(program: Program, detector: Detector) -> list[Issue]:
    issues: list[Issue] = []
    for target in program.targets():
        for script in target.scripts:
            if len(script.blocks) == 1 and isinstance(script.blocks[0], Block) \
                    and is_hat(script.blocks[0].opcode):
                issues.append(make_issue(detector, target, script, 0))
    return issues


def _scan_unreachable(program: Program, detector: Detector) -> list[Issue]:
    issues: list[Issue] = []
    for target in program.targets():
        for script in target.all_stacks():
            issues.extend(_unreachable_in(detector, target, script, script.blocks, start=0)[0])
    return issues


def _unreachable_in(
    detector: Detector, target: Target, script: Script, blocks: list[BlockNode], start: int
) -> tuple[list[Issue], int]:
    issues: list[Issue] = []
    index = start
    for position, block in enumerate(blocks):
        current = index
        index += 1
        if isinstance(block, Block):
            for stack in block.substacks:
                nested, index = _unreachable_in(detector, target, script, stack, index)
                issues.extend(nested)
            if block.opcode == "control_forever" and position != len(blocks) - 1:
                issues.append(make_issue(detector, target, script, current))
    return issues, index


MISSING_LOOP = Detector("missing-loop", KIND_BUG, SEVERITY_WARN, _scan_missing_loop)
EMPTY_SCRIPT = Detector("empty-script", KIND_SMELL, SEVERITY_INFO, _scan_empty_script)
UNREACHABLE_AFTER_FOREVER = Detector(
    "unreachable-after-forever", KIND_BUG, SEVERITY_ERROR, _scan_unreachable
)
LOOPED_CONDITION = Detector("looped-condition", KIND_PERFUME, SEVERITY_INFO, _scan_looped_condition)

for _detector in (MISSING_LOOP, EMPTY_SCRIPT, UNREACHABLE_AFTER_FOREVER, LOOPED_CONDITION):
    register_detector(_detector)
