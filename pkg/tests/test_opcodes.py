"""Enumerated checks over the static opcode table: every printable opcode has
a working print rule and parse rule, and slot wiring is internally sound."""

from __future__ import annotations

import pytest

from blockaid.model.ast import Block, Literal, Script, Target, validate
from blockaid.model.diff import scripts_equal
from blockaid.model.opcodes import (
    CATEGORIES,
    MENU_OPCODES,
    OPCODES,
    Shape,
    SlotKind,
    OpcodeSpec,
)
from blockaid.model.sb3 import load_sb3, save_sb3
from blockaid.text.parser import parse_fragments
from blockaid.text.printer import print_script
from blockaid.model.ast import new_program, new_sprite


def synth_block(spec: OpcodeSpec) -> Block:
    block = Block(spec.opcode)
    for slot in spec.slots:
        if slot.kind in (SlotKind.DROPDOWN, SlotKind.BROADCAST):
            value = slot.choices[0] if slot.choices else (slot.default or "thing")
            block.fields[slot.name] = slot.to_display(value)
        elif slot.kind is SlotKind.COLOR:
            block.inputs[slot.name] = Literal("#abcdef")
        elif slot.kind is SlotKind.NUMBER:
            block.inputs[slot.name] = Literal(7)
        elif slot.kind is SlotKind.TEXT:
            block.inputs[slot.name] = Literal("thing")
        elif slot.kind is SlotKind.BOOLEAN:
            block.inputs[slot.name] = Block("sensing_mousedown")
    for _ in range(spec.substacks):
        block.substacks.append([Block("motion_movesteps", inputs={"STEPS": Literal(1)})])
    return block


def wrap_in_script(spec: OpcodeSpec, block: Block) -> Script:
    if spec.shape is Shape.HAT:
        blocks = [block, Block("motion_movesteps", inputs={"STEPS": Literal(1)})]
    elif spec.shape is Shape.STATEMENT:
        blocks = [block]
    elif spec.shape is Shape.REPORTER:
        blocks = [Block("looks_say", inputs={"MESSAGE": block})]
    else:
        blocks = [Block("control_wait_until", inputs={"CONDITION": block})]
    return Script(id="T:1", blocks=blocks)


@pytest.mark.parametrize("opcode", sorted(OPCODES))
def test_every_opcode_prints_and_parses(opcode):
    spec = OPCODES[opcode]
    script = wrap_in_script(spec, synth_block(spec))
    lines = print_script(Target(name="T"), script)
    result = parse_fragments("\n".join(lines))
    assert result.diagnostics == [], f"{opcode}: {result.diagnostics}"
    assert len(result.fragments) == 1
    assert scripts_equal(result.fragments[0].script, script), opcode


@pytest.mark.parametrize("opcode", sorted(OPCODES))
def test_every_opcode_survives_the_container(opcode):
    spec = OPCODES[opcode]
    program = new_program()
    sprite = new_sprite("T")
    sprite.scripts.append(wrap_in_script(spec, synth_block(spec)))
    program.sprites.append(sprite)
    reloaded = load_sb3(save_sb3(program))
    assert scripts_equal(reloaded.sprites[0].scripts[0], sprite.scripts[0]), opcode


def test_menu_backed_slots_reference_known_menus():
    for spec in OPCODES.values():
        for slot in spec.slots:
            if slot.menu_opcode is not None:
                assert slot.menu_opcode in MENU_OPCODES
                assert MENU_OPCODES[slot.menu_opcode] == (slot.menu_field or slot.name)


def test_template_markers_match_slots():
    import re

    for spec in OPCODES.values():
        for template in (spec.template, *spec.aliases):
            names = set(re.findall(r"\{([A-Z0-9_]+)\}", template))
            declared = {s.name for s in spec.slots}
            assert names.issubset(declared), spec.opcode


def test_every_category_is_populated():
    populated = {spec.category for spec in OPCODES.values()} | {"my-blocks"}
    assert populated == set(CATEGORIES)


def test_validate_accepts_synth_scripts():
    program = new_program()
    sprite = new_sprite("T")
    sprite.scripts.append(Script(id="T:1", blocks=[
        Block("event_whenflagclicked"),
        synth_block(OPCODES["control_if_else"]),
    ]))
    program.sprites.append(sprite)
    assert validate(program) == []


def test_validate_flags_misplaced_forever_and_hat():
    program = new_program()
    sprite = new_sprite("T")
    sprite.scripts.append(Script(id="T:1", blocks=[
        Block("control_forever", substacks=[[]]),
        Block("motion_movesteps", inputs={"STEPS": Literal(1)}),
        Block("event_whenflagclicked"),
    ]))
    program.sprites.append(sprite)
    problems = validate(program)
    assert any("forever" in p for p in problems)
    assert any("hat" in p for p in problems)


def test_validate_flags_dangling_procedure_call():
    program = new_program()
    sprite = new_sprite("T")
    sprite.scripts.append(Script(id="T:1", blocks=[
        Block("procedures_call", fields={"PROCCODE": "jump %s"}, inputs={"ARG1": Literal(1)}),
    ]))
    program.sprites.append(sprite)
    problems = validate(program)
    assert any("undefined block" in p for p in problems)
