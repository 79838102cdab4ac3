from __future__ import annotations

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blockaid.text.parser import parse_fragments
from blockaid.text.printer import print_program
from blockaid.text.repair import repair_text

from .conftest import FIXED_BOAT_SCRIPT
from .gen import generate_corpus


def test_invented_opcode_is_mapped():
    repaired = repair_text("set rotation to (90)")
    assert repaired == "point in direction (90)"
    assert parse_fragments(repaired).diagnostics == []


def test_braced_body_becomes_then_end():
    repaired = repair_text("if <mouse down?> { move (10) steps }")
    assert repaired.splitlines() == ["if <mouse down?>", "move (10) steps", "end"]
    result = parse_fragments(repaired)
    assert result.diagnostics == []
    block = result.fragments[0].script.blocks[0]
    assert block.opcode == "control_if"
    assert [b.opcode for b in block.substacks[0]] == ["motion_movesteps"]


def test_braced_else_branches():
    text = "if <mouse down?> { move (10) steps } else { say [no] }"
    result = parse_fragments(repair_text(text))
    assert result.diagnostics == []
    assert result.fragments[0].script.blocks[0].opcode == "control_if_else"


def test_braces_inside_string_literals_are_kept():
    repaired = repair_text("say [curly {braces} inside]")
    assert repaired == "say [curly {braces} inside]"


def test_markdown_fences_are_stripped():
    text = "Here is the fix:\n```scratchblocks\nmove (10) steps\n```\nEnjoy!"
    assert repair_text(text) == "move (10) steps"


def test_typographic_quotes_normalized():
    assert repair_text("say [“hello”] for (2) seconds") == 'say ["hello"] for (2) seconds'


def test_original_dropped_when_modified_exists():
    text = (
        "// script-id: Boat:1 (original version)\n"
        "when green flag clicked\n"
        "move (1) steps\n"
        "// script-id: Boat:1 (modified version)\n"
        "when green flag clicked\n"
        "move (2) steps\n"
    )
    repaired = repair_text(text)
    assert repaired.count("// script-id: Boat:1") == 1
    assert "move (1) steps" not in repaired
    assert "move (2) steps" in repaired
    assert "version" not in repaired


def test_lone_original_suffix_is_stripped_but_kept():
    text = "// script-id: Boat:1 original version\nwhen green flag clicked"
    repaired = repair_text(text)
    assert "// script-id: Boat:1" in repaired
    assert "original" not in repaired
    assert "when green flag clicked" in repaired


def test_valid_printer_output_is_a_fixed_point(boatrace):
    text = print_program(boatrace).text
    assert repair_text(text) == text


@pytest.mark.parametrize("index", range(0, 20, 4))
def test_repair_is_idempotent_on_corpus_texts(index):
    program = generate_corpus(20)[index]
    text = print_program(program).text
    once = repair_text(text)
    assert repair_text(once) == once


ADVERSARIAL = [
    "```\nif <x> { move (1) steps }\n```",
    "set rotation to (90)\nset rotation to (90)",
    "// script-id: A:1 (original version)\nmove (1) steps\n// script-id: A:1 (modified version)\nmove (2) steps",
    "if <touching [edge v]?> {\n  turn right (15) degrees\n}",
    "say [‘quoted’]",
    FIXED_BOAT_SCRIPT,
]


@pytest.mark.parametrize("text", ADVERSARIAL)
def test_repair_is_idempotent_on_adversarial_samples(text):
    once = repair_text(text)
    assert repair_text(once) == once


@settings(max_examples=300, deadline=None)
@given(st.text(max_size=400))
def test_repair_is_idempotent_on_arbitrary_text(text):
    once = repair_text(text)
    assert repair_text(once) == once
