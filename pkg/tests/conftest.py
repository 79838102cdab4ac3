from __future__ import annotations

import pytest

from blockaid.errors import ProviderUnavailable
from blockaid.llm.providers import CompletionParams, LlmProvider
from blockaid.model.ast import Block, Literal, Program, Script, new_program, new_sprite
from blockaid.model.sb3 import save_sb3


def touching_swamp() -> Block:
    return Block("sensing_touchingcolor", inputs={"COLOR": Literal("swamp")})


def boat_if_block() -> Block:
    return Block(
        "control_if",
        inputs={"CONDITION": touching_swamp()},
        substacks=[[Block("motion_movesteps", inputs={"STEPS": Literal(-1)})]],
    )


def make_boatrace(fixed: bool = False) -> Program:
    """One-sprite fixture: green-flag script with a once-only collision check,
    optionally already wrapped in a forever loop."""
    program = new_program()
    boat = new_sprite("Boat")
    inner = boat_if_block()
    body = [Block("control_forever", substacks=[[inner]])] if fixed else [inner]
    boat.scripts.append(Script(id="Boat:1", blocks=[Block("event_whenflagclicked"), *body]))
    program.sprites.append(boat)
    return program


FIXED_BOAT_SCRIPT = """\
// script-id: Boat:1
when green flag clicked
forever
  if <touching color [swamp v]?> then
    move (-1) steps
  end
end
"""


@pytest.fixture
def boatrace() -> Program:
    return make_boatrace()


@pytest.fixture
def boatrace_fixed() -> Program:
    return make_boatrace(fixed=True)


@pytest.fixture
def boatrace_bytes(boatrace) -> bytes:
    return save_sb3(boatrace)


class ScriptedProvider(LlmProvider):
    """Returns canned responses in order and counts calls."""

    name = "scripted"

    def __init__(self, responses: list[str]) -> None:
        self.responses = list(responses)
        self.calls = 0
        self.prompts: list[str] = []

    def complete(self, prompt: str, params: CompletionParams) -> str:
        self.prompts.append(prompt)
        self.calls += 1
        if not self.responses:
            raise ProviderUnavailable("scripted provider ran out of responses")
        return self.responses.pop(0)


class CapturingProvider(ScriptedProvider):
    """Scripted provider whose recorded prompts tests inspect."""
