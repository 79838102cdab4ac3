"""Prepare backend data for panel tests.

Writes into the given directory: ``boat.sb3`` (a sample project with one
once-only-condition bug), ``mock/`` with canned model replies keyed by the
prompts the server will render, and ``server.toml`` for `blockaid serve`.
Prints the issue id the panel should address.
"""

from __future__ import annotations

import sys
from pathlib import Path

from blockaid.lint import run_detectors
from blockaid.llm.prompts import DefaultPromptProvider
from blockaid.llm.providers import seed_mock
from blockaid.llm.tasks import ExplainTask, FixTask
from blockaid.model.ast import Block, Literal, Script, new_program, new_sprite
from blockaid.model.sb3 import save_sb3
from blockaid.text.printer import print_program

FIXED_SCRIPT = """\
// script-id: Boat:1
when green flag clicked
forever
  if <touching color [swamp v]?> then
    move (-1) steps
  end
end
"""

FALLBACK_EXPLANATION = """\
1. The condition is checked only once, right after the green flag is
clicked. Press the green flag and watch: if the boat is not touching the
colour at that exact moment, nothing will ever happen.
2. Steps: press the green flag, then move the Boat onto the colour. The
boat does not move backwards even though it is touching it.
"""


def sample_program():
    program = new_program()
    boat = new_sprite("Boat")
    boat.scripts.append(Script(id="Boat:1", blocks=[
        Block("event_whenflagclicked"),
        Block(
            "control_if",
            inputs={"CONDITION": Block("sensing_touchingcolor", inputs={"COLOR": Literal("swamp")})},
            substacks=[[Block("motion_movesteps", inputs={"STEPS": Literal(-1)})]],
        ),
    ]))
    program.sprites.append(boat)
    return program


def main(out_dir: str) -> None:
    out = Path(out_dir)
    mock = out / "mock"
    mock.mkdir(parents=True, exist_ok=True)

    program = sample_program()
    (out / "boat.sb3").write_bytes(save_sb3(program))

    issue = run_detectors(program)[0]
    prompts = DefaultPromptProvider()
    context = print_program(program, "Boat")

    explain_source = Path(__file__).resolve().parents[2] / "tests" / "fixtures" / "explain_response.txt"
    explain_text = explain_source.read_text("utf-8") if explain_source.is_file() else FALLBACK_EXPLANATION
    seed_mock(mock, prompts.render(ExplainTask(issue=issue), context, issue), explain_text)
    seed_mock(mock, prompts.render(FixTask(issue=issue), context, issue), FIXED_SCRIPT)
    (mock / "default.txt").write_text(
        "The boat drifts backwards whenever it touches the swamp colour.", encoding="utf-8"
    )

    (out / "server.toml").write_text(
        f'[llm]\nprovider = "mock"\n\n[llm.mock]\nfixtures = "{mock}"\n', encoding="utf-8"
    )
    print(issue.id)


if __name__ == "__main__":
    main(sys.argv[1])
