"""Acceptance suite: one test per acceptance criterion.

Run with ``pytest tests/test_acceptance.py -v -s`` to see one PASS line per
criterion.  Everything runs against the deterministic mock provider; no
network is touched.
"""

from __future__ import annotations

import base64
import json
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from blockaid.cli import main as cli_main
from blockaid.config import Config
from blockaid.errors import NothingUsable
from blockaid.lint import run_detectors
from blockaid.llm.orchestrator import explain_issue, fix_issue
from blockaid.llm.prompts import DefaultPromptProvider
from blockaid.llm.providers import seed_mock
from blockaid.llm.tasks import ExplainTask, FixTask
from blockaid.model.ast import Block, iter_blocks, new_program
from blockaid.model.diff import scripts_equal, structural_diff
from blockaid.model.opcodes import CATEGORIES, OPCODES, PROCEDURE_CALL
from blockaid.model.sb3 import load_sb3, save_sb3
from blockaid.service import create_app
from blockaid.text.parser import parse_fragments
from blockaid.text.printer import print_program
from blockaid.text.repair import repair_text

from .conftest import FIXED_BOAT_SCRIPT, ScriptedProvider, make_boatrace
from .gen import generate_corpus

EXPLAIN_TEXT = (Path(__file__).parent / "fixtures" / "explain_response.txt").read_text("utf-8")

CORPUS = generate_corpus(20)


def report(name: str) -> None:
    print(f"ACCEPTANCE {name}: PASS")


def test_round_trip_suite_over_generated_corpus():
    assert len(CORPUS) >= 20
    covered: set[str] = set()

    def note(block) -> None:
        if not isinstance(block, Block):
            return
        if block.opcode in OPCODES:
            covered.add(OPCODES[block.opcode].category)
        elif block.opcode == PROCEDURE_CALL:
            covered.add("my-blocks")
        for value in block.inputs.values():
            if isinstance(value, Block):
                note(value)

    for program in CORPUS:
        printed = print_program(program)
        assert printed.skipped == []
        result = parse_fragments(printed.text)
        assert result.diagnostics == [], printed.text
        stacks = {
            stack.id: stack
            for target in program.targets()
            for stack in target.all_stacks()
        }
        assert len(result.fragments) == len(stacks)
        for fragment in result.fragments:
            assert scripts_equal(fragment.script, stacks[fragment.script_id])
        for target in program.targets():
            if target.procedures:
                covered.add("my-blocks")
            for stack in target.all_stacks():
                for block in iter_blocks(stack.blocks):
                    note(block)
    assert covered.issuperset(CATEGORIES), set(CATEGORIES) - covered
    report("round-trip suite (20 programs, all categories, 100%)")


def test_sb3_round_trip_on_all_fixtures():
    fixtures = CORPUS + [make_boatrace(), make_boatrace(fixed=True), new_program()]
    for program in fixtures:
        first = save_sb3(program)
        reloaded = load_sb3(first)
        assert structural_diff(program, reloaded) == []
        assert save_sb3(reloaded) == first
    report("sb3 round-trip (structural equality + byte-identical resave)")


def test_missing_loop_detection():
    buggy = run_detectors(make_boatrace())
    missing = [i for i in buggy if i.finder == "missing-loop"]
    assert len(missing) == 1
    assert missing[0].location.target == "Boat"
    assert missing[0].location.script_id == "Boat:1"

    fixed = run_detectors(make_boatrace(fixed=True))
    assert [i.finder for i in fixed if i.finder == "missing-loop"] == []
    assert [i.finder for i in fixed if i.finder == "looped-condition"] == ["looped-condition"]
    report("missing-loop detection (buggy fires once, fixed variant is a perfume)")


def test_repair_heuristics():
    # invented opcode
    repaired = repair_text("set rotation to (90)")
    assert parse_fragments(repaired).diagnostics == []
    assert "point in direction (90)" in repaired
    # brace-scoped bodies
    repaired = repair_text("if <mouse down?> { move (10) steps }")
    result = parse_fragments(repaired)
    assert result.diagnostics == []
    assert result.fragments[0].script.blocks[0].opcode == "control_if"
    # original/modified duplicates
    doubled = (
        "// script-id: Boat:1 (original version)\nwhen green flag clicked\nmove (1) steps\n"
        "// script-id: Boat:1 (modified version)\nwhen green flag clicked\nmove (2) steps\n"
    )
    deduped = repair_text(doubled)
    result = parse_fragments(deduped)
    assert result.diagnostics == []
    assert len(result.fragments) == 1
    assert "move (2) steps" in deduped

    texts = [print_program(p).text for p in CORPUS]
    texts += [doubled, "```\nset rotation to (90)\n```", repaired]
    for text in texts:
        once = repair_text(text)
        assert repair_text(once) == once
    report("repair heuristics (3 failure modes + idempotence on corpus)")


@pytest.mark.parametrize("failures", [0, 1, 2, 3, 4, 5])
def test_retry_bound(failures):
    program = make_boatrace()
    issue = run_detectors(program)[0]
    provider = ScriptedProvider(["garbage ???"] * failures + [FIXED_BOAT_SCRIPT])
    if failures <= 3:
        outcome = fix_issue(program, issue, provider)
        assert outcome.attempts_used == failures
        assert outcome.replaced == ["Boat:1"]
    else:
        with pytest.raises(NothingUsable) as err:
            fix_issue(program, issue, provider)
        assert err.value.attempts_used == 3
        assert len(err.value.dropped) == 1
    assert provider.calls <= 4
    if failures == 5:
        report("retry bound (1 + <=3 calls, NothingUsable beyond)")


def test_end_to_end_fix():
    program = make_boatrace()
    issue = run_detectors(program)[0]
    outcome = fix_issue(program, issue, ScriptedProvider([FIXED_BOAT_SCRIPT]))
    data = save_sb3(outcome.updated)
    reloaded = load_sb3(data)
    assert all(i.finder != "missing-loop" for i in run_detectors(reloaded))
    assert structural_diff(outcome.updated, make_boatrace(fixed=True)) == []
    assert structural_diff(reloaded, make_boatrace(fixed=True)) == []
    report("end-to-end fix (merge, re-serialize, reload, expected AST)")


def test_explanation_append():
    program = make_boatrace()
    issue = run_detectors(program)[0]
    updated = explain_issue(program, issue, ScriptedProvider([EXPLAIN_TEXT]))
    assert updated.generic_description == issue.generic_description
    assert "Press the green flag" in updated.llm_explanation
    assert "does not move backwards" in updated.llm_explanation
    report("explanation append (generic description intact, canned text appended)")


def test_cli_contract(tmp_path, capsys):
    program = make_boatrace()
    sb3 = tmp_path / "boat.sb3"
    sb3.write_bytes(save_sb3(program))
    fixtures = tmp_path / "mock"
    fixtures.mkdir()
    (fixtures / "default.txt").write_text(
        "bug | Magic number | Boat | Use a variable instead of -1.", encoding="utf-8"
    )
    config = tmp_path / "cfg.toml"
    config.write_text(
        f'[llm]\nprovider = "mock"\n\n[llm.mock]\nfixtures = "{fixtures}"\n', encoding="utf-8"
    )
    code = cli_main([
        "llm", "analyze", "--path", str(sb3), "--target", "Boat", "--new-issues",
        "--config", str(config),
    ])
    out = capsys.readouterr().out
    assert code == 0
    assert "missing-loop" in out
    assert "llm@Boat" in out

    for args in (
        ["--help"],
        ["llm", "--help"],
        ["llm", "analyze", "--help"],
        ["llm", "explain", "--help"],
        ["llm", "fix", "--help"],
        ["llm", "ask", "--help"],
        ["llm", "complete", "--help"],
        ["serve", "--help"],
    ):
        assert cli_main(args) == 0
        capsys.readouterr()
    report("cli contract (analyze with mock exits 0; --help everywhere)")


def test_service_contract(tmp_path):
    fixtures = tmp_path / "mock"
    fixtures.mkdir()
    config = Config(llm_mock_fixtures=str(fixtures))
    client = TestClient(create_app(config))
    program = make_boatrace()
    prompts = DefaultPromptProvider()
    issue = run_detectors(program)[0]
    seed_mock(fixtures, prompts.render(ExplainTask(issue=issue), print_program(program, "Boat"), issue),
              EXPLAIN_TEXT)
    seed_mock(fixtures, prompts.render(FixTask(issue=issue), print_program(program, "Boat"), issue),
              FIXED_BOAT_SCRIPT)

    upload = client.post(
        "/sessions", files={"file": ("boat.sb3", save_sb3(program), "application/zip")}
    )
    assert upload.status_code == 201
    sid = upload.json()["session_id"]
    other = client.post(
        "/sessions", files={"file": ("boat.sb3", save_sb3(program), "application/zip")}
    ).json()["session_id"]

    explain = client.post(f"/sessions/{sid}/issues/{issue.id}/explain")
    assert explain.status_code == 200
    assert "Press the green flag" in explain.json()["issue"]["explanation"]

    fix = client.post(f"/sessions/{sid}/issues/{issue.id}/fix")
    assert fix.status_code == 200
    assert all(i["finder"] != "missing-loop" for i in fix.json()["issues"])

    # interleaved second session stays untouched
    other_state = client.get(f"/sessions/{other}").json()
    assert [i["finder"] for i in other_state["issues"]] == ["missing-loop"]

    revert = client.post(f"/sessions/{sid}/revert")
    assert revert.status_code == 200
    restored = load_sb3(base64.b64decode(revert.json()["program"]))
    assert structural_diff(program, restored) == []
    assert client.post(f"/sessions/{other}/revert").status_code == 409

    report("service contract (upload/explain/fix/revert + session isolation)")
