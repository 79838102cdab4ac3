from __future__ import annotations

import json
import signal
import socket
import subprocess
import sys
import time
import urllib.request
from pathlib import Path

import pytest

from blockaid.cli import main
from blockaid.lint import run_detectors
from blockaid.llm.prompts import DefaultPromptProvider
from blockaid.llm.providers import seed_mock
from blockaid.llm.tasks import AskTask, CompleteTask, ExplainTask, FixTask
from blockaid.model.sb3 import load_sb3, save_sb3
from blockaid.text.printer import print_program

from .conftest import FIXED_BOAT_SCRIPT, make_boatrace

EXPLAIN_TEXT = (Path(__file__).parent / "fixtures" / "explain_response.txt").read_text("utf-8")


@pytest.fixture
def workspace(tmp_path):
    program = make_boatrace()
    sb3 = tmp_path / "boat.sb3"
    sb3.write_bytes(save_sb3(program))
    fixtures = tmp_path / "mock"
    fixtures.mkdir()
    config = tmp_path / "blockaid.toml"
    config.write_text(
        f'[llm]\nprovider = "mock"\n\n[llm.mock]\nfixtures = "{fixtures}"\n',
        encoding="utf-8",
    )
    return {"program": program, "sb3": sb3, "fixtures": fixtures, "config": config}


def run_cli(*args: str) -> int:
    return main(list(args))


def test_analyze_lists_missing_loop(workspace, capsys):
    code = run_cli("llm", "analyze", "--path", str(workspace["sb3"]))
    out = capsys.readouterr().out
    assert code == 0
    assert "missing-loop@Boat:1:1" in out
    assert "bug" in out


def test_analyze_json_format(workspace, capsys):
    code = run_cli("llm", "analyze", "--path", str(workspace["sb3"]), "--format", "json")
    assert code == 0
    issues = json.loads(capsys.readouterr().out)
    assert issues[0]["finder"] == "missing-loop"


def test_analyze_new_issues_with_mock(workspace, capsys):
    (workspace["fixtures"] / "default.txt").write_text(
        "bug | Magic number | Boat | Use a named variable instead of -1.",
        encoding="utf-8",
    )
    code = run_cli(
        "llm", "analyze", "--path", str(workspace["sb3"]),
        "--target", "Boat", "--new-issues", "--config", str(workspace["config"]),
    )
    out = capsys.readouterr().out
    assert code == 0
    assert "missing-loop" in out
    assert "llm" in out
    assert "Magic number" in out


def test_analyze_unknown_target_is_usage_error(workspace, capsys):
    code = run_cli("llm", "analyze", "--path", str(workspace["sb3"]), "--target", "Nessie")
    assert code == 1
    assert "Nessie" in capsys.readouterr().err


def test_missing_file_exits_1_with_stderr(tmp_path, capsys):
    code = run_cli("llm", "analyze", "--path", str(tmp_path / "absent.sb3"))
    assert code == 1
    assert capsys.readouterr().err != ""


@pytest.mark.parametrize(
    "args",
    [
        ("--help",),
        ("llm", "--help"),
        ("llm", "analyze", "--help"),
        ("llm", "explain", "--help"),
        ("llm", "fix", "--help"),
        ("llm", "ask", "--help"),
        ("llm", "complete", "--help"),
        ("serve", "--help"),
    ],
)
def test_every_subcommand_supports_help(args, capsys):
    assert run_cli(*args) == 0
    assert "Usage" in capsys.readouterr().out


def test_unknown_flag_is_usage_error(capsys):
    code = run_cli("llm", "analyze", "--frobnicate")
    assert code == 1
    assert "Usage" in capsys.readouterr().err or "no such option" in capsys.readouterr().err.lower()


def test_explain_prints_description_and_explanation(workspace, capsys):
    program = workspace["program"]
    issue = run_detectors(program)[0]
    prompt = DefaultPromptProvider().render(
        ExplainTask(issue=issue), print_program(program, "Boat"), issue
    )
    seed_mock(workspace["fixtures"], prompt, EXPLAIN_TEXT)
    code = run_cli(
        "llm", "explain", "--path", str(workspace["sb3"]),
        "--issue", issue.id, "--config", str(workspace["config"]),
    )
    out = capsys.readouterr().out
    assert code == 0
    assert issue.generic_description in out
    assert "Press the green flag" in out


def test_explain_unknown_issue_exits_1(workspace, capsys):
    code = run_cli(
        "llm", "explain", "--path", str(workspace["sb3"]),
        "--issue", "nope@X:1:0", "--config", str(workspace["config"]),
    )
    assert code == 1
    assert "nope@X:1:0" in capsys.readouterr().err


def test_fix_writes_archive_without_missing_loop(workspace, tmp_path, capsys):
    program = workspace["program"]
    issue = run_detectors(program)[0]
    prompt = DefaultPromptProvider().render(
        FixTask(issue=issue), print_program(program, "Boat"), issue
    )
    seed_mock(workspace["fixtures"], prompt, FIXED_BOAT_SCRIPT)
    out_path = tmp_path / "fixed.sb3"
    code = run_cli(
        "llm", "fix", "--path", str(workspace["sb3"]), "--issue", issue.id,
        "--out", str(out_path), "--config", str(workspace["config"]),
    )
    assert code == 0
    assert capsys.readouterr().out.strip() == str(out_path)
    fixed = load_sb3(out_path.read_bytes())
    assert all(i.finder != "missing-loop" for i in run_detectors(fixed))


def test_fix_with_garbage_exits_2(workspace, capsys):
    issue = run_detectors(workspace["program"])[0]
    (workspace["fixtures"] / "default.txt").write_text("prose only ???", encoding="utf-8")
    code = run_cli(
        "llm", "fix", "--path", str(workspace["sb3"]), "--issue", issue.id,
        "--config", str(workspace["config"]),
    )
    assert code == 2
    assert "nothing usable" in capsys.readouterr().err


def test_ask_prints_answer(workspace, capsys):
    program = workspace["program"]
    prompt = DefaultPromptProvider().render(
        AskTask(question="What does the boat do?", scope="Boat"),
        print_program(program, "Boat"),
    )
    seed_mock(workspace["fixtures"], prompt, "It moves backwards when touching swamp.")
    code = run_cli(
        "llm", "ask", "--path", str(workspace["sb3"]),
        "--question", "What does the boat do?", "--target", "Boat",
        "--config", str(workspace["config"]),
    )
    assert code == 0
    assert "moves backwards" in capsys.readouterr().out


def test_ask_empty_question_exits_1(workspace, capsys):
    code = run_cli(
        "llm", "ask", "--path", str(workspace["sb3"]), "--question", "   ",
        "--config", str(workspace["config"]),
    )
    assert code == 1


def test_complete_writes_extended_archive(workspace, tmp_path, capsys):
    program = workspace["program"]
    prompt = DefaultPromptProvider().render(
        CompleteTask(script_id="Boat:1"), print_program(program, "Boat")
    )
    completed = FIXED_BOAT_SCRIPT.replace(
        "when green flag clicked",
        "when green flag clicked\nturn right (15) degrees",
    )
    seed_mock(workspace["fixtures"], prompt, completed)
    out_path = tmp_path / "extended.sb3"
    code = run_cli(
        "llm", "complete", "--path", str(workspace["sb3"]), "--script", "Boat:1",
        "--out", str(out_path), "--config", str(workspace["config"]),
    )
    assert code == 0
    extended = load_sb3(out_path.read_bytes())
    opcodes = [b.opcode for b in extended.sprites[0].scripts[0].blocks]
    assert "motion_turnright" in opcodes


def test_complete_unknown_script_exits_1(workspace, capsys):
    code = run_cli(
        "llm", "complete", "--path", str(workspace["sb3"]), "--script", "Boat:42",
        "--config", str(workspace["config"]),
    )
    assert code == 1


def test_analyze_batch_directory(workspace, tmp_path, capsys):
    batch = tmp_path / "batch"
    batch.mkdir()
    (batch / "a.sb3").write_bytes(workspace["sb3"].read_bytes())
    (batch / "b.sb3").write_bytes(workspace["sb3"].read_bytes())
    code = run_cli("llm", "analyze", "--path", str(batch))
    out = capsys.readouterr().out
    assert code == 0
    assert "== a.sb3" in out
    assert "== b.sb3" in out
    assert out.count("missing-loop") == 2


def test_serve_port_conflict_exits_2(capsys):
    blocker = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    blocker.bind(("127.0.0.1", 0))
    port = blocker.getsockname()[1]
    try:
        code = run_cli("serve", "--port", str(port))
    finally:
        blocker.close()
    assert code == 2
    assert "cannot bind" in capsys.readouterr().err


def free_port() -> int:
    probe = socket.socket(socket.AF_INET, socket.SOCK_STREAM)
    probe.bind(("127.0.0.1", 0))
    port = probe.getsockname()[1]
    probe.close()
    return port


def test_serve_boots_and_terminates_cleanly(tmp_path):
    fixtures = tmp_path / "mock"
    fixtures.mkdir()
    config = tmp_path / "cfg.toml"
    config.write_text(
        f'[llm]\nprovider = "mock"\n\n[llm.mock]\nfixtures = "{fixtures}"\n', encoding="utf-8"
    )
    port = free_port()
    process = subprocess.Popen(
        [sys.executable, "-m", "blockaid.cli", "serve", "--port", str(port),
         "--config", str(config)],
        stdout=subprocess.PIPE,
        stderr=subprocess.STDOUT,
    )
    try:
        deadline = time.time() + 15
        body = None
        while time.time() < deadline:
            try:
                with urllib.request.urlopen(f"http://127.0.0.1:{port}/health", timeout=1) as resp:
                    body = json.loads(resp.read())
                    break
            except OSError:
                if process.poll() is not None:
                    raise AssertionError(process.stdout.read().decode())
                time.sleep(0.2)
        assert body is not None, "server never became healthy"
        assert body["status"] == "ok"
        assert body["provider"] == "mock"
    finally:
        process.send_signal(signal.SIGTERM)
        code = process.wait(timeout=10)
    log = process.stdout.read().decode()
    assert "Application shutdown complete" in log
    # uvicorn finishes the graceful shutdown, then re-raises the signal
    assert code in (0, -signal.SIGTERM)
