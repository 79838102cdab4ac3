from __future__ import annotations

import base64
import time
from pathlib import Path

import pytest
from fastapi.testclient import TestClient

from blockaid.config import Config
from blockaid.lint import run_detectors
from blockaid.llm.prompts import DefaultPromptProvider
from blockaid.llm.providers import seed_mock
from blockaid.llm.tasks import ExplainTask, FixTask
from blockaid.model.diff import structural_diff
from blockaid.model.sb3 import load_sb3, save_sb3
from blockaid.service import create_app
from blockaid.text.printer import print_program

from .conftest import FIXED_BOAT_SCRIPT, make_boatrace

EXPLAIN_TEXT = (Path(__file__).parent / "fixtures" / "explain_response.txt").read_text("utf-8")


@pytest.fixture
def fixtures_dir(tmp_path):
    return tmp_path / "mock"


@pytest.fixture
def client(fixtures_dir):
    fixtures_dir.mkdir(exist_ok=True)
    config = Config(llm_mock_fixtures=str(fixtures_dir), server_max_upload_bytes=1 << 20)
    return TestClient(create_app(config))


def upload(client, program) -> dict:
    response = client.post(
        "/sessions", files={"file": ("program.sb3", save_sb3(program), "application/zip")}
    )
    assert response.status_code == 201, response.text
    return response.json()


def seed_task_response(fixtures_dir, program, issue_or_task, response: str) -> None:
    """Seed the mock with the exact prompt the service will render."""
    prompts = DefaultPromptProvider()
    if isinstance(issue_or_task, ExplainTask) or isinstance(issue_or_task, FixTask):
        task = issue_or_task
        context = print_program(program, task.issue.location.target)
        seed_mock(fixtures_dir, prompts.render(task, context, task.issue), response)
    else:
        raise TypeError


def test_upload_reports_missing_loop(client, boatrace):
    body = upload(client, boatrace)
    assert body["session_id"]
    issues = body["issues"]
    assert [i["finder"] for i in issues] == ["missing-loop"]
    assert issues[0]["location"] == {"target": "Boat", "script": "Boat:1", "block": 1}
    assert "when green flag clicked" in body["code"]["Boat"]


def test_upload_empty_project(client):
    from blockaid.model.ast import new_program

    body = upload(client, new_program())
    assert body["issues"] == []


def test_upload_rejects_non_archive(client):
    response = client.post("/sessions", files={"file": ("x.txt", b"hello", "text/plain")})
    assert response.status_code == 400
    assert response.json()["error"] == "MalformedArchive"


def test_upload_rejects_oversize(fixtures_dir, boatrace):
    fixtures_dir.mkdir(exist_ok=True)
    config = Config(llm_mock_fixtures=str(fixtures_dir), server_max_upload_bytes=64)
    client = TestClient(create_app(config))
    response = client.post(
        "/sessions", files={"file": ("p.sb3", save_sb3(boatrace), "application/zip")}
    )
    assert response.status_code == 413


def test_explain_endpoint_appends(client, fixtures_dir, boatrace):
    body = upload(client, boatrace)
    issue_id = body["issues"][0]["id"]
    issue = run_detectors(boatrace)[0]
    seed_task_response(fixtures_dir, boatrace, ExplainTask(issue=issue), EXPLAIN_TEXT)

    response = client.post(f"/sessions/{body['session_id']}/issues/{issue_id}/explain")
    assert response.status_code == 200, response.text
    updated = response.json()["issue"]
    assert updated["description"] == issue.generic_description
    assert "Press the green flag" in updated["explanation"]

    # cached issue carries the explanation afterwards
    state = client.get(f"/sessions/{body['session_id']}").json()
    assert "Press the green flag" in state["issues"][0]["explanation"]


def test_fix_replaces_and_recomputes(client, fixtures_dir, boatrace):
    body = upload(client, boatrace)
    issue = run_detectors(boatrace)[0]
    seed_task_response(fixtures_dir, boatrace, FixTask(issue=issue), FIXED_BOAT_SCRIPT)

    response = client.post(f"/sessions/{body['session_id']}/issues/{issue.id}/fix")
    assert response.status_code == 200, response.text
    payload = response.json()
    assert payload["outcome"]["replaced"] == ["Boat:1"]
    assert all(i["finder"] != "missing-loop" for i in payload["issues"])
    reloaded = load_sb3(base64.b64decode(payload["program"]))
    assert all(i.finder != "missing-loop" for i in run_detectors(reloaded))
    assert "forever" in payload["code"]["Boat"]


def test_fix_with_garbage_is_409_and_state_unchanged(client, fixtures_dir, boatrace):
    body = upload(client, boatrace)
    issue_id = body["issues"][0]["id"]
    (fixtures_dir / "default.txt").write_text("no code here ???", encoding="utf-8")

    response = client.post(f"/sessions/{body['session_id']}/issues/{issue_id}/fix")
    assert response.status_code == 409
    assert response.json()["error"] == "NothingUsable"
    state = client.get(f"/sessions/{body['session_id']}").json()
    assert [i["finder"] for i in state["issues"]] == ["missing-loop"]

    revert = client.post(f"/sessions/{body['session_id']}/revert")
    assert revert.status_code == 409  # nothing was applied


def test_unknown_issue_and_session_are_404(client, boatrace):
    body = upload(client, boatrace)
    assert client.post(f"/sessions/{body['session_id']}/issues/nope/explain").status_code == 404
    assert client.post("/sessions/missing/issues/x/fix").status_code == 404
    assert client.get("/sessions/missing").status_code == 404


def test_ask_endpoint(client, fixtures_dir, boatrace):
    body = upload(client, boatrace)
    (fixtures_dir / "default.txt").write_text("The boat moves backwards.", encoding="utf-8")
    response = client.post(
        f"/sessions/{body['session_id']}/ask",
        json={"question": "What happens on contact?", "scope": "sprite", "sprite": "Boat"},
    )
    assert response.status_code == 200
    assert response.json()["answer"] == "The boat moves backwards."


def test_ask_empty_question_is_400(client, boatrace):
    body = upload(client, boatrace)
    response = client.post(f"/sessions/{body['session_id']}/ask", json={"question": "  "})
    assert response.status_code == 400


def test_ask_unknown_sprite_is_400(client, boatrace):
    body = upload(client, boatrace)
    response = client.post(
        f"/sessions/{body['session_id']}/ask",
        json={"question": "Why?", "scope": "sprite", "sprite": "Nessie"},
    )
    assert response.status_code == 400


def test_fix_then_revert_restores_original(client, fixtures_dir, boatrace):
    body = upload(client, boatrace)
    issue = run_detectors(boatrace)[0]
    seed_task_response(fixtures_dir, boatrace, FixTask(issue=issue), FIXED_BOAT_SCRIPT)
    assert client.post(f"/sessions/{body['session_id']}/issues/{issue.id}/fix").status_code == 200

    response = client.post(f"/sessions/{body['session_id']}/revert")
    assert response.status_code == 200
    restored = load_sb3(base64.b64decode(response.json()["program"]))
    assert structural_diff(boatrace, restored) == []
    assert [i["finder"] for i in response.json()["issues"]] == ["missing-loop"]


def test_double_fix_double_revert(client, fixtures_dir, boatrace):
    body = upload(client, boatrace)
    sid = body["session_id"]
    issue = run_detectors(boatrace)[0]
    seed_task_response(fixtures_dir, boatrace, FixTask(issue=issue), FIXED_BOAT_SCRIPT)
    assert client.post(f"/sessions/{sid}/issues/{issue.id}/fix").status_code == 200

    fixed_program = make_boatrace(fixed=True)
    perfume = run_detectors(fixed_program)[0]
    completion = (
        "// script-id: Boat:2\nwhen this sprite clicked\nsay [hi]"
    )
    seed_task_response(fixtures_dir, fixed_program, FixTask(issue=perfume), completion)
    assert client.post(f"/sessions/{sid}/issues/{perfume.id}/fix").status_code == 200

    assert client.post(f"/sessions/{sid}/revert").status_code == 200
    final = client.post(f"/sessions/{sid}/revert")
    assert final.status_code == 200
    restored = load_sb3(base64.b64decode(final.json()["program"]))
    assert structural_diff(boatrace, restored) == []


def test_sessions_are_isolated(client, fixtures_dir, boatrace):
    a = upload(client, boatrace)
    b = upload(client, boatrace)
    issue = run_detectors(boatrace)[0]
    seed_task_response(fixtures_dir, boatrace, FixTask(issue=issue), FIXED_BOAT_SCRIPT)

    assert client.post(f"/sessions/{a['session_id']}/issues/{issue.id}/fix").status_code == 200
    b_state = client.get(f"/sessions/{b['session_id']}").json()
    assert [i["finder"] for i in b_state["issues"]] == ["missing-loop"]
    assert "forever" not in b_state["code"]["Boat"]
    assert client.post(f"/sessions/{b['session_id']}/revert").status_code == 409


def test_health_ok_and_schema_stable(client, boatrace):
    first = client.get("/health").json()
    assert first["status"] == "ok"
    assert first["provider"] == "mock"
    assert "model" in first
    upload(client, boatrace)
    assert set(client.get("/health").json()) == set(first)


def test_health_degraded_without_api_key():
    client = TestClient(create_app(Config(llm_provider="openai", llm_api_key=None)))
    body = client.get("/health").json()
    assert body["status"] == "degraded"
    assert body["provider"] == "openai"


def test_session_ttl_eviction(fixtures_dir, boatrace):
    fixtures_dir.mkdir(exist_ok=True)
    config = Config(llm_mock_fixtures=str(fixtures_dir), server_session_ttl=0.05)
    client = TestClient(create_app(config))
    body = upload(client, boatrace)
    time.sleep(0.1)
    assert client.get(f"/sessions/{body['session_id']}").status_code == 404
