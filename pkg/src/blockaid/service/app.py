"""HTTP facade for the web panel.

Endpoint schemas are documented in docs/api.md.  All bodies are UTF-8 JSON;
program archives travel base64-encoded inside JSON responses.
"""

from __future__ import annotations

import base64

from fastapi import FastAPI, Request, UploadFile
from fastapi.responses import JSONResponse
from pydantic import BaseModel

from ..config import Config, completion_params, create_provider, provider_status
from ..errors import (
    EmptyResponse,
    MalformedArchive,
    NothingUsable,
    ProviderUnavailable,
    SchemaError,
    UnknownSprite,
)
from ..lint import Issue, run_detectors
from ..llm import DroppedFragment, FixOutcome, create_prompt_provider, explain_issue, fix_issue
from ..llm.orchestrator import ask as ask_question
from ..model.ast import Program
from ..model.sb3 import load_sb3, save_sb3
from ..text.printer import PROGRAM_SCOPE, print_program
from .sessions import HistoryEmpty, SessionStore, UnknownSession


class AskBody(BaseModel):
    question: str
    scope: str = "program"
    sprite: str | None = None
    language: str = "en"


class LlmBody(BaseModel):
    language: str = "en"


def issue_to_wire(issue: Issue) -> dict:
    return {
        "id": issue.id,
        "finder": issue.finder,
        "kind": issue.kind,
        "severity": issue.severity,
        "description": issue.generic_description,
        "explanation": issue.llm_explanation,
        "location": {
            "target": issue.location.target,
            "script": issue.location.script_id,
            "block": issue.location.block_index,
        },
    }


def code_map(program: Program) -> dict[str, str]:
    return {target.name: print_program(program, target.name).text for target in program.targets()}


def outcome_to_wire(outcome: FixOutcome) -> dict:
    def dropped(entry: DroppedFragment) -> dict:
        return {
            "text": entry.text,
            "diagnostics": [
                {"line": d.line, "column": d.column, "message": d.message}
                for d in entry.diagnostics
            ],
        }

    return {
        "replaced": outcome.replaced,
        "added_scripts": outcome.added_scripts,
        "added_sprites": outcome.added_sprites,
        "dropped": [dropped(d) for d in outcome.dropped],
        "attempts_used": outcome.attempts_used,
    }


def create_app(config: Config | None = None) -> FastAPI:
    config = config or Config()
    app = FastAPI(title="blockaid", docs_url=None, redoc_url=None)
    store = SessionStore(ttl=config.server_session_ttl, history_depth=config.server_history_depth)
    app.state.config = config
    app.state.store = store

    if config.server_cors_origin:
        from fastapi.middleware.cors import CORSMiddleware

        app.add_middleware(
            CORSMiddleware,
            allow_origins=[config.server_cors_origin],
            allow_methods=["*"],
            allow_headers=["*"],
        )

    def error(status: int, code: str, message: str) -> JSONResponse:
        return JSONResponse(status_code=status, content={"error": code, "message": message})

    @app.exception_handler(MalformedArchive)
    @app.exception_handler(SchemaError)
    async def _bad_archive(request: Request, exc: Exception):
        return error(400, type(exc).__name__, str(exc))

    @app.exception_handler(UnknownSprite)
    async def _bad_scope(request: Request, exc: Exception):
        return error(400, "UnknownSprite", str(exc))

    @app.exception_handler(ValueError)
    async def _bad_request(request: Request, exc: Exception):
        return error(400, "BadRequest", str(exc))

    @app.exception_handler(UnknownSession)
    async def _unknown_session(request: Request, exc: Exception):
        return error(404, "UnknownSession", str(exc))

    @app.exception_handler(HistoryEmpty)
    async def _history_empty(request: Request, exc: Exception):
        return error(409, "HistoryEmpty", str(exc))

    @app.exception_handler(NothingUsable)
    async def _nothing_usable(request: Request, exc: NothingUsable):
        return error(409, "NothingUsable", str(exc))

    @app.exception_handler(ProviderUnavailable)
    @app.exception_handler(EmptyResponse)
    async def _provider_down(request: Request, exc: Exception):
        return error(502, type(exc).__name__, str(exc))

    def provider():
        return create_provider(config)

    def prompts():
        return create_prompt_provider(config.llm_prompt_provider)

    def session_payload(session, extra: dict | None = None) -> dict:
        payload = {
            "session_id": session.id,
            "issues": [issue_to_wire(i) for i in session.issues],
            "code": code_map(session.current),
        }
        if extra:
            payload.update(extra)
        return payload

    @app.post("/sessions", status_code=201)
    def create_session(file: UploadFile):
        data = file.file.read()
        if len(data) > config.server_max_upload_bytes:
            return error(413, "TooLarge", f"upload exceeds {config.server_max_upload_bytes} bytes")
        program = load_sb3(data)
        session = store.create(program)
        return session_payload(session)

    @app.get("/sessions/{session_id}")
    def get_session(session_id: str):
        session = store.get(session_id)
        with session.lock:
            return session_payload(session)

    @app.post("/sessions/{session_id}/issues/{issue_id}/explain")
    def explain(session_id: str, issue_id: str, body: LlmBody | None = None):
        body = body or LlmBody()
        session = store.get(session_id)
        with session.lock:
            issue = session.find_issue(issue_id)
            if issue is None:
                return error(404, "UnknownIssue", f"no issue {issue_id!r} in this session")
            updated = explain_issue(
                session.current,
                issue,
                provider(),
                prompts(),
                language=body.language,
                params=completion_params(config),
            )
            session.replace_issue(updated)
            return {"issue": issue_to_wire(updated)}

    @app.post("/sessions/{session_id}/issues/{issue_id}/fix")
    def fix(session_id: str, issue_id: str, body: LlmBody | None = None):
        body = body or LlmBody()
        session = store.get(session_id)
        with session.lock:
            issue = session.find_issue(issue_id)
            if issue is None:
                return error(404, "UnknownIssue", f"no issue {issue_id!r} in this session")
            outcome = fix_issue(
                session.current,
                issue,
                provider(),
                prompts(),
                language=body.language,
                params=completion_params(config),
            )
            store.push_history(session, session.current)
            session.current = outcome.updated
            session.issues = run_detectors(session.current)
            return session_payload(
                session,
                {
                    "program": base64.b64encode(save_sb3(session.current)).decode("ascii"),
                    "outcome": outcome_to_wire(outcome),
                },
            )

    @app.post("/sessions/{session_id}/ask")
    def ask(session_id: str, body: AskBody):
        session = store.get(session_id)
        with session.lock:
            scope = body.sprite if body.scope == "sprite" else PROGRAM_SCOPE
            if body.scope == "sprite" and not body.sprite:
                return error(400, "BadRequest", "scope 'sprite' needs a sprite name")
            answer = ask_question(
                session.current,
                body.question,
                scope,
                provider(),
                prompts(),
                language=body.language,
                params=completion_params(config),
            )
            return {"answer": answer}

    @app.post("/sessions/{session_id}/revert")
    def revert(session_id: str):
        session = store.get(session_id)
        with session.lock:
            session.current = store.pop_history(session)
            session.issues = run_detectors(session.current)
            return session_payload(
                session,
                {"program": base64.b64encode(save_sb3(session.current)).decode("ascii")},
            )

    @app.get("/health")
    def health():
        status, detail = provider_status(config)
        payload = {"status": status, "provider": config.llm_provider, "model": config.llm_model}
        if detail:
            payload["detail"] = detail
        return payload

    return app
