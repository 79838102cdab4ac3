"""In-memory session store with TTL eviction and bounded undo history."""

from __future__ import annotations

import secrets
import threading
import time
from dataclasses import dataclass, field

from ..errors import BlockaidError
from ..lint import Issue, run_detectors
from ..model.ast import Program


class UnknownSession(BlockaidError):
    pass


class HistoryEmpty(BlockaidError):
    pass


@dataclass
class Session:
    id: str
    current: Program
    issues: list[Issue]
    history: list[Program] = field(default_factory=list)
    expires_at: float = 0.0
    lock: threading.Lock = field(default_factory=threading.Lock)

    def find_issue(self, issue_id: str) -> Issue | None:
        for issue in self.issues:
            if issue.id == issue_id:
                return issue
        return None

    def replace_issue(self, updated: Issue) -> None:
        self.issues = [updated if i.id == updated.id else i for i in self.issues]


class SessionStore:
    """Requests within one session serialize on its lock; sessions are
    otherwise independent, so handlers for different sessions run in
    parallel."""

    def __init__(self, ttl: float = 3600.0, history_depth: int = 16) -> None:
        self.ttl = ttl
        self.history_depth = history_depth
        self._sessions: dict[str, Session] = {}
        self._guard = threading.Lock()

    def create(self, program: Program) -> Session:
        session = Session(
            id=secrets.token_urlsafe(16),
            current=program,
            issues=run_detectors(program),
            expires_at=time.monotonic() + self.ttl,
        )
        with self._guard:
            self._purge()
            self._sessions[session.id] = session
        return session

    def get(self, session_id: str) -> Session:
        with self._guard:
            self._purge()
            session = self._sessions.get(session_id)
            if session is None:
                raise UnknownSession(f"no session {session_id!r}")
            session.expires_at = time.monotonic() + self.ttl
            return session

    def push_history(self, session: Session, previous: Program) -> None:
        session.history.append(previous)
        if len(session.history) > self.history_depth:
            session.history.pop(0)

    def pop_history(self, session: Session) -> Program:
        if not session.history:
            raise HistoryEmpty("nothing to revert")
        return session.history.pop()

    def _purge(self) -> None:
        now = time.monotonic()
        for sid in [s for s, sess in self._sessions.items() if sess.expires_at < now]:
            del self._sessions[sid]
