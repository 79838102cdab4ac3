"""HTTP service exposing sessions, issues, and the model-backed tasks."""

from .app import create_app
from .sessions import HistoryEmpty, Session, SessionStore, UnknownSession

__all__ = ["HistoryEmpty", "Session", "SessionStore", "UnknownSession", "create_app"]
