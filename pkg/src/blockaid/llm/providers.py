"""Completion backends: one OpenAI-compatible HTTP client and a replaying mock.

Hosted and self-hosted backends speak the same chat-completions schema and
differ only in base URL and authentication, so a single client class covers
both.  The mock replays fixture files keyed by a hash of the rendered prompt
plus a per-prompt call counter, which makes orchestration tests fully
deterministic without any network.
"""

from __future__ import annotations

import hashlib
from abc import ABC, abstractmethod
from dataclasses import dataclass
from pathlib import Path

import requests

from ..errors import ProviderUnavailable

OPENAI_BASE_URL = "https://api.openai.com/v1"


@dataclass(frozen=True)
class CompletionParams:
    model: str = "gpt-4.1"
    temperature: float = 0.0
    max_tokens: int = 1024


class LlmProvider(ABC):
    """Stateless completion endpoint: prompt in, text out."""

    name: str = "llm"

    @abstractmethod
    def complete(self, prompt: str, params: CompletionParams) -> str:
        raise NotImplementedError


class OpenAiCompatibleProvider(LlmProvider):
    """Chat-completions client for hosted and self-hosted backends."""

    def __init__(
        self,
        base_url: str = OPENAI_BASE_URL,
        api_key: str | None = None,
        name: str = "openai",
        timeout: float = 60.0,
    ) -> None:
        self.base_url = base_url.rstrip("/")
        self.api_key = api_key
        self.name = name
        self.timeout = timeout

    def complete(self, prompt: str, params: CompletionParams) -> str:
        headers = {"Content-Type": "application/json"}
        if self.api_key:
            headers["Authorization"] = f"Bearer {self.api_key}"
        payload = {
            "model": params.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        try:
            response = requests.post(
                f"{self.base_url}/chat/completions",
                json=payload,
                headers=headers,
                timeout=self.timeout,
            )
        except requests.RequestException as exc:
            raise ProviderUnavailable(f"{self.name}: {exc}") from exc
        if response.status_code != 200:
            raise ProviderUnavailable(
                f"{self.name}: HTTP {response.status_code}: {response.text[:200]}"
            )
        try:
            return response.json()["choices"][0]["message"]["content"] or ""
        except (KeyError, IndexError, TypeError, ValueError) as exc:
            raise ProviderUnavailable(f"{self.name}: malformed completion response") from exc


def prompt_digest(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()[:12]


class MockProvider(LlmProvider):
    """Replays fixture files from a directory.

    Lookup order for the n-th call with a given prompt (0-based):
    ``<digest>_<n>.txt``, ``<digest>.txt``, ``default_<n>.txt``,
    ``default.txt``.  Raises ProviderUnavailable when nothing matches.
    """

    name = "mock"

    def __init__(self, fixtures_dir: str | Path) -> None:
        self.fixtures_dir = Path(fixtures_dir)
        self._calls: dict[str, int] = {}

    def complete(self, prompt: str, params: CompletionParams) -> str:
        digest = prompt_digest(prompt)
        n = self._calls.get(digest, 0)
        self._calls[digest] = n + 1
        for candidate in (f"{digest}_{n}.txt", f"{digest}.txt", f"default_{n}.txt", "default.txt"):
            path = self.fixtures_dir / candidate
            if path.is_file():
                return path.read_text("utf-8")
        raise ProviderUnavailable(
            f"mock: no fixture for prompt digest {digest} (call {n}) in {self.fixtures_dir}"
        )


def seed_mock(fixtures_dir: str | Path, prompt: str, response: str, call: int | None = None) -> Path:
    """Write a fixture the mock will replay for ``prompt``; returns its path."""
    directory = Path(fixtures_dir)
    directory.mkdir(parents=True, exist_ok=True)
    digest = prompt_digest(prompt)
    name = f"{digest}.txt" if call is None else f"{digest}_{call}.txt"
    path = directory / name
    path.write_text(response, encoding="utf-8")
    return path
