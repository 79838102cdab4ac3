"""Configuration: TOML file, environment, and explicit overrides.

Recognised keys (TOML sections map to the dotted names):

    llm.provider          openai | selfhosted | mock
    llm.base-url          chat-completions base URL (selfhosted)
    llm.model             model name sent to the backend
    llm.temperature       sampling temperature (default 0)
    llm.max-tokens        completion budget
    llm.prompt-provider   registered prompt-provider name
    llm.openai.api-key    bearer token; env LITTERBOX_LLM_OPENAI_API_KEY wins
    llm.mock.fixtures     directory of mock reply files
    server.port           HTTP port
    server.max-upload-bytes
    server.session-ttl    seconds a session survives without requests
    server.history-depth  bounded undo stack per session
    server.cors-origin    allowed browser origin
"""

from __future__ import annotations

import os
import sys
from dataclasses import dataclass, replace
from pathlib import Path
from typing import Any, Mapping

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .errors import BlockaidError
from .llm.providers import (
    LlmProvider,
    MockProvider,
    OPENAI_BASE_URL,
    OpenAiCompatibleProvider,
)

API_KEY_ENV = "LITTERBOX_LLM_OPENAI_API_KEY"

PROVIDER_OPENAI = "openai"
PROVIDER_SELFHOSTED = "selfhosted"
PROVIDER_MOCK = "mock"


class ConfigError(BlockaidError):
    pass


@dataclass(frozen=True)
class Config:
    llm_provider: str = PROVIDER_MOCK
    llm_base_url: str | None = None
    llm_model: str = "gpt-4.1"
    llm_api_key: str | None = None
    llm_mock_fixtures: str | None = None
    llm_temperature: float = 0.0
    llm_max_tokens: int = 1024
    llm_prompt_provider: str = "default"
    server_port: int = 8080
    server_max_upload_bytes: int = 8 * 1024 * 1024
    server_session_ttl: float = 3600.0
    server_history_depth: int = 16
    server_cors_origin: str | None = None


_KEY_MAP = {
    "llm.provider": "llm_provider",
    "llm.base-url": "llm_base_url",
    "llm.model": "llm_model",
    "llm.openai.api-key": "llm_api_key",
    "llm.mock.fixtures": "llm_mock_fixtures",
    "llm.temperature": "llm_temperature",
    "llm.max-tokens": "llm_max_tokens",
    "llm.prompt-provider": "llm_prompt_provider",
    "server.port": "server_port",
    "server.max-upload-bytes": "server_max_upload_bytes",
    "server.session-ttl": "server_session_ttl",
    "server.history-depth": "server_history_depth",
    "server.cors-origin": "server_cors_origin",
}


def _flatten(table: Mapping[str, Any], prefix: str = "") -> dict[str, Any]:
    flat: dict[str, Any] = {}
    for key, value in table.items():
        dotted = f"{prefix}{key}"
        if isinstance(value, Mapping):
            flat.update(_flatten(value, f"{dotted}."))
        else:
            flat[dotted] = value
    return flat


def load_config(
    path: str | Path | None = None,
    env: Mapping[str, str] | None = None,
    overrides: Mapping[str, Any] | None = None,
) -> Config:
    """Build a Config: defaults < file < environment < explicit overrides."""
    env = os.environ if env is None else env
    values: dict[str, Any] = {}
    if path is not None:
        try:
            data = tomllib.loads(Path(path).read_text("utf-8"))
        except (OSError, tomllib.TOMLDecodeError) as exc:
            raise ConfigError(f"cannot read config {path}: {exc}") from exc
        for dotted, value in _flatten(data).items():
            field = _KEY_MAP.get(dotted)
            if field is None:
                raise ConfigError(f"unknown config key {dotted!r}")
            values[field] = value
    if env.get(API_KEY_ENV):
        values["llm_api_key"] = env[API_KEY_ENV]
    if overrides:
        for dotted, value in overrides.items():
            field = _KEY_MAP.get(dotted, dotted if dotted in Config.__dataclass_fields__ else None)
            if field is None:
                raise ConfigError(f"unknown config key {dotted!r}")
            if value is not None:
                values[field] = value
    return replace(Config(), **values)


def create_provider(config: Config) -> LlmProvider:
    if config.llm_provider == PROVIDER_MOCK:
        if not config.llm_mock_fixtures:
            raise ConfigError("llm.mock.fixtures must point at a directory of mock replies")
        return MockProvider(config.llm_mock_fixtures)
    if config.llm_provider == PROVIDER_OPENAI:
        return OpenAiCompatibleProvider(
            base_url=config.llm_base_url or OPENAI_BASE_URL,
            api_key=config.llm_api_key,
            name=PROVIDER_OPENAI,
        )
    if config.llm_provider == PROVIDER_SELFHOSTED:
        if not config.llm_base_url:
            raise ConfigError("llm.base-url is required for the selfhosted provider")
        return OpenAiCompatibleProvider(
            base_url=config.llm_base_url,
            api_key=config.llm_api_key,
            name=PROVIDER_SELFHOSTED,
        )
    raise ConfigError(f"unknown llm.provider {config.llm_provider!r}")


def provider_status(config: Config) -> tuple[str, str]:
    """(status, detail) for health reporting: "ok" or "degraded"."""
    if config.llm_provider == PROVIDER_MOCK:
        if not config.llm_mock_fixtures or not Path(config.llm_mock_fixtures).is_dir():
            return "degraded", "mock fixtures directory is missing"
        return "ok", ""
    if config.llm_provider == PROVIDER_OPENAI:
        if not config.llm_api_key:
            return "degraded", "openai api key is not configured"
        return "ok", ""
    if config.llm_provider == PROVIDER_SELFHOSTED:
        if not config.llm_base_url:
            return "degraded", "selfhosted base url is not configured"
        return "ok", ""
    return "degraded", f"unknown provider {config.llm_provider!r}"


def completion_params(config: Config):
    from .llm.providers import CompletionParams

    return CompletionParams(
        model=config.llm_model,
        temperature=config.llm_temperature,
        max_tokens=config.llm_max_tokens,
    )
