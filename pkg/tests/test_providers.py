from __future__ import annotations

import json
import threading
from http.server import BaseHTTPRequestHandler, HTTPServer

import pytest

from blockaid.errors import ProviderUnavailable
from blockaid.llm.providers import CompletionParams, OpenAiCompatibleProvider


class _StubHandler(BaseHTTPRequestHandler):
    payload: dict = {}
    status = 200
    requests: list[dict] = []

    def do_POST(self):
        length = int(self.headers.get("Content-Length", 0))
        body = json.loads(self.rfile.read(length))
        type(self).requests.append({
            "path": self.path,
            "body": body,
            "auth": self.headers.get("Authorization"),
        })
        data = json.dumps(type(self).payload).encode()
        self.send_response(type(self).status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(data)))
        self.end_headers()
        self.wfile.write(data)

    def log_message(self, *args):
        pass


@pytest.fixture
def stub_server():
    server = HTTPServer(("127.0.0.1", 0), _StubHandler)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    _StubHandler.requests = []
    _StubHandler.status = 200
    _StubHandler.payload = {"choices": [{"message": {"content": "stubbed reply"}}]}
    yield f"http://127.0.0.1:{server.server_address[1]}/v1"
    server.shutdown()


def test_completion_request_shape(stub_server):
    provider = OpenAiCompatibleProvider(base_url=stub_server, api_key="sk-test")
    params = CompletionParams(model="gpt-4.1", temperature=0.0, max_tokens=256)
    reply = provider.complete("hello blocks", params)
    assert reply == "stubbed reply"
    request = _StubHandler.requests[0]
    assert request["path"] == "/v1/chat/completions"
    assert request["auth"] == "Bearer sk-test"
    assert request["body"]["model"] == "gpt-4.1"
    assert request["body"]["temperature"] == 0.0
    assert request["body"]["max_tokens"] == 256
    assert request["body"]["messages"] == [{"role": "user", "content": "hello blocks"}]


def test_selfhosted_goes_without_auth_header(stub_server):
    provider = OpenAiCompatibleProvider(base_url=stub_server, api_key=None, name="selfhosted")
    provider.complete("x", CompletionParams())
    assert _StubHandler.requests[0]["auth"] is None


def test_http_error_is_provider_unavailable(stub_server):
    _StubHandler.status = 500
    provider = OpenAiCompatibleProvider(base_url=stub_server)
    with pytest.raises(ProviderUnavailable):
        provider.complete("x", CompletionParams())


def test_malformed_body_is_provider_unavailable(stub_server):
    _StubHandler.payload = {"unexpected": True}
    provider = OpenAiCompatibleProvider(base_url=stub_server)
    with pytest.raises(ProviderUnavailable):
        provider.complete("x", CompletionParams())


def test_connection_refused_is_provider_unavailable():
    provider = OpenAiCompatibleProvider(base_url="http://127.0.0.1:9", timeout=0.5)
    with pytest.raises(ProviderUnavailable):
        provider.complete("x", CompletionParams())
