import json

import httpx
import pytest

from deskprim.errors import FixtureMissError, RequestError, TransportError
from deskprim.llm import (
    BackendConfig,
    ChatMessage,
    HttpBackend,
    ScriptedBackend,
    complete,
    prompt_hash,
)

MESSAGES = [
    ChatMessage("system", "you are a planner"),
    ChatMessage("user", "what next?"),
]


class TestScripted:
    def write_fixture(self, tmp_path, entries):
        p = tmp_path / "fixture.json"
        p.write_text(json.dumps(entries))
        return p

    def test_hash_match(self, tmp_path):
        key = prompt_hash(MESSAGES)
        p = self.write_fixture(tmp_path, [
            {"match": "hash", "key": key, "response": "<answer>REACH(sponge)</answer>"},
        ])
        backend = ScriptedBackend(p)
        assert backend.complete(MESSAGES) == "<answer>REACH(sponge)</answer>"
        # hash entries are reusable
        assert backend.complete(MESSAGES) == "<answer>REACH(sponge)</answer>"

    def test_sequence_order(self, tmp_path):
        p = self.write_fixture(tmp_path, [
            {"match": "seq", "response": "first"},
            {"match": "seq", "response": "second"},
        ])
        backend = ScriptedBackend(p)
        assert backend.complete(MESSAGES) == "first"
        assert backend.complete(MESSAGES) == "second"

    def test_miss_names_hash(self, tmp_path):
        p = self.write_fixture(tmp_path, [])
        backend = ScriptedBackend(p)
        with pytest.raises(FixtureMissError) as err:
            backend.complete(MESSAGES)
        assert err.value.prompt_hash == prompt_hash(MESSAGES)

    def test_complete_requires_system_first(self, tmp_path):
        p = self.write_fixture(tmp_path, [{"match": "seq", "response": "x"}])
        cfg = BackendConfig.scripted(p)
        with pytest.raises(ValueError):
            complete([ChatMessage("user", "hi")], cfg)
        assert complete(MESSAGES, cfg) == "x"


def http_config():
    return BackendConfig(kind="http", base_url="http://llm.test/v1", model="m1",
                         max_retries=3)


def ok_response(text):
    return httpx.Response(200, json={"choices": [{"message": {"content": text}}]})


class TestHttp:
    def backend(self, handler, config=None):
        sleeps = []
        b = HttpBackend(config or http_config(), transport=httpx.MockTransport(handler),
                        sleep=sleeps.append)
        return b, sleeps

    def test_two_503_then_success(self):
        calls = []

        def handler(request):
            calls.append(request)
            if len(calls) <= 2:
                return httpx.Response(503, text="overloaded")
            return ok_response("all good")

        backend, sleeps = self.backend(handler)
        assert backend.complete(MESSAGES) == "all good"
        assert len(calls) == 3
        assert len(sleeps) == 2
        assert sleeps[0] < sleeps[1]  # exponential backoff

    def test_429_is_retried(self):
        calls = []

        def handler(request):
            calls.append(request)
            return httpx.Response(429) if len(calls) == 1 else ok_response("ok")

        backend, _ = self.backend(handler)
        assert backend.complete(MESSAGES) == "ok"

    def test_4xx_raises_request_error_with_body(self):
        def handler(request):
            return httpx.Response(400, text="bad model name")

        backend, _ = self.backend(handler)
        with pytest.raises(RequestError, match="bad model name"):
            backend.complete(MESSAGES)

    def test_exhausted_retries(self):
        def handler(request):
            return httpx.Response(503)

        backend, sleeps = self.backend(handler)
        with pytest.raises(TransportError):
            backend.complete(MESSAGES)
        assert len(sleeps) == 3

    def test_payload_shape(self):
        seen = {}

        def handler(request):
            seen.update(json.loads(request.content))
            return ok_response("fine")

        backend, _ = self.backend(handler)
        backend.complete(MESSAGES)
        assert seen["model"] == "m1"
        assert seen["temperature"] == 0.0
        assert seen["messages"][0] == {"role": "system", "content": "you are a planner"}

    def test_api_key_from_env(self, monkeypatch):
        seen = {}

        def handler(request):
            seen["auth"] = request.headers.get("authorization")
            return ok_response("fine")

        monkeypatch.setenv("TEST_LLM_KEY", "sk-secret")
        cfg = BackendConfig(kind="http", base_url="http://llm.test/v1", model="m1",
                            api_key_env="TEST_LLM_KEY")
        backend, _ = self.backend(handler, cfg)
        backend.complete(MESSAGES)
        assert seen["auth"] == "Bearer sk-secret"


class TestValidation:
    def test_http_requires_base_url(self):
        with pytest.raises(ValueError):
            BackendConfig(kind="http", model="m1")

    def test_scripted_requires_fixture(self):
        with pytest.raises(ValueError):
            BackendConfig(kind="scripted", fixture_path="")

    def test_empty_content_rejected(self):
        with pytest.raises(ValueError):
            ChatMessage("user", "")
