"""Chat-completion backends.

Two interchangeable backends sit behind :func:`complete`: an HTTP client
speaking the widely used ``/chat/completions`` wire format, and a
scripted backend that replays canned responses from a fixture file so the
whole pipeline can run deterministically with no network. Fixture entries
match either by a stable hash of the rendered prompt or by sequence
order.
"""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import time
from dataclasses import dataclass
from pathlib import Path

import httpx

from .errors import FixtureMissError, RequestError, TransportError

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = {429, 500, 502, 503, 504}


@dataclass(frozen=True)
class ChatMessage:
    role: str
    content: str

    def __post_init__(self):
        if self.role not in ("system", "user", "assistant"):
            raise ValueError(f"bad role {self.role!r}")
        if not self.content:
            raise ValueError("message content must be non-empty")


@dataclass
class BackendConfig:
    kind: str = "scripted"
    base_url: str = ""
    model: str = ""
    api_key_env: str = "OPENAI_API_KEY"
    timeout: float = 60.0
    max_retries: int = 3
    temperature: float = 0.0
    fixture_path: str = ""
    log_prompts: bool = False

    def __post_init__(self):
        if self.kind == "http" and not (self.base_url and self.model):
            raise ValueError("http backend requires base_url and model")
        if self.kind == "scripted" and not self.fixture_path:
            raise ValueError("scripted backend requires fixture_path")
        if self.kind not in ("http", "scripted"):
            raise ValueError(f"unknown backend kind {self.kind!r}")

    @classmethod
    def scripted(cls, fixture_path) -> "BackendConfig":
        return cls(kind="scripted", fixture_path=str(fixture_path))


def prompt_hash(messages: list[ChatMessage]) -> str:
    """Stable 16-hex-digit digest of a rendered prompt."""
    h = hashlib.sha256()
    for m in messages:
        h.update(m.role.encode())
        h.update(b"\x00")
        h.update(m.content.encode())
        h.update(b"\x00")
    return h.hexdigest()[:16]


class ScriptedBackend:
    """Replays fixture responses; see the fixture format in the README.

    Hash entries answer matching prompts any number of times; sequence
    entries are consumed in file order when no hash entry matches.
    """

    def __init__(self, fixture_path: str | Path):
        self.path = Path(fixture_path)
        entries = json.loads(self.path.read_text())
        if not isinstance(entries, list):
            raise ValueError(f"fixture file {self.path} must hold a list")
        self.by_hash = {}
        self.seq = []
        for e in entries:
            if e.get("match", "seq") == "hash":
                self.by_hash[e["key"]] = e["response"]
            else:
                self.seq.append(e["response"])
        self.cursor = 0

    def complete(self, messages: list[ChatMessage]) -> str:
        key = prompt_hash(messages)
        if key in self.by_hash:
            return self.by_hash[key]
        if self.cursor < len(self.seq):
            resp = self.seq[self.cursor]
            self.cursor += 1
            return resp
        raise FixtureMissError(
            f"no fixture response for prompt hash {key} "
            f"(sequence exhausted at {self.cursor}/{len(self.seq)}) in {self.path}",
            prompt_hash=key,
        )


class HttpBackend:
    """Minimal chat-completions client with retry/backoff on transient failures."""

    def __init__(self, config: BackendConfig, transport=None, sleep=time.sleep,
                 rng: random.Random | None = None):
        self.config = config
        self._client = httpx.Client(
            base_url=config.base_url.rstrip("/"),
            timeout=config.timeout,
            transport=transport,
        )
        self._sleep = sleep
        self._rng = rng or random.Random()

    def complete(self, messages: list[ChatMessage]) -> str:
        cfg = self.config
        headers = {}
        key = os.environ.get(cfg.api_key_env, "")
        if key:
            headers["Authorization"] = f"Bearer {key}"
        payload = {
            "model": cfg.model,
            "messages": [{"role": m.role, "content": m.content} for m in messages],
            "temperature": cfg.temperature,
        }
        if cfg.log_prompts:
            logger.debug("chat request: %s", json.dumps(payload, indent=2))
        last_error = None
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                delay = (2.0 ** (attempt - 1)) * (1.0 + 0.25 * self._rng.random())
                self._sleep(delay)
            try:
                resp = self._client.post("/chat/completions", json=payload, headers=headers)
            except httpx.HTTPError as exc:
                last_error = f"{type(exc).__name__}: {exc}"
                logger.warning("chat transport failure (attempt %d): %s", attempt + 1, last_error)
                continue
            if resp.status_code == 200:
                try:
                    return resp.json()["choices"][0]["message"]["content"]
                except (KeyError, IndexError, ValueError) as exc:
                    raise RequestError(
                        f"malformed completion response: {exc}",
                        status=200, body=resp.text[:500],
                    ) from exc
            if resp.status_code in RETRYABLE_STATUS:
                last_error = f"HTTP {resp.status_code}"
                logger.warning("chat retryable status %d (attempt %d)", resp.status_code, attempt + 1)
                continue
            raise RequestError(
                f"chat request rejected with HTTP {resp.status_code}: {resp.text[:200]}",
                status=resp.status_code, body=resp.text[:500],
            )
        raise TransportError(
            f"chat backend unreachable after {cfg.max_retries} retries (last: {last_error})"
        )


def make_backend(config: BackendConfig, transport=None, sleep=time.sleep):
    if config.kind == "scripted":
        return ScriptedBackend(config.fixture_path)
    return HttpBackend(config, transport=transport, sleep=sleep)


def complete(messages: list[ChatMessage], config: BackendConfig) -> str:
    """One-shot completion against a fresh backend built from ``config``."""
    if not messages:
        raise ValueError("messages must be non-empty")
    if messages[0].role != "system":
        raise ValueError("first message must have the system role")
    return make_backend(config).complete(messages)
