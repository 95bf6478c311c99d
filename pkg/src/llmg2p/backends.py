"""Text-completion backends: a live HTTP client, a replay fixture and a transcript recorder."""

from __future__ import annotations

import hashlib
import json
import logging
import os
import random
import threading
import time
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Protocol, runtime_checkable

import requests

logger = logging.getLogger(__name__)

RETRYABLE_STATUS = frozenset({408, 409, 429, 500, 502, 503, 504})
DEFAULT_API_KEY_ENV = "LLMG2P_API_KEY"


class BackendError(RuntimeError):
    def __init__(self, status: int | None, message: str = ""):
        self.status = status
        super().__init__(f"backend error (status {status}): {message}" if message else f"backend error (status {status})")


class ReplayMiss(KeyError):
    def __init__(self, prompt_hash: str):
        self.prompt_hash = prompt_hash
        super().__init__(f"no recorded response for prompt sha256={prompt_hash}")


def prompt_sha256(prompt: str) -> str:
    return hashlib.sha256(prompt.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DecodeParams:
    temperature: float = 0.0
    max_tokens: int = 512


@runtime_checkable
class LlmBackend(Protocol):
    name: str
    model: str

    def complete(self, prompt: str, params: DecodeParams | None = None) -> str: ...


def identity(backend: LlmBackend) -> dict[str, str]:
    return {"backend": backend.name, "model": backend.model}


class ReplayBackend:
    """Answers prompts from recorded ``{prompt_sha256, response}`` pairs.

    Unknown prompts raise :class:`ReplayMiss`; nothing is ever guessed.
    """

    name = "replay"

    def __init__(self, responses: Mapping[str, str], model: str = "fixture"):
        self._responses = dict(responses)
        self.model = model

    @classmethod
    def from_jsonl(cls, path: str | Path, model: str | None = None) -> ReplayBackend:
        responses = {}
        recorded_model = None
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                rec = json.loads(line)
                try:
                    key = rec.get("prompt_sha256") or prompt_sha256(rec["prompt"])
                    responses[key] = rec["response"]
                except KeyError as exc:
                    raise ValueError(f"{path}:{lineno}: record lacks {exc}") from None
                recorded_model = recorded_model or rec.get("model")
        return cls(responses, model=model or recorded_model or Path(path).stem)

    @classmethod
    def from_prompts(cls, pairs: Mapping[str, str], model: str = "fixture") -> ReplayBackend:
        return cls({prompt_sha256(p): r for p, r in pairs.items()}, model=model)

    def complete(self, prompt: str, params: DecodeParams | None = None) -> str:
        key = prompt_sha256(prompt)
        try:
            return self._responses[key]
        except KeyError:
            raise ReplayMiss(key) from None

    def __len__(self) -> int:
        return len(self._responses)


class HttpBackend:
    """OpenAI-compatible chat-completions client with retry and a request-rate cap.

    The API key is read from the environment variable named by ``api_key_env``.
    """

    name = "http"

    def __init__(
        self,
        endpoint: str,
        model: str,
        api_key_env: str = DEFAULT_API_KEY_ENV,
        timeout: float = 60.0,
        max_retries: int = 3,
        backoff_base: float = 1.0,
        requests_per_minute: float | None = None,
        session: requests.Session | None = None,
        sleep=time.sleep,
    ):
        self.endpoint = endpoint
        self.model = model
        self.api_key_env = api_key_env
        self.timeout = timeout
        self.max_retries = max_retries
        self.backoff_base = backoff_base
        self._session = session or requests.Session()
        self._sleep = sleep
        self._min_interval = 60.0 / requests_per_minute if requests_per_minute else 0.0
        self._lock = threading.Lock()
        self._next_slot = 0.0

    def _wait_for_slot(self) -> None:
        if not self._min_interval:
            return
        with self._lock:
            now = time.monotonic()
            wait = self._next_slot - now
            self._next_slot = max(now, self._next_slot) + self._min_interval
        if wait > 0:
            self._sleep(wait)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.api_key_env)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def complete(self, prompt: str, params: DecodeParams | None = None) -> str:
        params = params or DecodeParams()
        payload = {
            "model": self.model,
            "messages": [{"role": "user", "content": prompt}],
            "temperature": params.temperature,
            "max_tokens": params.max_tokens,
        }
        for attempt in range(self.max_retries + 1):
            self._wait_for_slot()
            try:
                resp = self._session.post(
                    self.endpoint, json=payload, headers=self._headers(), timeout=self.timeout
                )
            except (requests.ConnectionError, requests.Timeout) as exc:
                if attempt == self.max_retries:
                    raise BackendError(None, str(exc)) from exc
                self._backoff(attempt)
                continue
            if resp.status_code == 200:
                return _extract_text(resp.json())
            if resp.status_code not in RETRYABLE_STATUS or attempt == self.max_retries:
                raise BackendError(resp.status_code, resp.text[:200])
            logger.info("HTTP %d from %s, retrying", resp.status_code, self.endpoint)
            self._backoff(attempt)
        raise AssertionError("unreachable")

    def _backoff(self, attempt: int) -> None:
        delay = self.backoff_base * 2**attempt
        self._sleep(delay + random.uniform(0, delay / 2))


def _extract_text(body: dict) -> str:
    try:
        choice = body["choices"][0]
    except (KeyError, IndexError, TypeError):
        raise BackendError(200, f"unexpected response body: {str(body)[:200]}") from None
    if isinstance(choice.get("message"), dict):
        return choice["message"].get("content") or ""
    return choice.get("text") or ""


class TranscriptBackend:
    """Wraps a backend and appends every exchange to a JSONL transcript.

    Transcript records are valid replay fixtures.
    """

    def __init__(self, inner: LlmBackend, path: str | Path):
        self.inner = inner
        self.path = Path(path)
        self._lock = threading.Lock()

    @property
    def name(self) -> str:
        return self.inner.name

    @property
    def model(self) -> str:
        return self.inner.model

    def complete(self, prompt: str, params: DecodeParams | None = None) -> str:
        response = self.inner.complete(prompt, params)
        record = {
            "prompt_sha256": prompt_sha256(prompt),
            "prompt": prompt,
            "response": response,
            "backend": self.inner.name,
            "model": self.inner.model,
        }
        with self._lock, open(self.path, "a", encoding="utf-8") as f:
            f.write(json.dumps(record, ensure_ascii=False) + "\n")
        return response
