"""Chat-completion transports: an HTTP client and a scripted mock.

Both expose ``complete(messages, column) -> str``. The column name is a
routing hint for the mock; the HTTP transport never sends it.
"""

from __future__ import annotations

import json
import logging
import os
import threading
import time
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Mapping, Protocol, Sequence, Union

import requests

from pdd.errors import ConfigError, TransportError
from pdd.llm.parse import render_verdict

log = logging.getLogger(__name__)

DEFAULT_API_KEY_ENV = "PDD_API_KEY"
_RETRYABLE_STATUS = frozenset({408, 409, 425, 429, 500, 502, 503, 504})


@dataclass(frozen=True)
class TransportConfig:
    endpoint_url: str = ""
    model_id: str = "gpt-4o"
    api_key_source: str = DEFAULT_API_KEY_ENV
    temperature: float = 0.0
    seed: int | None = None
    timeout: float = 60.0
    max_retries: int = 3
    max_inflight: int = 4
    backoff_base: float = 1.0

    def __post_init__(self) -> None:
        if self.max_retries < 0:
            raise ConfigError("max_retries must be >= 0")
        if self.max_inflight < 1:
            raise ConfigError("max_inflight must be >= 1")
        if self.timeout <= 0:
            raise ConfigError("timeout must be > 0")
        if self.backoff_base < 0:
            raise ConfigError("backoff_base must be >= 0")

    def to_public_dict(self) -> dict[str, Any]:
        # Only the variable *name* is recorded, never its value.
        return asdict(self)


class Transport(Protocol):
    config: TransportConfig

    def complete(self, messages: Sequence[Mapping[str, str]], column: str) -> str: ...


class HttpTransport:
    """POSTs ``{model, messages, temperature, seed?}`` to a chat endpoint.

    At most ``max_inflight`` requests are open at once. Connection
    failures, timeouts, 429 and 5xx responses are retried with exponential
    backoff; other HTTP errors fail immediately.
    """

    def __init__(self, config: TransportConfig) -> None:
        if not config.endpoint_url:
            raise ConfigError("HTTP transport needs an endpoint URL")
        self.config = config
        self._slots = threading.BoundedSemaphore(config.max_inflight)
        self._lock = threading.Lock()
        self.request_count = 0

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        key = os.environ.get(self.config.api_key_source)
        if key:
            headers["Authorization"] = f"Bearer {key}"
        return headers

    def payload(self, messages: Sequence[Mapping[str, str]]) -> dict[str, Any]:
        body: dict[str, Any] = {
            "model": self.config.model_id,
            "messages": [{"role": m["role"], "content": m["content"]} for m in messages],
            "temperature": self.config.temperature,
        }
        if self.config.seed is not None:
            body["seed"] = self.config.seed
        return body

    def complete(self, messages: Sequence[Mapping[str, str]], column: str = "") -> str:
        body = self.payload(messages)
        cfg = self.config
        last_error = "no attempt made"
        for attempt in range(cfg.max_retries + 1):
            if attempt:
                time.sleep(cfg.backoff_base * 2 ** (attempt - 1))
            with self._slots:
                with self._lock:
                    self.request_count += 1
                try:
                    resp = requests.post(
                        cfg.endpoint_url, json=body, headers=self._headers(), timeout=cfg.timeout
                    )
                except (requests.ConnectionError, requests.Timeout) as exc:
                    last_error = f"{type(exc).__name__}: {exc}"
                    log.warning("request for %r failed (attempt %d): %s", column, attempt + 1, exc)
                    continue
            if resp.status_code in _RETRYABLE_STATUS:
                last_error = f"HTTP {resp.status_code}"
                log.warning("HTTP %d for %r (attempt %d)", resp.status_code, column, attempt + 1)
                continue
            if resp.status_code >= 400:
                raise TransportError(f"HTTP {resp.status_code}: {resp.text[:500]}")
            return _reply_text(resp)
        raise TransportError(f"giving up after {cfg.max_retries + 1} attempts: {last_error}")


def _reply_text(resp: requests.Response) -> str:
    try:
        content = resp.json()["choices"][0]["message"]["content"]
    except (ValueError, KeyError, IndexError, TypeError) as exc:
        raise TransportError(f"unexpected response body: {resp.text[:200]!r}") from exc
    if not isinstance(content, str):
        raise TransportError("reply content is not text")
    return content


ScriptEntry = Union[str, bool, Sequence[Union[str, bool]]]


class MockTransport:
    """Offline transport answering from a ``{column: reply}`` script.

    A boolean entry is rendered as the canonical dictionary answer. A list
    entry is replayed one element per request for that column, the last
    element repeating once the list is exhausted.
    """

    def __init__(self, script: Mapping[str, ScriptEntry], config: TransportConfig | None = None):
        self.config = config or TransportConfig(endpoint_url="mock://")
        self._script = {name: _as_replies(name, entry) for name, entry in script.items()}
        self._cursor: dict[str, int] = {}
        self._lock = threading.Lock()
        self.calls: list[tuple[str, list[dict[str, str]]]] = []

    @classmethod
    def from_file(cls, path: str | Path, config: TransportConfig | None = None) -> "MockTransport":
        try:
            data = json.loads(Path(path).read_text(encoding="utf-8"))
        except (OSError, json.JSONDecodeError) as exc:
            raise ConfigError(f"cannot read mock script {path}: {exc}") from exc
        if not isinstance(data, dict):
            raise ConfigError(f"mock script {path} must be a JSON object")
        return cls(data, config)

    @property
    def request_count(self) -> int:
        return len(self.calls)

    def complete(self, messages: Sequence[Mapping[str, str]], column: str = "") -> str:
        with self._lock:
            self.calls.append((column, [dict(m) for m in messages]))
            replies = self._script.get(column)
            if replies is None:
                raise TransportError(f"mock script has no entry for column {column!r}")
            i = self._cursor.get(column, 0)
            self._cursor[column] = i + 1
        return replies[min(i, len(replies) - 1)]


def _as_replies(name: str, entry: ScriptEntry) -> list[str]:
    items = list(entry) if isinstance(entry, (list, tuple)) else [entry]
    if not items:
        raise ConfigError(f"empty mock entry for {name!r}")
    out = []
    for item in items:
        if isinstance(item, bool):
            out.append(render_verdict(name, item))
        elif isinstance(item, str):
            out.append(item)
        else:
            raise ConfigError(f"mock entry for {name!r} must be text or boolean")
    return out
