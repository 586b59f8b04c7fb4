"""Provider backends: JSON chat-over-HTTP and a deterministic mock."""

import hashlib
import json
import os
import time

import httpx

from secrev.errors import AuthError, ProviderError, ProviderTimeout, RateLimited
from secrev.gateway.config import ProviderConfig


def prompt_hash(prompts: list[str]) -> str:
    """Deterministic hash over the rendered turn texts."""
    material = json.dumps(prompts, ensure_ascii=False)
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


def approx_token_count(text: str) -> int:
    return len(text.split())


def _walk(payload: object, path: tuple) -> object:
    value = payload
    for step in path:
        if isinstance(step, int):
            value = value[step]
        else:
            value = value[step]
    return value


class MockProvider:
    """Deterministic offline provider for tests, dry runs, and benchmarks.

    The response is a pure function of the conversation so far (hence of the
    prompt hash); optional latency_ms makes it pace like a real provider.
    """

    def __init__(self, config: ProviderConfig):
        self.config = config
        self._latency_s = float(config.options.get("latency_ms", 0)) / 1000.0

    def complete(self, messages: list[dict]) -> tuple[str, int, int, bool]:
        if self._latency_s > 0:
            time.sleep(self._latency_s)
        digest = hashlib.sha256(
            json.dumps(messages, ensure_ascii=False, sort_keys=True).encode("utf-8")
        ).hexdigest()
        turn = sum(1 for m in messages if m["role"] == "assistant") + 1
        text = (f"Synthetic review {digest[:16]} (turn {turn}): the original code "
                "allowed untrusted input to reach a sensitive sink; flag it and "
                "request the fix this commit applies.")
        tokens_in = sum(approx_token_count(m["content"]) for m in messages)
        return text, tokens_in, approx_token_count(text), True


class HttpChatProvider:
    """Generic JSON chat endpoint, field mapping declared in the config."""

    def __init__(self, config: ProviderConfig, transport: httpx.BaseTransport | None = None):
        self.config = config
        self._client = httpx.Client(timeout=config.timeout_s, transport=transport)

    def _headers(self) -> dict[str, str]:
        headers = {"Content-Type": "application/json"}
        if self.config.auth_env_var:
            token = os.environ.get(self.config.auth_env_var)
            if not token:
                raise AuthError(
                    f"credentials env var {self.config.auth_env_var} is not set")
            value = f"{self.config.auth_scheme} {token}".strip()
            headers[self.config.auth_header] = value
        return headers

    def complete(self, messages: list[dict]) -> tuple[str, int, int, bool]:
        config = self.config
        payload = {
            config.model_key: config.model_name,
            config.messages_key: messages,
            config.temperature_key: config.temperature,
            config.max_tokens_key: config.max_output_tokens,
        }
        try:
            response = self._client.post(config.endpoint, json=payload,
                                         headers=self._headers())
        except httpx.TimeoutException as exc:
            raise ProviderTimeout(f"{config.provider_id}: {exc}") from exc
        except httpx.HTTPError as exc:
            raise ProviderError(f"{config.provider_id}: transport error: {exc}") from exc

        if response.status_code in (401, 403):
            raise AuthError(f"{config.provider_id}: HTTP {response.status_code}")
        if response.status_code == 429:
            retry_after = response.headers.get("Retry-After")
            raise RateLimited(
                f"{config.provider_id}: HTTP 429",
                retry_after=float(retry_after) if retry_after else None)
        if response.status_code >= 500:
            raise ProviderError(
                f"{config.provider_id}: HTTP {response.status_code}",
                payload=response.text)
        if response.status_code != 200:
            raise ProviderError(
                f"{config.provider_id}: unexpected HTTP {response.status_code}",
                payload=response.text)

        body = response.json()
        try:
            text = _walk(body, config.response_text_path)
        except (KeyError, IndexError, TypeError) as exc:
            raise ProviderError(
                f"{config.provider_id}: response missing text at "
                f"{config.response_text_path}", payload=body) from exc
        if not isinstance(text, str):
            raise ProviderError(f"{config.provider_id}: response text is not a string",
                                payload=body)

        tokens_in = tokens_out = None
        if config.tokens_in_path:
            try:
                tokens_in = int(_walk(body, config.tokens_in_path))
            except (KeyError, IndexError, TypeError, ValueError):
                tokens_in = None
        if config.tokens_out_path:
            try:
                tokens_out = int(_walk(body, config.tokens_out_path))
            except (KeyError, IndexError, TypeError, ValueError):
                tokens_out = None
        approximate = tokens_in is None or tokens_out is None
        if tokens_in is None:
            tokens_in = sum(approx_token_count(m["content"]) for m in messages)
        if tokens_out is None:
            tokens_out = approx_token_count(text)
        return text, tokens_in, tokens_out, approximate


def build_provider(config: ProviderConfig, transport: httpx.BaseTransport | None = None):
    if config.kind == "mock":
        return MockProvider(config)
    return HttpChatProvider(config, transport=transport)
