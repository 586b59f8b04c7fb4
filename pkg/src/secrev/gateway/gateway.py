"""Uniform, rate-limited, cached access to the registered LLM providers."""

import logging
import threading
import time
from dataclasses import dataclass, field, replace
from datetime import datetime

import httpx

from secrev.errors import (
    AuthError,
    DuplicateProvider,
    PromptTooLarge,
    ProviderError,
    ProviderTimeout,
    RateLimited,
)
from secrev.gateway.cache import ResponseCache
from secrev.gateway.config import ProviderConfig
from secrev.gateway.providers import build_provider, prompt_hash
from secrev.mining.types import isoformat_utc, parse_utc, utc_now
from secrev.prompts import fill_prior_response
from secrev.ratelimit import TokenBucket

logger = logging.getLogger(__name__)

RETRYABLE = (RateLimited, ProviderTimeout, ProviderError)


@dataclass(frozen=True)
class GenerationResult:
    commit_ref: tuple[str, str]  # (repo, sha)
    provider_id: str
    model_name: str
    strategy: str
    template_version: str
    prompt_hash: str
    response_text: str
    turn_responses: tuple[str, ...]
    latency_ms: int
    tokens_in: int
    tokens_out: int
    tokens_approximate: bool
    created_at: datetime
    from_cache: bool = False
    retry_count: int = 0

    def __post_init__(self):
        if self.turn_responses and self.response_text != self.turn_responses[-1]:
            raise ValueError("response_text must equal the final turn response")

    def to_dict(self) -> dict:
        return {
            "commit_ref": list(self.commit_ref),
            "provider_id": self.provider_id,
            "model_name": self.model_name,
            "strategy": self.strategy,
            "template_version": self.template_version,
            "prompt_hash": self.prompt_hash,
            "response_text": self.response_text,
            "turn_responses": list(self.turn_responses),
            "latency_ms": self.latency_ms,
            "tokens_in": self.tokens_in,
            "tokens_out": self.tokens_out,
            "tokens_approximate": self.tokens_approximate,
            "created_at": isoformat_utc(self.created_at),
            "from_cache": self.from_cache,
            "retry_count": self.retry_count,
        }

    @classmethod
    def from_dict(cls, data: dict) -> "GenerationResult":
        return cls(
            commit_ref=tuple(data["commit_ref"]),
            provider_id=data["provider_id"],
            model_name=data["model_name"],
            strategy=data["strategy"],
            template_version=data["template_version"],
            prompt_hash=data["prompt_hash"],
            response_text=data["response_text"],
            turn_responses=tuple(data["turn_responses"]),
            latency_ms=data["latency_ms"],
            tokens_in=data["tokens_in"],
            tokens_out=data["tokens_out"],
            tokens_approximate=data["tokens_approximate"],
            created_at=parse_utc(data["created_at"]),
            from_cache=data.get("from_cache", False),
            retry_count=data.get("retry_count", 0),
        )


@dataclass
class _ProviderEntry:
    config: ProviderConfig
    backend: object
    semaphore: threading.Semaphore
    bucket: TokenBucket
    in_flight: int = 0
    max_observed_in_flight: int = 0
    lock: threading.Lock = field(default_factory=threading.Lock)


class LlmGateway:
    """Safe for concurrent callers; per-provider limits and a shared cache."""

    def __init__(self, cache_dir, sleep=time.sleep):
        self.cache = ResponseCache(cache_dir)
        self._sleep = sleep
        self._providers: dict[str, _ProviderEntry] = {}
        self._registry_lock = threading.Lock()

    def register_provider(self, config: ProviderConfig,
                          transport: httpx.BaseTransport | None = None) -> str:
        with self._registry_lock:
            if config.provider_id in self._providers:
                raise DuplicateProvider(f"provider {config.provider_id!r} already registered")
            self._providers[config.provider_id] = _ProviderEntry(
                config=config,
                backend=build_provider(config, transport=transport),
                semaphore=threading.Semaphore(config.max_concurrency),
                bucket=TokenBucket(config.requests_per_minute,
                                   capacity=max(1, config.max_concurrency),
                                   sleep=self._sleep),
            )
        return config.provider_id

    @property
    def provider_ids(self) -> list[str]:
        return sorted(self._providers)

    def provider_config(self, provider_id: str) -> ProviderConfig:
        return self._entry(provider_id).config

    def _entry(self, provider_id: str) -> _ProviderEntry:
        try:
            return self._providers[provider_id]
        except KeyError:
            raise ProviderError(f"provider {provider_id!r} is not registered") from None

    def _complete_with_retry(self, entry: _ProviderEntry, messages: list[dict]):
        config = entry.config
        attempts = 0
        while True:
            entry.bucket.acquire()
            with entry.semaphore:
                with entry.lock:
                    entry.in_flight += 1
                    entry.max_observed_in_flight = max(
                        entry.max_observed_in_flight, entry.in_flight)
                try:
                    result = entry.backend.complete(messages)
                    return result, attempts
                except AuthError:
                    raise
                except RETRYABLE as exc:
                    attempts += 1
                    if attempts > config.max_retries:
                        raise
                    delay = config.retry_base_delay_s * (2 ** (attempts - 1))
                    if isinstance(exc, RateLimited) and exc.retry_after is not None:
                        delay = max(delay, exc.retry_after)
                        entry.bucket.penalize(exc.retry_after)
                    logger.warning("%s: retry %d/%d after %s (%.2fs)",
                                   config.provider_id, attempts,
                                   config.max_retries, type(exc).__name__, delay)
                finally:
                    with entry.lock:
                        entry.in_flight -= 1
            self._sleep(delay)

    def generate(self, provider_id: str, prompts: list[str], *,
                 commit_ref: tuple[str, str] = ("", ""), strategy: str = "",
                 template_version: str = "") -> GenerationResult:
        """Run a (possibly multi-turn) generation with caching and retries.

        Later turns are sent with the full prior conversation; the outcome is
        durably cached before it is returned.
        """
        if not prompts:
            raise ProviderError("prompts must be non-empty")
        entry = self._entry(provider_id)
        config = entry.config
        if config.max_prompt_chars is not None:
            total = sum(len(p) for p in prompts)
            if total > config.max_prompt_chars:
                raise PromptTooLarge(
                    f"{total} chars exceeds {config.provider_id}'s cap of "
                    f"{config.max_prompt_chars}; not truncating")
        phash = prompt_hash(prompts)

        cached = self.cache.get(config.provider_id, config.model_name,
                                config.temperature, phash)
        if cached is not None:
            result = GenerationResult.from_dict(cached)
            # provenance comes from this call; the payload is what was cached
            return replace(result, from_cache=True, commit_ref=commit_ref,
                           strategy=strategy or result.strategy,
                           template_version=template_version or result.template_version)

        started = time.monotonic()
        messages: list[dict] = []
        turn_responses: list[str] = []
        tokens_in = tokens_out = 0
        approximate = False
        retries = 0
        for i, turn in enumerate(prompts):
            text = turn if i == 0 else fill_prior_response(turn, turn_responses[-1])
            messages.append({"role": "user", "content": text})
            (reply, t_in, t_out, approx), attempts = self._complete_with_retry(
                entry, messages)
            messages.append({"role": "assistant", "content": reply})
            turn_responses.append(reply)
            tokens_in += t_in
            tokens_out += t_out
            approximate = approximate or approx
            retries += attempts

        result = GenerationResult(
            commit_ref=commit_ref,
            provider_id=config.provider_id,
            model_name=config.model_name,
            strategy=strategy,
            template_version=template_version,
            prompt_hash=phash,
            response_text=turn_responses[-1],
            turn_responses=tuple(turn_responses),
            latency_ms=int((time.monotonic() - started) * 1000),
            tokens_in=tokens_in,
            tokens_out=tokens_out,
            tokens_approximate=approximate,
            created_at=utc_now(),
            from_cache=False,
            retry_count=retries,
        )
        self.cache.put(config.provider_id, config.model_name, config.temperature,
                       phash, result.to_dict())
        return result

    def max_observed_in_flight(self, provider_id: str) -> int:
        return self._entry(provider_id).max_observed_in_flight
