"""Rate-limited, cached, provider-agnostic LLM access."""

from secrev.gateway.cache import ResponseCache
from secrev.gateway.config import ProviderConfig
from secrev.gateway.gateway import GenerationResult, LlmGateway
from secrev.gateway.providers import prompt_hash

__all__ = [
    "ResponseCache",
    "ProviderConfig",
    "GenerationResult",
    "LlmGateway",
    "prompt_hash",
]
