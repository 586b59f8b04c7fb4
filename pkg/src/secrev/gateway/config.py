"""Provider configuration: each model under analysis is a config entry."""

from dataclasses import dataclass, field


@dataclass(frozen=True)
class ProviderConfig:
    provider_id: str
    kind: str = "http_chat"  # "http_chat" or "mock"
    endpoint: str = ""
    model_name: str = ""
    auth_env_var: str = ""
    max_concurrency: int = 4
    requests_per_minute: int = 60
    temperature: float = 0.0
    max_output_tokens: int = 1024
    max_prompt_chars: int | None = None  # None = provider-side limits only
    timeout_s: float = 60.0
    max_retries: int = 5
    retry_base_delay_s: float = 0.5
    # JSON chat field mapping; defaults fit OpenAI-style chat endpoints.
    model_key: str = "model"
    messages_key: str = "messages"
    temperature_key: str = "temperature"
    max_tokens_key: str = "max_tokens"
    response_text_path: tuple = ("choices", 0, "message", "content")
    tokens_in_path: tuple | None = ("usage", "prompt_tokens")
    tokens_out_path: tuple | None = ("usage", "completion_tokens")
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    options: dict = field(default_factory=dict)  # provider-specific knobs

    def __post_init__(self):
        if not self.provider_id:
            raise ValueError("provider_id must be non-empty")
        if self.kind not in ("http_chat", "mock"):
            raise ValueError(f"unknown provider kind {self.kind!r}")
        if self.max_concurrency < 1:
            raise ValueError("max_concurrency must be >= 1")
        if self.temperature < 0:
            raise ValueError("temperature must be >= 0")
        if self.kind == "http_chat" and not self.endpoint:
            raise ValueError("http_chat providers need an endpoint")
