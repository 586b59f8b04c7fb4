"""Declarative pipeline configuration (YAML), validated before any stage runs.

Unknown keys are errors: a typo in a config must fail loudly, not silently
fall back to a default.
"""

from pathlib import Path

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from secrev.errors import ConfigError
from secrev.gateway.config import ProviderConfig


class _Strict(BaseModel):
    model_config = ConfigDict(extra="forbid")


class HostConfig(_Strict):
    kind: str = "github"  # "github" or "fixture"
    fixture_path: str | None = None
    base_url: str = "https://api.github.com"
    token_env: str = "GITHUB_TOKEN"
    requests_per_minute: int = 30
    exclude_forks: bool = True


class MiningConfig(_Strict):
    language: str = "Java"
    min_prs: int = 50
    page_limit: int | None = None
    workers: int = 4
    diff_byte_cap: int = 1 << 20
    host: HostConfig = Field(default_factory=HostConfig)


class KeywordsConfig(_Strict):
    seed_list: str | None = None  # null = packaged list
    confidence: float = 0.95
    margin: float = 0.05
    retention_threshold: float = 0.75


class ProviderEntry(_Strict):
    provider_id: str
    kind: str = "http_chat"
    endpoint: str = ""
    model_name: str = ""
    auth_env_var: str = ""
    max_concurrency: int = 4
    requests_per_minute: int = 60
    temperature: float = 0.0
    max_output_tokens: int = 1024
    timeout_s: float = 60.0
    max_retries: int = 5
    response_text_path: list = Field(
        default_factory=lambda: ["choices", 0, "message", "content"])
    tokens_in_path: list | None = Field(
        default_factory=lambda: ["usage", "prompt_tokens"])
    tokens_out_path: list | None = Field(
        default_factory=lambda: ["usage", "completion_tokens"])
    auth_header: str = "Authorization"
    auth_scheme: str = "Bearer"
    options: dict = Field(default_factory=dict)

    def to_provider_config(self) -> ProviderConfig:
        return ProviderConfig(
            provider_id=self.provider_id,
            kind=self.kind,
            endpoint=self.endpoint,
            model_name=self.model_name,
            auth_env_var=self.auth_env_var,
            max_concurrency=self.max_concurrency,
            requests_per_minute=self.requests_per_minute,
            temperature=self.temperature,
            max_output_tokens=self.max_output_tokens,
            timeout_s=self.timeout_s,
            max_retries=self.max_retries,
            response_text_path=tuple(self.response_text_path),
            tokens_in_path=tuple(self.tokens_in_path) if self.tokens_in_path else None,
            tokens_out_path=tuple(self.tokens_out_path) if self.tokens_out_path else None,
            auth_header=self.auth_header,
            auth_scheme=self.auth_scheme,
            options=dict(self.options),
        )


class GridConfig(_Strict):
    sample_size: int = 100
    providers: list[str] | None = None  # null = all configured providers
    strategies: list[str] = Field(default_factory=lambda: [
        "zero_shot", "chain_of_thought", "self_reflection"])
    workers: int = 4


class DatasetConfig(_Strict):
    provider: str | None = None  # null = read the winner selection
    strategy: str | None = None


class ExternalConfig(_Strict):
    input: str | None = None
    diff_hunk_column: str = "diff_hunk"
    review_comment_column: str = "review_comment"
    partition_column: str | None = None
    default_partition: str = "external"


class AnnotationConfig(_Strict):
    host: str = "127.0.0.1"
    port: int = 8431


class SeedsConfig(_Strict):
    sampling: int = 7
    grid: int = 11
    shuffle: int = 13


class PipelineConfig(_Strict):
    workdir: str = "out"
    seeds: SeedsConfig = Field(default_factory=SeedsConfig)
    mining: MiningConfig = Field(default_factory=MiningConfig)
    keywords: KeywordsConfig = Field(default_factory=KeywordsConfig)
    templates_dir: str | None = None
    providers: list[ProviderEntry] = Field(default_factory=list)
    grid: GridConfig = Field(default_factory=GridConfig)
    dataset: DatasetConfig = Field(default_factory=DatasetConfig)
    external: ExternalConfig = Field(default_factory=ExternalConfig)
    annotation: AnnotationConfig = Field(default_factory=AnnotationConfig)

    @property
    def workdir_path(self) -> Path:
        return Path(self.workdir)

    def provider_ids(self) -> list[str]:
        return [p.provider_id for p in self.providers]


def load_config(path: str | Path) -> PipelineConfig:
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file {path} does not exist")
    try:
        raw = yaml.safe_load(path.read_text(encoding="utf-8")) or {}
    except yaml.YAMLError as exc:
        raise ConfigError(f"config is not valid YAML: {exc}") from exc
    if not isinstance(raw, dict):
        raise ConfigError("config root must be a mapping")
    try:
        config = PipelineConfig.model_validate(raw)
    except ValidationError as exc:
        raise ConfigError(f"config validation failed:\n{exc}") from exc
    ids = config.provider_ids()
    if len(ids) != len(set(ids)):
        raise ConfigError("provider_id values must be unique")
    return config
