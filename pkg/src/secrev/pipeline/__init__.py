"""Pipeline configuration, stage bookkeeping, and stage runners."""

from secrev.pipeline.config import PipelineConfig, load_config
from secrev.pipeline.stages import StageIO, file_sha256, workdir_lock

__all__ = ["PipelineConfig", "load_config", "StageIO", "file_sha256", "workdir_lock"]
