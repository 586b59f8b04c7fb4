"""Dataset record types and the stable sample id."""

import hashlib
from dataclasses import dataclass
from datetime import datetime

from secrev.mining.types import isoformat_utc, parse_utc

SAMPLE_FIELDS = (
    "id", "repo", "sha", "diff", "message", "synthetic_review",
    "provider_id", "strategy", "template_version", "created_at",
)


def sample_id(repo: str, sha: str, provider_id: str, strategy: str,
              template_version: str) -> str:
    """Stable id over the provenance tuple; any change yields a new id."""
    material = "\x1f".join((repo, sha, provider_id, strategy, template_version))
    return hashlib.sha256(material.encode("utf-8")).hexdigest()


@dataclass(frozen=True)
class DatasetSample:
    """Final dataset tuple: diff + commit message + synthetic review,
    with full provenance."""

    repo: str
    sha: str
    diff: str
    message: str
    synthetic_review: str
    provider_id: str
    strategy: str
    template_version: str
    created_at: datetime

    @property
    def id(self) -> str:
        return sample_id(self.repo, self.sha, self.provider_id,
                         self.strategy, self.template_version)

    def to_dict(self) -> dict:
        return {
            "id": self.id,
            "repo": self.repo,
            "sha": self.sha,
            "diff": self.diff,
            "message": self.message,
            "synthetic_review": self.synthetic_review,
            "provider_id": self.provider_id,
            "strategy": self.strategy,
            "template_version": self.template_version,
            "created_at": isoformat_utc(self.created_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "DatasetSample":
        return cls(
            repo=data["repo"],
            sha=data["sha"],
            diff=data["diff"],
            message=data["message"],
            synthetic_review=data["synthetic_review"],
            provider_id=data["provider_id"],
            strategy=data["strategy"],
            template_version=data["template_version"],
            created_at=parse_utc(data["created_at"]),
        )


@dataclass(frozen=True)
class ExternalReviewSample:
    """One sample from an externally produced review dataset's partition."""

    diff_hunk: str
    review_comment: str
    source_partition: str

    def to_dict(self) -> dict:
        return {
            "diff_hunk": self.diff_hunk,
            "review_comment": self.review_comment,
            "source_partition": self.source_partition,
        }
