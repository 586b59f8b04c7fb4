"""Domain records produced by repository mining."""

import re
from dataclasses import dataclass, field
from datetime import datetime, timezone

CHANGE_KINDS = ("added", "modified", "deleted", "renamed")

_SHA_RE = re.compile(r"^[0-9a-f]{40}$")


def utc_now() -> datetime:
    return datetime.now(timezone.utc)


def isoformat_utc(ts: datetime) -> str:
    return ts.astimezone(timezone.utc).isoformat().replace("+00:00", "Z")


def parse_utc(text: str) -> datetime:
    return datetime.fromisoformat(text.replace("Z", "+00:00")).astimezone(timezone.utc)


@dataclass(frozen=True)
class RepoRecord:
    """A candidate repository that met the activity bar at mining time."""

    host_id: str
    owner: str
    name: str
    primary_language: str
    pr_count: int
    default_branch: str
    mined_at: datetime = field(default_factory=utc_now)

    def __post_init__(self):
        if self.pr_count < 0:
            raise ValueError(f"pr_count must be >= 0, got {self.pr_count}")

    @property
    def full_name(self) -> str:
        return f"{self.owner}/{self.name}"

    def to_dict(self) -> dict:
        return {
            "host_id": self.host_id,
            "owner": self.owner,
            "name": self.name,
            "primary_language": self.primary_language,
            "pr_count": self.pr_count,
            "default_branch": self.default_branch,
            "mined_at": isoformat_utc(self.mined_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "RepoRecord":
        return cls(
            host_id=data["host_id"],
            owner=data["owner"],
            name=data["name"],
            primary_language=data["primary_language"],
            pr_count=data["pr_count"],
            default_branch=data["default_branch"],
            mined_at=parse_utc(data["mined_at"]),
        )


@dataclass(frozen=True)
class ChangedFile:
    path: str
    change_kind: str

    def __post_init__(self):
        if self.change_kind not in CHANGE_KINDS:
            raise ValueError(f"unknown change_kind {self.change_kind!r}")


@dataclass(frozen=True)
class CommitRecord:
    """One mined commit; the unit flowing through every downstream filter."""

    repo: str  # "owner/name"
    sha: str
    message: str
    parent_count: int
    changed_files: tuple[ChangedFile, ...]
    authored_at: datetime

    def __post_init__(self):
        if not _SHA_RE.match(self.sha):
            raise ValueError(f"sha must be 40 lowercase hex chars, got {self.sha!r}")
        if self.parent_count < 0:
            raise ValueError(f"parent_count must be >= 0, got {self.parent_count}")

    def to_dict(self) -> dict:
        return {
            "repo": self.repo,
            "sha": self.sha,
            "message": self.message,
            "parent_count": self.parent_count,
            "changed_files": [
                {"path": f.path, "change_kind": f.change_kind} for f in self.changed_files
            ],
            "authored_at": isoformat_utc(self.authored_at),
        }

    @classmethod
    def from_dict(cls, data: dict) -> "CommitRecord":
        return cls(
            repo=data["repo"],
            sha=data["sha"],
            message=data["message"],
            parent_count=data["parent_count"],
            changed_files=tuple(
                ChangedFile(f["path"], f["change_kind"]) for f in data["changed_files"]
            ),
            authored_at=parse_utc(data["authored_at"]),
        )
