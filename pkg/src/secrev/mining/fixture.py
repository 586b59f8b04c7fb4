"""Deterministic in-process host backend for tests and offline pipeline runs.

Implements the same three operations as the live GitHub client from a plain
dict (or JSON file) describing repos and their commits.
"""

import json
from pathlib import Path
from typing import Iterator

from secrev.errors import CommitNotFound, DiffTooLarge, RepoGone
from secrev.mining.types import ChangedFile, CommitRecord, RepoRecord, parse_utc


class FixtureHost:
    """Host backend over static data.

    Data shape: {"repos": [{"owner", "name", "language", "pr_count",
    "default_branch", "fork", "commits": [{"sha", "message", "parents",
    "authored_at", "files": [[path, kind], ...], "diff"}]}]}
    """

    host_id = "fixture"

    def __init__(self, data: dict, exclude_forks: bool = True,
                 diff_byte_cap: int = 1 << 20):
        self.data = data
        self.exclude_forks = exclude_forks
        self.diff_byte_cap = diff_byte_cap

    @classmethod
    def from_json(cls, path: str | Path, **kwargs) -> "FixtureHost":
        return cls(json.loads(Path(path).read_text(encoding="utf-8")), **kwargs)

    def _repo_entry(self, owner: str, name: str) -> dict:
        for entry in self.data.get("repos", []):
            if entry["owner"] == owner and entry["name"] == name:
                return entry
        raise RepoGone(f"{owner}/{name} not in fixture")

    def discover_repos(self, language: str, min_pr_count: int,
                       page_limit: int | None = None) -> Iterator[RepoRecord]:
        seen: set[tuple[str, str]] = set()
        emitted = 0
        for entry in self.data.get("repos", []):
            if page_limit is not None and emitted >= page_limit * 100:
                return
            if entry.get("language") != language:
                continue
            if entry.get("pr_count", 0) < min_pr_count:
                continue
            if self.exclude_forks and entry.get("fork", False):
                continue
            key = (entry["owner"], entry["name"])
            if key in seen:
                continue
            seen.add(key)
            emitted += 1
            yield RepoRecord(
                host_id=self.host_id,
                owner=entry["owner"],
                name=entry["name"],
                primary_language=entry["language"],
                pr_count=entry["pr_count"],
                default_branch=entry.get("default_branch", "main"),
            )

    def enumerate_commits(self, repo: RepoRecord) -> Iterator[CommitRecord]:
        entry = self._repo_entry(repo.owner, repo.name)
        commits = sorted(entry.get("commits", []),
                         key=lambda c: c["authored_at"], reverse=True)
        for raw in commits:
            yield CommitRecord(
                repo=repo.full_name,
                sha=raw["sha"],
                message=raw["message"],
                parent_count=raw["parents"],
                changed_files=tuple(ChangedFile(p, k) for p, k in raw.get("files", [])),
                authored_at=parse_utc(raw["authored_at"]),
            )

    def fetch_commit_diff(self, repo: RepoRecord, sha: str) -> str:
        entry = self._repo_entry(repo.owner, repo.name)
        for raw in entry.get("commits", []):
            if raw["sha"] == sha:
                diff = raw.get("diff", "")
                size = len(diff.encode("utf-8"))
                if size > self.diff_byte_cap:
                    raise DiffTooLarge(f"{sha} diff is {size} bytes",
                                       size=size, cap=self.diff_byte_cap)
                return diff
        raise CommitNotFound(f"{sha} not in {repo.full_name}")
