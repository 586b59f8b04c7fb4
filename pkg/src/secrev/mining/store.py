"""Embedded append-only record store for resumable mining runs.

Repos and commits are appended as JSONL (one object per line); commit
diffs are stored as one file per (repo, sha). Reads resolve duplicate keys
last-write-wins, so re-mining is always safe.
"""

import json
import threading
from pathlib import Path
from typing import Iterator

from secrev.mining.types import CommitRecord, RepoRecord


class RecordStore:
    def __init__(self, root: str | Path):
        self.root = Path(root)
        self.root.mkdir(parents=True, exist_ok=True)
        self.repos_path = self.root / "repos.jsonl"
        self.commits_path = self.root / "commits.jsonl"
        self.diffs_root = self.root / "diffs"
        self._lock = threading.Lock()
        self._commit_keys: set[tuple[str, str]] | None = None

    # --- appends (thread-safe) ---

    def append_repo(self, repo: RepoRecord) -> None:
        line = json.dumps(repo.to_dict(), ensure_ascii=False)
        with self._lock, self.repos_path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")

    def append_commit(self, commit: CommitRecord) -> None:
        line = json.dumps(commit.to_dict(), ensure_ascii=False)
        with self._lock, self.commits_path.open("a", encoding="utf-8") as fh:
            fh.write(line + "\n")
            if self._commit_keys is not None:
                self._commit_keys.add((commit.repo, commit.sha))

    def _diff_path(self, repo_full: str, sha: str) -> Path:
        return self.diffs_root / repo_full.replace("/", "__") / f"{sha}.diff"

    def put_diff(self, repo_full: str, sha: str, text: str) -> None:
        path = self._diff_path(repo_full, sha)
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(text, encoding="utf-8")

    # --- reads ---

    def repos(self) -> list[RepoRecord]:
        if not self.repos_path.exists():
            return []
        by_key: dict[tuple[str, str], RepoRecord] = {}
        for line in self.repos_path.read_text(encoding="utf-8").splitlines():
            if line.strip():
                record = RepoRecord.from_dict(json.loads(line))
                by_key[(record.owner, record.name)] = record
        return list(by_key.values())

    def commits(self) -> Iterator[CommitRecord]:
        if not self.commits_path.exists():
            return iter(())
        by_key: dict[tuple[str, str], CommitRecord] = {}
        with self.commits_path.open("r", encoding="utf-8") as fh:
            for line in fh:
                if line.strip():
                    record = CommitRecord.from_dict(json.loads(line))
                    by_key[(record.repo, record.sha)] = record
        return iter(by_key.values())

    def commit_keys(self) -> set[tuple[str, str]]:
        if self._commit_keys is None:
            self._commit_keys = {(c.repo, c.sha) for c in self.commits()}
        return self._commit_keys

    def has_commit(self, repo_full: str, sha: str) -> bool:
        return (repo_full, sha) in self.commit_keys()

    def has_diff(self, repo_full: str, sha: str) -> bool:
        return self._diff_path(repo_full, sha).exists()

    def get_diff(self, repo_full: str, sha: str) -> str:
        return self._diff_path(repo_full, sha).read_text(encoding="utf-8")
