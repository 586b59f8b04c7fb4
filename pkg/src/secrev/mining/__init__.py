"""Repository discovery and commit harvesting."""

from secrev.mining.fixture import FixtureHost
from secrev.mining.github import GitHubHost
from secrev.mining.miner import MiningReport, mine, mine_repo
from secrev.mining.store import RecordStore
from secrev.mining.types import ChangedFile, CommitRecord, RepoRecord

__all__ = [
    "FixtureHost",
    "GitHubHost",
    "MiningReport",
    "mine",
    "mine_repo",
    "RecordStore",
    "ChangedFile",
    "CommitRecord",
    "RepoRecord",
]
