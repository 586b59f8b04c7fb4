"""Mining orchestration: discovery, commit harvest, diff capture.

Repos are mined concurrently with a bounded worker pool; the host client's
rate limiter is shared across workers. Every record lands in the store as
it is produced, so an interrupted run resumes by skipping keys it already
holds. Workers return their own counters and the main thread merges them.
"""

import logging
from collections import Counter
from concurrent.futures import ThreadPoolExecutor, as_completed
from dataclasses import dataclass, field

from secrev.errors import DiffTooLarge, RepoGone
from secrev.mining.store import RecordStore
from secrev.mining.types import RepoRecord

logger = logging.getLogger(__name__)


@dataclass
class MiningReport:
    repos: int = 0
    commits: int = 0
    commits_skipped_existing: int = 0
    diffs: int = 0
    diffs_too_large: int = 0
    repos_gone: int = 0
    errors: list[str] = field(default_factory=list)

    def to_dict(self) -> dict:
        return {
            "repos": self.repos,
            "commits": self.commits,
            "commits_skipped_existing": self.commits_skipped_existing,
            "diffs": self.diffs,
            "diffs_too_large": self.diffs_too_large,
            "repos_gone": self.repos_gone,
            "errors": self.errors,
        }


def mine_repo(host, store: RecordStore, repo: RepoRecord,
              fetch_diffs: bool = True) -> Counter:
    """Harvest one repo into the store; returns this worker's counters."""
    counts: Counter = Counter()
    for commit in host.enumerate_commits(repo):
        if store.has_commit(commit.repo, commit.sha):
            counts["commits_skipped_existing"] += 1
            continue
        if fetch_diffs:
            try:
                diff = host.fetch_commit_diff(repo, commit.sha)
            except DiffTooLarge as exc:
                logger.info("skipping oversized diff %s (%s bytes)",
                            commit.sha, exc.size)
                counts["diffs_too_large"] += 1
                continue
            store.put_diff(commit.repo, commit.sha, diff)
            counts["diffs"] += 1
        store.append_commit(commit)
        counts["commits"] += 1
    return counts


def mine(host, store: RecordStore, language: str, min_pr_count: int,
         page_limit: int | None = None, workers: int = 4,
         fetch_diffs: bool = True) -> MiningReport:
    """Run discovery and harvest; returns per-category counts."""
    report = MiningReport()
    repos = list(host.discover_repos(language, min_pr_count, page_limit))
    for repo in repos:
        store.append_repo(repo)
    report.repos = len(repos)

    store.commit_keys()  # warm the resume set once, before workers start
    with ThreadPoolExecutor(max_workers=workers) as pool:
        futures = {
            pool.submit(mine_repo, host, store, repo, fetch_diffs): repo
            for repo in repos
        }
        for future in as_completed(futures):
            repo = futures[future]
            try:
                counts = future.result()
            except RepoGone:
                report.repos_gone += 1
                logger.warning("repo %s disappeared while mining", repo.full_name)
            except Exception as exc:
                report.errors.append(f"{repo.full_name}: {exc}")
                logger.error("mining %s failed: %s", repo.full_name, exc)
            else:
                report.commits += counts["commits"]
                report.commits_skipped_existing += counts["commits_skipped_existing"]
                report.diffs += counts["diffs"]
                report.diffs_too_large += counts["diffs_too_large"]
    return report
