"""Commit candidacy rules and the filtering funnel.

Rules run in a fixed order so rejection counts are deterministic and
comparable across runs: merge commits first, then single-file, extension,
test-path, and source-survival checks. Everything here is pure and
stateless.
"""

from dataclasses import dataclass, field
from typing import Iterable, Iterator

from secrev.mining.types import CommitRecord

REASONS = ("OK", "MergeCommit", "MultiFile", "NotJava", "TestFile", "NotSource")


@dataclass(frozen=True)
class CandidacyVerdict:
    accepted: bool
    reason: str

    def __post_init__(self):
        if self.reason not in REASONS:
            raise ValueError(f"unknown reason {self.reason!r}")
        if self.accepted != (self.reason == "OK"):
            raise ValueError("accepted must hold exactly when reason is OK")


_OK = CandidacyVerdict(True, "OK")


def judge_candidacy(commit: CommitRecord) -> CandidacyVerdict:
    """Apply the candidacy rules to one commit. Total: never raises."""
    if commit.parent_count >= 2:
        return CandidacyVerdict(False, "MergeCommit")
    if len(commit.changed_files) != 1:
        return CandidacyVerdict(False, "MultiFile")
    changed = commit.changed_files[0]
    if not changed.path.endswith(".java"):
        return CandidacyVerdict(False, "NotJava")
    if "test" in changed.path.lower():
        return CandidacyVerdict(False, "TestFile")
    if changed.change_kind in ("deleted", "renamed"):
        return CandidacyVerdict(False, "NotSource")
    return _OK


@dataclass
class FunnelReport:
    """Per-reason counts; reasons partition the input."""

    counts: dict[str, int] = field(default_factory=lambda: {r: 0 for r in REASONS})

    @property
    def total(self) -> int:
        return sum(self.counts.values())

    @property
    def accepted(self) -> int:
        return self.counts["OK"]

    @property
    def rejected(self) -> int:
        return self.total - self.accepted

    def to_dict(self) -> dict[str, int]:
        return dict(self.counts)


def filter_candidates(
    commits: Iterable[CommitRecord],
) -> tuple[Iterator[CommitRecord], FunnelReport]:
    """Stream accepted commits; the report is complete once the stream is
    exhausted."""
    report = FunnelReport()

    def generate() -> Iterator[CommitRecord]:
        for commit in commits:
            verdict = judge_candidacy(commit)
            report.counts[verdict.reason] += 1
            if verdict.accepted:
                yield commit

    return generate(), report
