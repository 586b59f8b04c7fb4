"""Unified-diff parsing and commit candidacy filtering."""

from secrev.diffkit.candidacy import (
    REASONS,
    CandidacyVerdict,
    FunnelReport,
    filter_candidates,
    judge_candidacy,
)
from secrev.diffkit.parse import FileDiff, Hunk, parse_unified_diff, serialize_diff

__all__ = [
    "REASONS",
    "CandidacyVerdict",
    "FunnelReport",
    "filter_candidates",
    "judge_candidacy",
    "FileDiff",
    "Hunk",
    "parse_unified_diff",
    "serialize_diff",
]
