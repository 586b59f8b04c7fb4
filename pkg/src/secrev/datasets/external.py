"""Ingest and security-filter externally produced review datasets.

External partitions arrive with arbitrary column names, so ingestion goes
through a declared column mapping. Filtering matches retained keywords
against the review comment only, never the diff hunk: the point is to find
reviews that talk about security, not code that mentions it.
"""

import json
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

from secrev.datasets.records import ExternalReviewSample
from secrev.errors import SchemaError
from secrev.keywords.matching import KeywordMatcher


@dataclass(frozen=True)
class FlaggedSample:
    """An external sample that matched the keyword list, queued for manual
    review."""

    sample: ExternalReviewSample
    matched_keywords: tuple[str, ...]

    def to_dict(self) -> dict:
        data = self.sample.to_dict()
        data["matched_keywords"] = list(self.matched_keywords)
        return data


def read_external_jsonl(
    path: str | Path,
    diff_hunk_column: str,
    review_comment_column: str,
    partition_column: str | None = None,
    default_partition: str = "external",
) -> Iterator[ExternalReviewSample]:
    """Read an external partition under a declared column mapping."""
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped:
                continue
            try:
                data = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from exc
            if not isinstance(data, dict):
                raise SchemaError("line is not a JSON object", line_no)
            try:
                diff_hunk = data[diff_hunk_column]
                review_comment = data[review_comment_column]
            except KeyError as exc:
                raise SchemaError(f"missing mapped column {exc}", line_no) from exc
            partition = data.get(partition_column, default_partition) \
                if partition_column else default_partition
            if not diff_hunk or not review_comment:
                raise SchemaError("mapped fields must be non-empty", line_no)
            yield ExternalReviewSample(
                diff_hunk=str(diff_hunk),
                review_comment=str(review_comment),
                source_partition=str(partition),
            )


def filter_external_partition(
    samples: Iterable[ExternalReviewSample],
    keywords: Sequence[str],
) -> Iterator[FlaggedSample]:
    """Emit samples whose review comment matches at least one retained
    keyword, tagged with the matches for the manual-review step."""
    matcher = KeywordMatcher(keywords)
    for sample in samples:
        matched = matcher.match(sample.review_comment)
        if matched:
            yield FlaggedSample(sample=sample, matched_keywords=tuple(sorted(matched)))
