"""Dataset schemas, JSONL round-trip I/O, and external-partition filtering."""

from secrev.datasets.external import (
    FlaggedSample,
    filter_external_partition,
    read_external_jsonl,
)
from secrev.datasets.jsonl import read_jsonl, write_jsonl
from secrev.datasets.records import (
    SAMPLE_FIELDS,
    DatasetSample,
    ExternalReviewSample,
    sample_id,
)

__all__ = [
    "FlaggedSample",
    "filter_external_partition",
    "read_external_jsonl",
    "read_jsonl",
    "write_jsonl",
    "SAMPLE_FIELDS",
    "DatasetSample",
    "ExternalReviewSample",
    "sample_id",
]
