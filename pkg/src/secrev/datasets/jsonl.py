"""JSONL I/O for dataset samples with strict schema validation.

The field set is frozen for interoperability with downstream fine-tuning
consumers; unknown or missing keys fail with the 1-based line number.
"""

import json
from pathlib import Path
from typing import Iterable, Iterator

from secrev.datasets.records import SAMPLE_FIELDS, DatasetSample, sample_id
from secrev.errors import DuplicateSampleId, SchemaError


def write_jsonl(samples: Iterable[DatasetSample], path: str | Path) -> int:
    """Write one JSON object per line; returns the number written.

    Sample ids are collision-checked: a duplicate id aborts the write.
    """
    path = Path(path)
    seen: set[str] = set()
    count = 0
    with path.open("w", encoding="utf-8") as fh:
        for sample in samples:
            sid = sample.id
            if sid in seen:
                raise DuplicateSampleId(f"duplicate sample id {sid}")
            seen.add(sid)
            fh.write(json.dumps(sample.to_dict(), ensure_ascii=False) + "\n")
            count += 1
    return count


def _validate_sample(data: object, line: int) -> DatasetSample:
    if not isinstance(data, dict):
        raise SchemaError("line is not a JSON object", line)
    keys = set(data)
    expected = set(SAMPLE_FIELDS)
    if keys != expected:
        missing = sorted(expected - keys)
        extra = sorted(keys - expected)
        parts = []
        if missing:
            parts.append(f"missing keys {missing}")
        if extra:
            parts.append(f"unexpected keys {extra}")
        raise SchemaError("; ".join(parts), line)
    for key in SAMPLE_FIELDS:
        if not isinstance(data[key], str) or not data[key]:
            raise SchemaError(f"field {key!r} must be a non-empty string", line)
    expected_id = sample_id(data["repo"], data["sha"], data["provider_id"],
                            data["strategy"], data["template_version"])
    if data["id"] != expected_id:
        raise SchemaError(
            f"id {data['id'][:12]}... does not match provenance hash", line)
    try:
        return DatasetSample.from_dict(data)
    except (ValueError, KeyError) as exc:
        raise SchemaError(f"invalid field value: {exc}", line) from exc


def read_jsonl(path: str | Path) -> Iterator[DatasetSample]:
    """Stream samples back; trailing blank lines are ignored."""
    with Path(path).open("r", encoding="utf-8") as fh:
        for line_no, raw in enumerate(fh, start=1):
            stripped = raw.strip()
            if not stripped:
                continue
            try:
                data = json.loads(stripped)
            except json.JSONDecodeError as exc:
                raise SchemaError(f"invalid JSON: {exc.msg}", line_no) from exc
            yield _validate_sample(data, line_no)
