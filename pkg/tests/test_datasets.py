"""Dataset JSONL round-trip and external filtering tests."""

from datetime import datetime, timezone

import pytest

from secrev.datasets import (
    DatasetSample,
    ExternalReviewSample,
    filter_external_partition,
    read_external_jsonl,
    read_jsonl,
    write_jsonl,
)
from secrev.errors import DuplicateSampleId, SchemaError

TS = datetime(2024, 6, 1, 12, 0, tzinfo=timezone.utc)


def make_sample(i: int, **overrides) -> DatasetSample:
    fields = dict(
        repo="acme/widget",
        sha=f"{i:040x}",
        diff=f"--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-old {i}\n+new {i}\n",
        message=f"fix issue {i}",
        synthetic_review=f"review text {i}",
        provider_id="mock",
        strategy="zero_shot",
        template_version="v1:abc123",
        created_at=TS,
    )
    fields.update(overrides)
    return DatasetSample(**fields)


class TestRoundTrip:
    def test_three_samples(self, tmp_path):
        samples = [make_sample(i) for i in range(3)]
        path = tmp_path / "out.jsonl"
        assert write_jsonl(samples, path) == 3
        text = path.read_text()
        assert text.count("\n") == 3 and text.endswith("\n")
        assert list(read_jsonl(path)) == samples

    def test_empty_stream(self, tmp_path):
        path = tmp_path / "empty.jsonl"
        assert write_jsonl([], path) == 0
        assert path.read_text() == ""
        assert list(read_jsonl(path)) == []

    def test_embedded_newlines_stay_one_line(self, tmp_path):
        sample = make_sample(1, diff="line1\nline2\r\nline3\n")
        path = tmp_path / "nl.jsonl"
        write_jsonl([sample], path)
        assert len(path.read_text().rstrip("\n").split("\n")) == 1
        assert next(iter(read_jsonl(path))).diff == "line1\nline2\r\nline3\n"

    def test_trailing_blank_line_ignored(self, tmp_path):
        path = tmp_path / "blank.jsonl"
        write_jsonl([make_sample(1)], path)
        path.write_text(path.read_text() + "\n\n")
        assert len(list(read_jsonl(path))) == 1

    def test_duplicate_id_rejected(self, tmp_path):
        with pytest.raises(DuplicateSampleId):
            write_jsonl([make_sample(1), make_sample(1)], tmp_path / "dup.jsonl")

    def test_thousand_samples_identity(self, tmp_path):
        samples = [make_sample(i) for i in range(1000)]
        path = tmp_path / "big.jsonl"
        assert write_jsonl(samples, path) == 1000
        assert list(read_jsonl(path)) == samples


class TestSchemaValidation:
    def test_missing_key_reports_line(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        write_jsonl([make_sample(1), make_sample(2)], path)
        lines = path.read_text().splitlines()
        import json
        broken = json.loads(lines[1])
        del broken["diff"]
        path.write_text(lines[0] + "\n" + json.dumps(broken) + "\n")
        with pytest.raises(SchemaError) as exc_info:
            list(read_jsonl(path))
        assert exc_info.value.line == 2
        assert "diff" in str(exc_info.value)

    def test_extra_key_rejected(self, tmp_path):
        import json
        path = tmp_path / "extra.jsonl"
        write_jsonl([make_sample(1)], path)
        data = json.loads(path.read_text())
        data["surprise"] = "x"
        path.write_text(json.dumps(data) + "\n")
        with pytest.raises(SchemaError):
            list(read_jsonl(path))

    def test_empty_field_rejected(self, tmp_path):
        import json
        path = tmp_path / "empty_field.jsonl"
        write_jsonl([make_sample(1)], path)
        data = json.loads(path.read_text())
        data["message"] = ""
        path.write_text(json.dumps(data) + "\n")
        with pytest.raises(SchemaError):
            list(read_jsonl(path))

    def test_tampered_id_rejected(self, tmp_path):
        import json
        path = tmp_path / "tampered.jsonl"
        write_jsonl([make_sample(1)], path)
        data = json.loads(path.read_text())
        data["id"] = "0" * 64
        path.write_text(json.dumps(data) + "\n")
        with pytest.raises(SchemaError):
            list(read_jsonl(path))

    def test_invalid_json_reports_line(self, tmp_path):
        path = tmp_path / "garbage.jsonl"
        path.write_text('{"id": 1\n')
        with pytest.raises(SchemaError) as exc_info:
            list(read_jsonl(path))
        assert exc_info.value.line == 1


def external(i: int, comment: str, diff: str = "@@ -1 +1 @@\n-a\n+b") -> ExternalReviewSample:
    return ExternalReviewSample(
        diff_hunk=f"{diff} // {i}",
        review_comment=comment,
        source_partition="code-to-comment-test",
    )


class TestExternalFiltering:
    def test_comment_match_emitted(self):
        samples = [external(1, "fix buffer overflow here")]
        flagged = list(filter_external_partition(samples, ["overflow"]))
        assert len(flagged) == 1
        assert flagged[0].matched_keywords == ("overflow",)

    def test_diff_only_match_not_emitted(self):
        samples = [external(1, "nit: rename this variable",
                            diff="+ guard against overflow")]
        assert list(filter_external_partition(samples, ["overflow"])) == []

    def test_output_subset_of_input(self):
        samples = [external(i, c) for i, c in enumerate(
            ["use xss escaping", "style nit", "potential csrf", "typo"])]
        flagged = list(filter_external_partition(samples, ["xss", "csrf"]))
        assert [f.sample.review_comment for f in flagged] == [
            "use xss escaping", "potential csrf"]

    def test_forty_three_matching_fixture(self):
        # Hand-built partition: exactly 43 samples whose *comments* match,
        # plus decoys that only match in the diff hunk.
        matching = [external(i, f"this can lead to sql injection ({i})") for i in range(43)]
        comment_clean = [
            external(100 + i, f"refactor the loop ({i})", diff="+ fix xss escape()")
            for i in range(20)
        ]
        flagged = list(filter_external_partition(
            matching + comment_clean, ["sql injection", "xss"]))
        assert len(flagged) == 43

    def test_read_external_with_column_mapping(self, tmp_path):
        import json
        path = tmp_path / "ext.jsonl"
        rows = [
            {"patch": "@@ -1 +1 @@", "msg": "escape the user input", "split": "test"},
            {"patch": "@@ -2 +2 @@", "msg": "rename variable", "split": "test"},
        ]
        path.write_text("".join(json.dumps(r) + "\n" for r in rows))
        samples = list(read_external_jsonl(
            path, diff_hunk_column="patch", review_comment_column="msg",
            partition_column="split"))
        assert len(samples) == 2
        assert samples[0].source_partition == "test"

    def test_read_external_missing_column(self, tmp_path):
        path = tmp_path / "bad.jsonl"
        path.write_text('{"patch": "x"}\n')
        with pytest.raises(SchemaError) as exc_info:
            list(read_external_jsonl(path, "patch", "msg"))
        assert exc_info.value.line == 1
