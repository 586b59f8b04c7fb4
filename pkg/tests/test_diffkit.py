"""Diff parser and candidacy tests."""

from datetime import datetime, timezone

import pytest
from hypothesis import given
from hypothesis import strategies as st

from secrev.diffkit import (
    FunnelReport,
    filter_candidates,
    judge_candidacy,
    parse_unified_diff,
    serialize_diff,
)
from secrev.errors import MalformedDiff
from secrev.mining.types import ChangedFile, CommitRecord

TS = datetime(2024, 5, 1, tzinfo=timezone.utc)


def commit(sha_seed: int, parents: int, files: list[tuple[str, str]]) -> CommitRecord:
    return CommitRecord(
        repo="acme/widget",
        sha=f"{sha_seed:040x}",
        message=f"commit {sha_seed}",
        parent_count=parents,
        changed_files=tuple(ChangedFile(p, k) for p, k in files),
        authored_at=TS,
    )


ONE_HUNK_DIFF = """\
--- a/src/main/Auth.java
+++ b/src/main/Auth.java
@@ -1,2 +1,3 @@
 import java.util.List;
 import java.util.Map;
+import java.security.MessageDigest;
"""

GIT_STYLE_DIFF = """\
diff --git a/src/Parser.java b/src/Parser.java
index 1234567..89abcde 100644
--- a/src/Parser.java
+++ b/src/Parser.java
@@ -10,3 +10,4 @@ public class Parser {
     void parse() {
-        eval(input);
+        validate(input);
+        eval(input);
     }
"""

BINARY_DIFF = """\
diff --git a/logo.png b/logo.png
index 1234567..89abcde 100644
Binary files a/logo.png and b/logo.png differ
"""


class TestParse:
    def test_empty_string(self):
        assert parse_unified_diff("") == []

    def test_one_hunk_hand_counted(self):
        files = parse_unified_diff(ONE_HUNK_DIFF)
        assert len(files) == 1
        file = files[0]
        assert file.old_path == "src/main/Auth.java"
        assert file.new_path == "src/main/Auth.java"
        assert not file.is_binary
        assert len(file.hunks) == 1
        hunk = file.hunks[0]
        assert (hunk.old_start, hunk.old_len, hunk.new_start, hunk.new_len) == (1, 2, 1, 3)
        assert [tag for tag, _ in hunk.lines] == ["context", "context", "add"]

    def test_git_style_diff(self):
        files = parse_unified_diff(GIT_STYLE_DIFF)
        assert len(files) == 1
        hunk = files[0].hunks[0]
        assert hunk.old_len == 3 and hunk.new_len == 4
        tags = [tag for tag, _ in hunk.lines]
        assert tags == ["context", "del", "add", "add", "context"]

    def test_single_line_change_has_one_hunk_marker(self):
        assert ONE_HUNK_DIFF.count("@@") == 2  # one header, two markers
        files = parse_unified_diff(ONE_HUNK_DIFF)
        assert sum(len(f.hunks) for f in files) == 1

    def test_binary_marker_no_text_hunks(self):
        files = parse_unified_diff(BINARY_DIFF)
        assert len(files) == 1
        assert files[0].is_binary
        assert files[0].hunks == ()

    def test_undercount_is_malformed(self):
        bad = "--- a/f\n+++ b/f\n@@ -1,5 +1,5 @@\n ctx\n ctx\n ctx\n"
        with pytest.raises(MalformedDiff) as exc_info:
            parse_unified_diff(bad)
        assert exc_info.value.offset >= 0

    def test_overcount_is_malformed(self):
        bad = "--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n ctx\n ctx\n"
        with pytest.raises(MalformedDiff):
            parse_unified_diff(bad)

    def test_bad_hunk_header_offset(self):
        bad = "--- a/f\n+++ b/f\n@@ -x,1 +1,1 @@\n ctx\n"
        with pytest.raises(MalformedDiff) as exc_info:
            parse_unified_diff(bad)
        assert exc_info.value.offset == len("--- a/f\n+++ b/f\n")

    def test_hunk_before_header_rejected(self):
        with pytest.raises(MalformedDiff):
            parse_unified_diff("@@ -1,1 +1,1 @@\n ctx\n")

    def test_two_plain_files(self):
        text = ("--- a/f1\n+++ b/f1\n@@ -1,1 +1,1 @@\n-x\n+y\n"
                "--- a/f2\n+++ b/f2\n@@ -2,1 +2,2 @@\n ctx\n+z\n")
        files = parse_unified_diff(text)
        assert [f.new_path for f in files] == ["f1", "f2"]
        assert [len(f.hunks) for f in files] == [1, 1]

    def test_no_newline_marker_ignored(self):
        text = "--- a/f\n+++ b/f\n@@ -1,1 +1,1 @@\n-x\n\\ No newline at end of file\n+y\n"
        files = parse_unified_diff(text)
        assert [tag for tag, _ in files[0].hunks[0].lines] == ["del", "add"]

    def test_round_trip_preserves_structure(self):
        for text in (ONE_HUNK_DIFF, GIT_STYLE_DIFF, BINARY_DIFF):
            parsed = parse_unified_diff(text)
            assert parse_unified_diff(serialize_diff(parsed)) == parsed

    @given(st.text(max_size=400))
    def test_fuzz_never_crashes(self, text):
        try:
            files = parse_unified_diff(text)
        except MalformedDiff:
            return
        # whatever parsed must satisfy the hunk accounting invariant
        for file in files:
            for hunk in file.hunks:
                old = sum(1 for tag, _ in hunk.lines if tag in ("context", "del"))
                new = sum(1 for tag, _ in hunk.lines if tag in ("context", "add"))
                assert old == hunk.old_len
                assert new == hunk.new_len

    @given(st.binary(max_size=300))
    def test_fuzz_bytes_decoded(self, blob):
        text = blob.decode("utf-8", errors="replace")
        try:
            parse_unified_diff(text)
        except MalformedDiff:
            pass


class TestCandidacy:
    def test_merge_commit(self):
        verdict = judge_candidacy(commit(1, 2, [("src/A.java", "modified")]))
        assert verdict.reason == "MergeCommit" and not verdict.accepted

    def test_single_java_source_ok(self):
        verdict = judge_candidacy(commit(2, 1, [("src/main/Auth.java", "modified")]))
        assert verdict.accepted and verdict.reason == "OK"

    def test_test_substring_case_insensitive(self):
        assert judge_candidacy(commit(3, 1, [("src/AuthTest.java", "modified")])).reason == "TestFile"
        assert judge_candidacy(commit(4, 1, [("src/TESTS/Auth.java", "added")])).reason == "TestFile"

    def test_multi_file(self):
        files = [("src/A.java", "modified"), ("src/B.java", "modified")]
        assert judge_candidacy(commit(5, 1, files)).reason == "MultiFile"

    def test_not_java(self):
        assert judge_candidacy(commit(6, 1, [("README.md", "modified")])).reason == "NotJava"

    def test_deleted_and_renamed_not_source(self):
        assert judge_candidacy(commit(7, 1, [("src/A.java", "deleted")])).reason == "NotSource"
        assert judge_candidacy(commit(8, 1, [("src/A.java", "renamed")])).reason == "NotSource"

    def test_rule_order_merge_beats_multifile(self):
        files = [("a.md", "modified"), ("b.md", "modified")]
        assert judge_candidacy(commit(9, 3, files)).reason == "MergeCommit"

    def test_rule_order_extension_beats_test(self):
        # "tests/util.py" fails the extension rule before the test rule
        assert judge_candidacy(commit(10, 1, [("tests/util.py", "modified")])).reason == "NotJava"

    def test_pure_function(self):
        c = commit(11, 1, [("src/A.java", "modified")])
        assert judge_candidacy(c) == judge_candidacy(c)


def funnel_fixture_commits() -> list[CommitRecord]:
    """The shipped 10-commit fixture: 3 OK, 2 merge, 3 multi-file, 1 test, 1 non-Java."""
    return [
        commit(101, 1, [("src/main/Auth.java", "modified")]),            # OK
        commit(102, 1, [("core/Crypto.java", "modified")]),              # OK
        commit(103, 1, [("util/Escape.java", "added")]),                 # OK
        commit(104, 2, [("src/main/Auth.java", "modified")]),            # merge
        commit(105, 3, [("core/Crypto.java", "modified")]),              # merge
        commit(106, 1, [("a/A.java", "modified"), ("b/B.java", "modified")]),       # multi
        commit(107, 1, [("a/A.java", "modified"), ("README.md", "modified")]),      # multi
        commit(108, 1, []),                                              # multi (zero files)
        commit(109, 1, [("src/test/AuthTest.java", "modified")]),        # test file
        commit(110, 1, [("docs/setup.md", "modified")]),                 # non-Java
    ]


class TestFunnel:
    def test_ten_commit_fixture(self):
        accepted, report = filter_candidates(funnel_fixture_commits())
        accepted = list(accepted)
        assert len(accepted) == 3
        assert report.to_dict() == {
            "OK": 3, "MergeCommit": 2, "MultiFile": 3, "TestFile": 1,
            "NotJava": 1, "NotSource": 0,
        }
        assert report.total == 10
        assert report.accepted == 3

    def test_empty_stream(self):
        accepted, report = filter_candidates([])
        assert list(accepted) == []
        assert report.total == 0
        assert all(v == 0 for v in report.to_dict().values())

    def test_only_merges(self):
        commits = [commit(i, 2, [("src/A.java", "modified")]) for i in range(5)]
        accepted, report = filter_candidates(commits)
        assert list(accepted) == []
        assert report.counts["MergeCommit"] == 5

    @given(st.lists(st.tuples(
        st.integers(min_value=0, max_value=3),
        st.sampled_from([
            [("src/A.java", "modified")],
            [("src/ATest.java", "modified")],
            [("readme.md", "modified")],
            [("a.java", "modified"), ("b.java", "modified")],
            [("src/A.java", "deleted")],
        ])), max_size=40))
    def test_counts_partition_input(self, specs):
        commits = [commit(1000 + i, parents, files) for i, (parents, files) in enumerate(specs)]
        accepted, report = filter_candidates(commits)
        accepted = list(accepted)
        assert report.total == len(commits)
        assert len(accepted) == report.accepted
        assert len(accepted) <= len(commits)
