"""Unified-diff parser with strict hunk accounting.

Parses git-style unified diffs into file/hunk structures. Line counts are
validated against the hunk headers; any mismatch raises MalformedDiff with
the byte offset of the offending line, never a silently truncated result.
Unrecognized lines between files (index lines, mode lines) are skipped.
"""

import re
from dataclasses import dataclass

from secrev.errors import MalformedDiff

HUNK_HEADER_RE = re.compile(r"^@@ -(\d+)(?:,(\d+))? \+(\d+)(?:,(\d+))? @@")
GIT_HEADER_RE = re.compile(r'^diff --git (?:"?a/(.*?)"?) (?:"?b/(.*?)"?)$')
BINARY_RE = re.compile(r"^Binary files (.*) and (.*) differ$")

LINE_TAGS = {" ": "context", "+": "add", "-": "del"}


@dataclass(frozen=True)
class Hunk:
    old_start: int
    old_len: int
    new_start: int
    new_len: int
    lines: tuple[tuple[str, str], ...]  # (tag, text)

    def to_dict(self) -> dict:
        return {
            "old_start": self.old_start,
            "old_len": self.old_len,
            "new_start": self.new_start,
            "new_len": self.new_len,
            "lines": [{"tag": tag, "text": text} for tag, text in self.lines],
        }


@dataclass(frozen=True)
class FileDiff:
    old_path: str
    new_path: str
    hunks: tuple[Hunk, ...]
    is_binary: bool = False

    def to_dict(self) -> dict:
        return {
            "old_path": self.old_path,
            "new_path": self.new_path,
            "is_binary": self.is_binary,
            "hunks": [h.to_dict() for h in self.hunks],
        }


def _strip_prefix(path: str) -> str:
    if path.startswith(("a/", "b/")):
        return path[2:]
    return path


class _Parser:
    def __init__(self, text: str):
        self.files: list[FileDiff] = []
        # current file under construction
        self.old_path: str | None = None
        self.new_path: str | None = None
        self.hunks: list[Hunk] = []
        self.is_binary = False
        self.have_file = False
        # open hunk accounting
        self.hunk_header: tuple[int, int, int, int] | None = None
        self.hunk_lines: list[tuple[str, str]] = []
        self.old_left = 0
        self.new_left = 0
        self.pending_minus: str | None = None
        self.in_binary_patch = False
        self.after_hunk = False  # guards against over-long hunks
        self.offset = 0
        self.text = text

    def fail(self, message: str) -> "MalformedDiff":
        return MalformedDiff(message, self.offset)

    def close_hunk(self):
        if self.hunk_header is None:
            return
        if self.old_left or self.new_left:
            raise self.fail(
                f"hunk ended early: {self.old_left} old / {self.new_left} new lines missing")
        old_start, old_len, new_start, new_len = self.hunk_header
        self.hunks.append(Hunk(old_start, old_len, new_start, new_len,
                               tuple(self.hunk_lines)))
        self.hunk_header = None
        self.hunk_lines = []
        self.after_hunk = True

    def close_file(self):
        self.close_hunk()
        if self.pending_minus is not None:
            raise self.fail("'---' header without matching '+++'")
        if self.have_file and (self.hunks or self.is_binary):
            self.files.append(FileDiff(
                old_path=self.old_path or "",
                new_path=self.new_path or "",
                hunks=tuple(self.hunks),
                is_binary=self.is_binary,
            ))
        self.old_path = None
        self.new_path = None
        self.hunks = []
        self.is_binary = False
        self.have_file = False
        self.in_binary_patch = False
        self.after_hunk = False

    def feed_hunk_line(self, line: str):
        if line.startswith("\\"):  # "\ No newline at end of file"
            return
        tag = LINE_TAGS.get(line[:1], "context" if line == "" else None)
        if tag is None:
            raise self.fail(f"unexpected line inside hunk: {line[:30]!r}")
        text = line[1:] if line else ""
        if tag in ("context", "del") and self.old_left == 0:
            raise self.fail("hunk has more old-side lines than its header declares")
        if tag in ("context", "add") and self.new_left == 0:
            raise self.fail("hunk has more new-side lines than its header declares")
        if tag in ("context", "del"):
            self.old_left -= 1
        if tag in ("context", "add"):
            self.new_left -= 1
        self.hunk_lines.append((tag, text))
        if self.old_left == 0 and self.new_left == 0:
            self.close_hunk()

    def feed(self, line: str):
        if self.hunk_header is not None:
            self.feed_hunk_line(line)
            return

        if self.in_binary_patch and not line.startswith("diff --git"):
            return  # base85 payload lines until the next file header

        if self.pending_minus is not None:
            if not line.startswith("+++ "):
                raise self.fail("'---' header without matching '+++'")
            self.old_path = self.pending_minus
            self.new_path = _strip_prefix(line[4:].rstrip("\t"))
            self.pending_minus = None
            return

        git_match = GIT_HEADER_RE.match(line)
        if git_match:
            self.close_file()
            self.old_path = git_match.group(1)
            self.new_path = git_match.group(2)
            self.have_file = True
            return

        if line.startswith("@@"):
            match = HUNK_HEADER_RE.match(line)
            if not match:
                raise self.fail(f"bad hunk header: {line[:40]!r}")
            if not self.have_file:
                raise self.fail("hunk header before any file header")
            if self.is_binary:
                raise self.fail("hunk header in binary file entry")
            old_start = int(match.group(1))
            old_len = int(match.group(2)) if match.group(2) is not None else 1
            new_start = int(match.group(3))
            new_len = int(match.group(4)) if match.group(4) is not None else 1
            if old_len == 0 and new_len == 0:
                raise self.fail("empty hunk (0 old and 0 new lines)")
            self.hunk_header = (old_start, old_len, new_start, new_len)
            self.old_left = old_len
            self.new_left = new_len
            self.after_hunk = False
            return

        if line.startswith("--- "):
            if self.hunks or self.is_binary:
                self.close_file()  # plain diffs separate files with ---/+++ pairs
            self.pending_minus = _strip_prefix(line[4:].rstrip("\t"))
            self.have_file = True
            return

        if line.startswith("+++ "):
            raise self.fail("'+++' header without preceding '---'")

        binary_match = BINARY_RE.match(line)
        if binary_match:
            if not self.have_file:
                self.have_file = True
                self.old_path = _strip_prefix(binary_match.group(1))
                self.new_path = _strip_prefix(binary_match.group(2))
            self.is_binary = True
            return

        if line == "GIT binary patch":
            if self.have_file:
                self.is_binary = True
                self.in_binary_patch = True
            return

        # a hunk-content-looking line right after a completed hunk means the
        # header under-declared its line counts
        if self.after_hunk and line[:1] in (" ", "+", "-"):
            raise self.fail("hunk has more lines than its header declares")
        self.after_hunk = False
        # anything else between files is preamble/extended headers: skipped


def parse_unified_diff(text: str) -> list[FileDiff]:
    """Parse unified-diff text into FileDiff structures.

    Empty input parses to an empty list. Raises MalformedDiff (with byte
    offset) on bad hunk headers or line-count mismatches.
    """
    parser = _Parser(text)
    offset = 0
    for raw in text.splitlines(keepends=True):
        parser.offset = offset
        line = raw.rstrip("\r\n") if raw.endswith(("\r\n", "\n", "\r")) else raw
        parser.feed(line)
        offset += len(raw.encode("utf-8"))
    parser.offset = offset
    parser.close_file()
    return parser.files


def serialize_diff(files: list[FileDiff]) -> str:
    """Re-serialize parsed diffs; inverse of parse_unified_diff up to
    dropped preamble (round-trips hunk structure and line counts)."""
    out: list[str] = []
    prefix_tags = {"context": " ", "add": "+", "del": "-"}
    for file in files:
        if file.is_binary:
            out.append(f"Binary files a/{file.old_path} and b/{file.new_path} differ")
            continue
        out.append(f"--- a/{file.old_path}")
        out.append(f"+++ b/{file.new_path}")
        for hunk in file.hunks:
            out.append(f"@@ -{hunk.old_start},{hunk.old_len} "
                       f"+{hunk.new_start},{hunk.new_len} @@")
            for tag, text in hunk.lines:
                out.append(prefix_tags[tag] + text)
    return "\n".join(out) + ("\n" if out else "")
