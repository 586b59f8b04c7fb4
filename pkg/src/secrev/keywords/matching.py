"""Lexical security-keyword matching over commit messages.

Matching is case-insensitive on word boundaries: a token is a maximal run
of letters/digits, and multi-word keywords must appear as adjacent token
sequences. This deliberately avoids substring hits ("ssl" never matches
inside "classless").
"""

import hashlib
from pathlib import Path
from typing import Iterable, Sequence

from secrev.kernels import tokenize


class KeywordMatcher:
    """Precompiled matcher for one keyword list; safe for concurrent use."""

    def __init__(self, keywords: Iterable[str]):
        self._index: dict[str, list[tuple[tuple[str, ...], str]]] = {}
        self.keywords: list[str] = []
        seen = set()
        for raw in keywords:
            text = raw.strip().lower()
            if not text or text in seen:
                continue
            tokens = tuple(tokenize(text))
            if not tokens:
                continue
            seen.add(text)
            self.keywords.append(text)
            self._index.setdefault(tokens[0], []).append((tokens, text))

    def match(self, message: str) -> set[str]:
        """Return the keyword texts present in the message."""
        tokens = tokenize(message)
        if not tokens:
            return set()
        matched: set[str] = set()
        for i, token in enumerate(tokens):
            for ktokens, ktext in self._index.get(token, ()):
                if ktext in matched:
                    continue
                if tuple(tokens[i:i + len(ktokens)]) == ktokens:
                    matched.add(ktext)
        return matched


def match_keywords(message: str, keywords: Sequence) -> set[str]:
    """One-shot match; keywords may be strings or objects with a .text field."""
    texts = [k if isinstance(k, str) else k.text for k in keywords]
    return KeywordMatcher(texts).match(message)


def load_keyword_file(path: str | Path) -> list[str]:
    """Read a keyword list: one lowercase keyword per line, '#' comments."""
    keywords = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        line = line.split("#", 1)[0].strip().lower()
        if line:
            keywords.append(line)
    return keywords


def keyword_list_version(path: str | Path) -> str:
    """Content hash of a keyword file, recorded in dataset manifests."""
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()
