"""Sentence-level BLEU-4 with add-one smoothing and brevity penalty.

The evaluation sets here are tens of samples, where unsmoothed BLEU-4
collapses to zero as soon as one n-gram order has no match, so any order
whose clipped match count is zero is smoothed as (matches+1)/(total+1).
Single reference per candidate, matching the dataset shape.
"""

import math
import re
from collections import Counter
from dataclasses import dataclass

from secrev.errors import EmptyCandidate, EmptyReference

MAX_ORDER = 4


@dataclass(frozen=True)
class BleuScore:
    score: float
    n_gram_precisions: tuple[float, float, float, float]
    brevity_penalty: float
    candidate_len: int
    reference_len: int


def _ngram_counts(tokens: list[str], n: int) -> Counter:
    return Counter(tuple(tokens[i:i + n]) for i in range(len(tokens) - n + 1))


def bleu4(candidate: list[str], reference: list[str]) -> BleuScore:
    """Score a candidate token list against a single reference token list.

    Precisions are clipped (modified) n-gram precisions for n = 1..4; any
    order with zero matches uses add-one smoothing; brevity penalty is
    exp(1 - r/c) when the candidate is shorter than the reference, else 1.
    """
    if not candidate:
        raise EmptyCandidate("candidate token list is empty")
    if not reference:
        raise EmptyReference("reference token list is empty")

    precisions: list[float] = []
    for n in range(1, MAX_ORDER + 1):
        cand = _ngram_counts(candidate, n)
        ref = _ngram_counts(reference, n)
        matched = sum(min(count, ref[gram]) for gram, count in cand.items())
        total = sum(cand.values())
        if matched == 0:
            precisions.append((matched + 1) / (total + 1))
        else:
            precisions.append(matched / total)

    c, r = len(candidate), len(reference)
    bp = 1.0 if c >= r else math.exp(1.0 - r / c)
    score = bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER)
    return BleuScore(
        score=score,
        n_gram_precisions=tuple(precisions),
        brevity_penalty=bp,
        candidate_len=c,
        reference_len=r,
    )


def corpus_bleu4(pairs: list[tuple[list[str], list[str]]]) -> float:
    """Corpus-level BLEU-4: n-gram counts pooled over all pairs.

    Same smoothing rule as bleu4, applied to the pooled counts.
    """
    if not pairs:
        raise EmptyCandidate("no candidate/reference pairs")
    matched = [0] * MAX_ORDER
    total = [0] * MAX_ORDER
    c_len = 0
    r_len = 0
    for candidate, reference in pairs:
        if not candidate:
            raise EmptyCandidate("candidate token list is empty")
        if not reference:
            raise EmptyReference("reference token list is empty")
        c_len += len(candidate)
        r_len += len(reference)
        for n in range(1, MAX_ORDER + 1):
            cand = _ngram_counts(candidate, n)
            ref = _ngram_counts(reference, n)
            matched[n - 1] += sum(min(count, ref[gram]) for gram, count in cand.items())
            total[n - 1] += sum(cand.values())
    precisions = [
        (m + 1) / (t + 1) if m == 0 else m / t
        for m, t in zip(matched, total)
    ]
    bp = 1.0 if c_len >= r_len else math.exp(1.0 - r_len / c_len)
    return bp * math.exp(sum(math.log(p) for p in precisions) / MAX_ORDER)


# Backtick spans survive as single tokens so identifier mentions like
# `strncpy` stay intact; outside of them, words and individual punctuation
# marks are separate tokens.
_TOKEN_RE = re.compile(r"`[^`]*`|\w+|[^\w\s]")


def tokenize_review(text: str) -> list[str]:
    """Lowercase and tokenize review text for BLEU."""
    return [m.group(0).lower() for m in _TOKEN_RE.finditer(text)]
