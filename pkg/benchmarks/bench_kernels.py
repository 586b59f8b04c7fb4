#!/usr/bin/env python3
"""Benchmark the compiled tokenizer against the pure-Python fallback.

The keyword filter tokenizes every mined commit message (millions at full
scale), so this is the pipeline's hot CPU loop. Run:

    python benchmarks/bench_kernels.py [n_messages]
"""

import random
import sys
import time

from secrev.kernels import BACKEND, _pytokens

try:
    from secrev.kernels import _ctokens
except ImportError:
    _ctokens = None

from secrev.keywords.matching import KeywordMatcher

WORDS = (
    "fix bug update security vulnerability overflow in the for handler parser "
    "escape unsafe input sql injection xss csrf refactor rename cleanup tests "
    "add remove merge branch release version bump CVE-2024-1234 auth token"
).split()


def synth_messages(n: int, seed: int = 42) -> list[str]:
    rng = random.Random(seed)
    return [
        " ".join(rng.choices(WORDS, k=rng.randint(4, 18)))
        for _ in range(n)
    ]


def bench(label, fn, messages) -> float:
    start = time.perf_counter()
    total_tokens = 0
    for message in messages:
        total_tokens += len(fn(message))
    elapsed = time.perf_counter() - start
    rate = len(messages) / elapsed
    print(f"{label:24s} {elapsed:8.3f}s  {rate:12,.0f} msg/s  "
          f"({total_tokens:,} tokens)")
    return elapsed


def main():
    n = int(sys.argv[1]) if len(sys.argv) > 1 else 200_000
    messages = synth_messages(n)
    print(f"tokenizing {n:,} synthetic commit messages "
          f"(selected backend: {BACKEND})\n")

    py_time = bench("pure python", _pytokens.tokenize, messages)
    if _ctokens is not None:
        c_time = bench("cython", _ctokens.tokenize, messages)
        sample = messages[: min(5000, n)]
        mismatches = sum(_pytokens.tokenize(m) != _ctokens.tokenize(m)
                         for m in sample)
        print(f"\nspeedup: {py_time / c_time:.1f}x; "
              f"output mismatches on {len(sample):,} samples: {mismatches}")
    else:
        print("\ncython backend not built; only the fallback was measured")

    matcher = KeywordMatcher(["security", "sql injection", "xss", "overflow",
                              "csrf", "unsafe", "escape", "vulnerability"])
    start = time.perf_counter()
    hits = sum(1 for m in messages if matcher.match(m))
    elapsed = time.perf_counter() - start
    print(f"\nend-to-end keyword filter ({BACKEND} backend): "
          f"{len(messages) / elapsed:,.0f} msg/s, {hits:,} matches")


if __name__ == "__main__":
    main()
