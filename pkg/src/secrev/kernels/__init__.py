"""Tokenizer kernel with backend selection.

The keyword filter tokenizes every mined commit message, which at full
mining scale means millions of calls, so the inner loop ships as a compiled
Cython extension. A pure-Python implementation with identical semantics is
selected at import when the extension is unavailable, or when the
SECREV_PURE_PYTHON environment variable is set (useful for benchmarking and
for verifying equivalence).

A token is a maximal run of alphanumeric characters (``str.isalnum``),
lowercased. Both backends delegate lowercasing to ``str.lower`` so their
outputs are identical on every input.
"""

import os

from . import _pytokens

if os.environ.get("SECREV_PURE_PYTHON"):
    _impl = _pytokens
    BACKEND = "python"
else:
    try:
        from . import _ctokens as _impl  # type: ignore[no-redef]

        BACKEND = "c"
    except ImportError:
        _impl = _pytokens
        BACKEND = "python"

tokenize = _impl.tokenize

__all__ = ["tokenize", "BACKEND"]
