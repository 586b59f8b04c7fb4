"""Pure-Python tokenizer, the reference the compiled backend must match."""

from itertools import groupby


def tokenize(text: str) -> list[str]:
    """Split text into lowercased maximal runs of alphanumeric characters."""
    return ["".join(run).lower() for alnum, run in groupby(text, str.isalnum) if alnum]
