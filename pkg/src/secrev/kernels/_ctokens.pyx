# cython: language_level=3, boundscheck=False, wraparound=False
"""Compiled tokenizer: maximal alphanumeric runs, lowercased.

Py_UNICODE_ISALNUM is the exact predicate behind str.isalnum, and
lowercasing goes through str.lower on the extracted run, so the output is
character-for-character identical to the pure-Python backend.
"""

from cpython.unicode cimport Py_UNICODE_ISALNUM


def tokenize(str text):
    """Split text into lowercased maximal runs of alphanumeric characters."""
    cdef Py_ssize_t i = 0, start
    cdef Py_ssize_t n = len(text)
    cdef list out = []
    cdef Py_UCS4 ch
    while i < n:
        ch = text[i]
        if Py_UNICODE_ISALNUM(ch):
            start = i
            i += 1
            while i < n:
                ch = text[i]
                if not Py_UNICODE_ISALNUM(ch):
                    break
                i += 1
            out.append(text[start:i].lower())
        else:
            i += 1
    return out
