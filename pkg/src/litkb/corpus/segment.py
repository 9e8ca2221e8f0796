"""Rule-based sentence segmentation and tokenization.

Both are deterministic and library-free. The sentence splitter breaks after
terminal punctuation (. ! ?) followed by whitespace and an uppercase letter or
digit, with two guards: no split after a single-capital-letter abbreviation
("J. Smith", "U.S.") and no split inside a number ("pH 3.5").
"""

from __future__ import annotations

import string

_TERMINALS = ".!?"
_PUNCT = set(string.punctuation)


def _is_abbrev_period(text: str, i: int) -> bool:
    # Single capital letter directly before the period, itself preceded by
    # a non-letter (start of text, whitespace or another period).
    if text[i] != ".":
        return False
    if i == 0 or not text[i - 1].isupper():
        return False
    return i - 1 == 0 or not text[i - 2].isalpha()


def segment_sentences(text: str) -> list[tuple[int, int]]:
    """Split paragraph text into sentence spans.

    Returns (start, end) character offsets; spans cover exactly the
    non-whitespace content, in increasing order. Empty or whitespace-only
    text yields [].
    """
    n = len(text)
    boundaries: list[int] = []  # index one past the terminal punctuation
    for i, ch in enumerate(text):
        if ch not in _TERMINALS:
            continue
        j = i + 1
        if j >= n or not text[j].isspace():
            continue  # also keeps "3.5" intact: no whitespace after the dot
        k = j
        while k < n and text[k].isspace():
            k += 1
        if k >= n:
            continue  # trailing whitespace; final span closes at text end
        if not (text[k].isupper() or text[k].isdigit()):
            continue
        if _is_abbrev_period(text, i):
            continue
        boundaries.append(i + 1)

    spans: list[tuple[int, int]] = []
    cursor = 0
    for b in boundaries:
        start = cursor
        while start < b and text[start].isspace():
            start += 1
        if start < b:
            spans.append((start, b))
        cursor = b
    # final sentence: from cursor to the last non-whitespace character
    start = cursor
    while start < n and text[start].isspace():
        start += 1
    end = n
    while end > start and text[end - 1].isspace():
        end -= 1
    if start < end:
        spans.append((start, end))
    return spans


def tokenize(text: str, offset: int = 0) -> list[tuple[int, int]]:
    """Split sentence text into token spans.

    Splits on whitespace, then peels leading/trailing punctuation characters
    into their own single-character tokens. Interior punctuation (hyphens,
    "3.5", "e.g") stays attached. ``offset`` shifts the returned spans so they
    can be expressed relative to the paragraph.
    """
    spans: list[tuple[int, int]] = []
    i = 0
    n = len(text)
    while i < n:
        if text[i].isspace():
            i += 1
            continue
        j = i
        while j < n and not text[j].isspace():
            j += 1
        spans.extend(_split_chunk(text, i, j))
        i = j
    return [(s + offset, e + offset) for s, e in spans]


def _split_chunk(text: str, start: int, end: int) -> list[tuple[int, int]]:
    lo, hi = start, end
    leading: list[tuple[int, int]] = []
    trailing: list[tuple[int, int]] = []
    while lo < hi and text[lo] in _PUNCT:
        leading.append((lo, lo + 1))
        lo += 1
    while hi > lo and text[hi - 1] in _PUNCT:
        trailing.append((hi - 1, hi))
        hi -= 1
    core = [(lo, hi)] if lo < hi else []
    return leading + core + list(reversed(trailing))
