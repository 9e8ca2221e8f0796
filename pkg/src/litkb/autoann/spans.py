"""Span candidate enumeration and nested decoding.

Decoding keeps every candidate scoring at or above the threshold unless it
*crosses* (partially overlaps) an already-accepted span; nesting and
disjointness are allowed, so nested entity structures survive.
"""

from __future__ import annotations

from typing import Sequence


def enumerate_spans(n_tokens: int, l_max: int) -> list[tuple[int, int]]:
    """All token ranges [i, j) with 1 <= j - i <= l_max, lexicographic.

    Candidate count is sum over k = 1..min(l_max, n) of (n - k + 1).
    """
    if l_max < 1:
        raise ValueError("l_max must be >= 1")
    return [
        (i, j)
        for i in range(n_tokens)
        for j in range(i + 1, min(i + l_max, n_tokens) + 1)
    ]


def crosses(a: tuple[int, int], b: tuple[int, int]) -> bool:
    """True iff the ranges partially overlap without containment."""
    return a[0] < b[0] < a[1] < b[1] or b[0] < a[0] < b[1] < a[1]


def decode_nested(
    scored: Sequence[tuple[tuple[int, int], float]], tau: float
) -> list[tuple[int, int]]:
    """Greedy selection by descending score (ties: earlier start, then longer
    span); a candidate is accepted iff it crosses no accepted span.

    Returns the accepted ranges sorted by start offset.
    """
    kept = [(rng, score) for rng, score in scored if score >= tau]
    kept.sort(key=lambda item: (-item[1], item[0][0], item[0][0] - item[0][1]))
    accepted: list[tuple[int, int]] = []
    for rng, _ in kept:
        if rng in accepted:
            continue
        if not any(crosses(rng, other) for other in accepted):
            accepted.append(rng)
    return sorted(accepted)
