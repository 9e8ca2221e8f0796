"""Deterministic feature templates, hashed into a fixed-dimension sparse space.

CRC32 is the bucket hash: stable across runs and platforms, cheap, and good
enough at 2^18 buckets for desk-scale corpora.
"""

from __future__ import annotations

import zlib
from typing import Iterable, Sequence

import numpy as np
from scipy.sparse import csr_matrix

SPAN_FEATURE_SPEC = "span-hash-v1"
PAIR_FEATURE_SPEC = "pair-hash-v1"

BOS = "<BOS>"
EOS = "<EOS>"


def token_shape(token: str) -> str:
    """Character-class shape: uppercase -> X, lowercase -> x, digit -> d."""
    return "".join(
        "X" if c.isupper() else "x" if c.islower() else "d" if c.isdigit() else c
        for c in token
    )


def _length_bucket(length: int) -> str:
    if length <= 4:
        return str(length)
    if length <= 8:
        return "5-8"
    return "9+"


def _distance_bucket(gap: int) -> str:
    if gap <= 3:
        return str(gap)
    if gap <= 7:
        return "4-7"
    return "8+"


def span_features(tokens: Sequence[str], pos: Sequence[str], i: int, j: int) -> list[str]:
    """Feature strings for the token range [i, j) of a sentence."""
    inside = tokens[i:j]
    feats = [f"tok={t.lower()}" for t in inside]
    feats.append(f"first={inside[0].lower()}")
    feats.append(f"last={inside[-1].lower()}")
    feats.extend(f"shape={token_shape(t)}" for t in inside)
    feats.append(f"len={_length_bucket(j - i)}")
    feats.append(f"left={tokens[i - 1].lower()}" if i > 0 else f"left={BOS}")
    feats.append(f"right={tokens[j].lower()}" if j < len(tokens) else f"right={EOS}")
    feats.append("pos=" + "_".join(pos[i:j]))
    return feats


def pair_features(
    tokens: Sequence[str],
    head: tuple[int, int],
    head_type: str,
    tail: tuple[int, int],
    tail_type: str,
) -> list[str]:
    """Feature strings for an ordered (head, tail) entity pair."""
    feats = [
        f"htype={head_type}",
        f"ttype={tail_type}",
        "hsurf=" + "_".join(t.lower() for t in tokens[head[0]:head[1]]),
        "tsurf=" + "_".join(t.lower() for t in tokens[tail[0]:tail[1]]),
    ]
    forward = head <= tail
    feats.append("dir=fwd" if forward else "dir=rev")
    lo, hi = (head[1], tail[0]) if forward else (tail[1], head[0])
    gap = max(0, hi - lo)
    feats.append(f"dist={_distance_bucket(gap)}")
    feats.extend(f"between={tokens[k].lower()}" for k in range(lo, hi) if gap > 0)
    return feats


def hash_features(feats: Iterable[str], dim: int) -> dict[int, float]:
    vec: dict[int, float] = {}
    for feat in feats:
        idx = zlib.crc32(feat.encode("utf-8")) % dim
        vec[idx] = vec.get(idx, 0.0) + 1.0
    return vec


def featurize_span(
    tokens: Sequence[str], pos: Sequence[str], i: int, j: int, dim: int
) -> dict[int, float]:
    """Hashed sparse vector for a span candidate; identical inputs give an
    identical vector."""
    return hash_features(span_features(tokens, pos, i, j), dim)


def build_matrix(feature_lists: Sequence[Iterable[str]], dim: int) -> csr_matrix:
    """Stack hashed feature rows into a CSR matrix, deterministically."""
    indptr = [0]
    indices: list[int] = []
    data: list[float] = []
    for feats in feature_lists:
        row = hash_features(feats, dim)
        for idx in sorted(row):
            indices.append(idx)
            data.append(row[idx])
        indptr.append(len(indices))
    return csr_matrix(
        (np.asarray(data, dtype=np.float64), np.asarray(indices, dtype=np.int64),
         np.asarray(indptr, dtype=np.int64)),
        shape=(len(feature_lists), dim),
    )
