"""Paragraph embedding, vector index and exact top-k cosine retrieval.

The default embedder is a hashed term-frequency model with sign hashing
(deterministic, dependency-free); it is pluggable, so a neural sentence
embedder can be dropped in behind the same interface. Vectors are
L2-normalized, so cosine similarity is a dot product. Search is an exact
scan: corpora are hundreds of paragraphs, and exactness keeps the oracle
trivial.

Index dump format (UTF-8 text): a header line ``VIDX\\t<dim>\\t<embedder_id>``
followed by one ``<para_id>\\t<v1> <v2> ...`` record per paragraph, floats in
shortest round-trip repr.
"""

from __future__ import annotations

import re
import zlib
from dataclasses import dataclass, field
from typing import IO, Callable, Sequence

import numpy as np

from litkb.corpus.model import Document

DEFAULT_DIM = 256

Embedder = Callable[[str], np.ndarray]


class IndexMismatchError(Exception):
    """Merging or querying with an incompatible dimension/embedder."""


class IndexLoadError(Exception):
    """Corrupt index dump."""


_TOKEN_RE = re.compile(r"[a-z0-9]+")


def _bucket(term: str, dim: int) -> tuple[int, float]:
    idx = zlib.crc32(term.encode("utf-8")) % dim
    sign = 1.0 if zlib.crc32(b"sign:" + term.encode("utf-8")) & 1 else -1.0
    return idx, sign


def embed(text: str, dim: int = DEFAULT_DIM) -> np.ndarray:
    """Hashed-TF embedding: lowercase, tokenize, hash tokens and token
    bigrams with sign hashing, L2-normalize. Empty text gives a zero vector."""
    vec = np.zeros(dim, dtype=np.float64)
    tokens = _TOKEN_RE.findall(text.lower())
    for term in tokens:
        idx, sign = _bucket(term, dim)
        vec[idx] += sign
    for a, b in zip(tokens, tokens[1:]):
        idx, sign = _bucket(f"{a}_{b}", dim)
        vec[idx] += sign
    norm = float(np.linalg.norm(vec))
    if norm > 0.0:
        vec /= norm
    return vec


def default_embedder_id(dim: int) -> str:
    return f"hashtf-v1-d{dim}"


@dataclass
class VectorIndex:
    dim: int
    embedder_id: str
    entries: dict[str, np.ndarray] = field(default_factory=dict)

    def add(self, para_id: str, vector: np.ndarray) -> None:
        if vector.shape != (self.dim,):
            raise IndexMismatchError(
                f"vector of dimension {vector.shape} in index of dimension {self.dim}"
            )
        self.entries[para_id] = np.asarray(vector, dtype=np.float64)

    def merge(self, other: "VectorIndex") -> None:
        if other.dim != self.dim or other.embedder_id != self.embedder_id:
            raise IndexMismatchError(
                f"cannot merge index ({other.dim}, {other.embedder_id!r}) into "
                f"({self.dim}, {self.embedder_id!r})"
            )
        self.entries.update(other.entries)


@dataclass(frozen=True)
class RetrievalHit:
    para_id: str
    score: float


def index_paragraphs(
    corpus: Sequence[Document],
    dim: int = DEFAULT_DIM,
    embedder: Embedder | None = None,
    embedder_id: str | None = None,
) -> VectorIndex:
    """One entry per paragraph; deterministic, so re-indexing is idempotent."""
    if embedder is None:
        embedder = lambda text: embed(text, dim)  # noqa: E731
        embedder_id = embedder_id or default_embedder_id(dim)
    elif embedder_id is None:
        raise ValueError("a custom embedder needs an explicit embedder_id")
    index = VectorIndex(dim=dim, embedder_id=embedder_id)
    for doc in corpus:
        for para in doc.paragraphs:
            index.add(para.para_id, embedder(para.text))
    return index


def top_k(
    index: VectorIndex,
    query: str,
    k: int,
    embedder: Embedder | None = None,
) -> list[RetrievalHit]:
    """The k highest-cosine entries (fewer if the index is smaller), sorted
    by descending score with ties broken by para_id."""
    if k < 1:
        raise ValueError("k must be >= 1")
    if not index.entries:
        return []
    if embedder is None:
        if index.embedder_id != default_embedder_id(index.dim):
            raise IndexMismatchError(
                f"index was built with embedder {index.embedder_id!r}; pass it in"
            )
        embedder = lambda text: embed(text, index.dim)  # noqa: E731
    q = embedder(query)
    ids = sorted(index.entries)
    matrix = np.stack([index.entries[pid] for pid in ids])
    scores = matrix @ q
    order = sorted(range(len(ids)), key=lambda i: (-scores[i], ids[i]))
    return [RetrievalHit(para_id=ids[i], score=float(scores[i])) for i in order[:k]]


def save_index(index: VectorIndex, fp: IO[str]) -> None:
    fp.write(f"VIDX\t{index.dim}\t{index.embedder_id}\n")
    for para_id in sorted(index.entries):
        values = " ".join(repr(float(x)) for x in index.entries[para_id])
        fp.write(f"{para_id}\t{values}\n")


def load_index(fp: IO[str]) -> VectorIndex:
    header = fp.readline().rstrip("\n")
    parts = header.split("\t")
    if len(parts) != 3 or parts[0] != "VIDX":
        raise IndexLoadError("record 1: bad header")
    try:
        dim = int(parts[1])
    except ValueError as exc:
        raise IndexLoadError(f"record 1: bad dimension: {parts[1]!r}") from exc
    index = VectorIndex(dim=dim, embedder_id=parts[2])
    for recno, line in enumerate(fp, start=2):
        line = line.rstrip("\n")
        if not line:
            continue
        fields = line.split("\t")
        if len(fields) != 2:
            raise IndexLoadError(f"record {recno}: malformed entry")
        try:
            vec = np.asarray([float(x) for x in fields[1].split()], dtype=np.float64)
        except ValueError as exc:
            raise IndexLoadError(f"record {recno}: bad float: {exc}") from exc
        if vec.shape != (dim,):
            raise IndexLoadError(
                f"record {recno}: expected {dim} values, got {vec.shape[0]}"
            )
        index.entries[fields[0]] = vec
    return index


def save_index_file(index: VectorIndex, path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        save_index(index, fp)


def load_index_file(path: str) -> VectorIndex:
    with open(path, "r", encoding="utf-8") as fp:
        return load_index(fp)
