"""Corpus data model and the newline-delimited corpus file format.

Offsets are character (Unicode scalar) offsets. Token and sentence spans are
relative to the owning paragraph's text.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Iterator


@dataclass(frozen=True)
class Token:
    """A token span into paragraph text; ``surface == text[start:end]``."""

    start: int
    end: int
    surface: str
    pos: str | None = None

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"empty token span ({self.start}, {self.end})")


@dataclass(frozen=True)
class Sentence:
    sent_id: str
    start: int
    end: int
    tokens: tuple[Token, ...]


@dataclass(frozen=True)
class Paragraph:
    para_id: str
    text: str
    sentences: tuple[Sentence, ...]
    source_section: str | None = None


@dataclass(frozen=True)
class Metadata:
    title: str = ""
    authors: tuple[str, ...] = ()
    year: int | None = None


@dataclass(frozen=True)
class Document:
    doc_id: str
    metadata: Metadata = field(default_factory=Metadata)
    paragraphs: tuple[Paragraph, ...] = ()

    def paragraph(self, para_id: str) -> Paragraph:
        for para in self.paragraphs:
            if para.para_id == para_id:
                return para
        raise KeyError(para_id)

    def check_offsets(self) -> None:
        """Assert offset integrity over the whole document.

        Every token surface must equal the paragraph slice at its span;
        sentence and token spans must be increasing and non-overlapping.
        """
        for para in self.paragraphs:
            prev_end = 0
            for sent in para.sentences:
                if not (0 <= sent.start <= sent.end <= len(para.text)):
                    raise AssertionError(f"{sent.sent_id}: span outside paragraph")
                if sent.start < prev_end:
                    raise AssertionError(f"{sent.sent_id}: overlaps previous sentence")
                prev_end = sent.end
                tok_end = sent.start
                for tok in sent.tokens:
                    if tok.start < tok_end or tok.end > sent.end:
                        raise AssertionError(f"{sent.sent_id}: token out of order")
                    if para.text[tok.start:tok.end] != tok.surface:
                        raise AssertionError(
                            f"{sent.sent_id}: surface mismatch at ({tok.start}, {tok.end})"
                        )
                    tok_end = tok.end


def document_to_dict(doc: Document) -> dict:
    return {
        "doc_id": doc.doc_id,
        "metadata": {
            "title": doc.metadata.title,
            "authors": list(doc.metadata.authors),
            "year": doc.metadata.year,
        },
        "paragraphs": [
            {
                "para_id": p.para_id,
                "text": p.text,
                "source_section": p.source_section,
                "sentences": [
                    {
                        "sent_id": s.sent_id,
                        "span": [s.start, s.end],
                        "tokens": [
                            {"span": [t.start, t.end], "surface": t.surface, "pos": t.pos}
                            for t in s.tokens
                        ],
                    }
                    for s in p.sentences
                ],
            }
            for p in doc.paragraphs
        ],
    }


def document_from_dict(obj: dict) -> Document:
    meta = obj.get("metadata") or {}
    return Document(
        doc_id=obj["doc_id"],
        metadata=Metadata(
            title=meta.get("title", ""),
            authors=tuple(meta.get("authors") or ()),
            year=meta.get("year"),
        ),
        paragraphs=tuple(
            Paragraph(
                para_id=p["para_id"],
                text=p["text"],
                source_section=p.get("source_section"),
                sentences=tuple(
                    Sentence(
                        sent_id=s["sent_id"],
                        start=s["span"][0],
                        end=s["span"][1],
                        tokens=tuple(
                            Token(
                                start=t["span"][0],
                                end=t["span"][1],
                                surface=t["surface"],
                                pos=t.get("pos"),
                            )
                            for t in s["tokens"]
                        ),
                    )
                    for s in p["sentences"]
                ),
            )
            for p in obj["paragraphs"]
        ),
    )


def save_corpus(docs: Iterable[Document], fp: IO[str]) -> None:
    """Write one JSON object per document, newline-delimited, UTF-8."""
    for doc in docs:
        fp.write(json.dumps(document_to_dict(doc), ensure_ascii=False, sort_keys=True))
        fp.write("\n")


def load_corpus(fp: IO[str]) -> Iterator[Document]:
    for line in fp:
        line = line.strip()
        if line:
            yield document_from_dict(json.loads(line))


def save_corpus_file(docs: Iterable[Document], path: str) -> None:
    with open(path, "w", encoding="utf-8") as fp:
        save_corpus(docs, fp)


def load_corpus_file(path: str) -> list[Document]:
    with open(path, "r", encoding="utf-8") as fp:
        return list(load_corpus(fp))
