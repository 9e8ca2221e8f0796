"""Canonical corpus model and document ingestion.

Turns structured document sources (TEI-like XML or plain text) into the
Document -> Paragraph -> Sentence -> Token hierarchy with stable ids and
character offsets (Unicode scalar values, paragraph-relative).
"""

from litkb.corpus.model import (
    Document,
    Metadata,
    Paragraph,
    Sentence,
    Token,
    load_corpus,
    load_corpus_file,
    save_corpus,
    save_corpus_file,
)
from litkb.corpus.segment import segment_sentences, tokenize
from litkb.corpus.pos import POS_TAGS, heuristic_tagger, pos_tag
from litkb.corpus.ingest import IngestError, ingest_structured

__all__ = [
    "Document",
    "Metadata",
    "Paragraph",
    "Sentence",
    "Token",
    "IngestError",
    "POS_TAGS",
    "heuristic_tagger",
    "ingest_structured",
    "load_corpus",
    "load_corpus_file",
    "pos_tag",
    "save_corpus",
    "save_corpus_file",
    "segment_sentences",
    "tokenize",
]
