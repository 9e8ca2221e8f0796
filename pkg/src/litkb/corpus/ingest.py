"""Ingestion of structured document sources.

Consumes the output of an upstream layout tool: TEI-like XML (paragraph
elements under body) or UTF-8 plain text (blank-line paragraphs). PDF parsing
and layout analysis are out of scope.

Id scheme: doc_id is a content hash of the payload, para and sentence ids are
ordinal suffixes, so re-ingesting the same payload is idempotent.
"""

from __future__ import annotations

import hashlib
import re
import xml.etree.ElementTree as ET

from litkb.corpus.model import Document, Metadata, Paragraph, Sentence, Token
from litkb.corpus.pos import PosTagger, pos_tag
from litkb.corpus.segment import segment_sentences, tokenize

FORMATS = ("tei-xml", "plain-text")

# TEI elements whose paragraph descendants are not body prose
_EXCLUDED_CONTAINERS = {"figure", "table", "note", "listbibl", "ref", "back", "teiheader"}


class IngestError(Exception):
    """Malformed or empty document payload."""


def ingest_structured(
    source: str,
    format: str,
    tagger: PosTagger | None = None,
) -> Document:
    """Build a Document from a structured payload.

    Paragraph text is extracted in document order, then segmented, tokenized
    and POS-tagged. Deterministic: identical payload gives identical ids and
    structure.
    """
    if format == "plain-text":
        blocks = _plain_text_blocks(source)
        metadata = Metadata()
    elif format == "tei-xml":
        blocks, metadata = _tei_blocks(source)
    else:
        raise IngestError(f"unknown format {format!r}")
    if not blocks:
        raise IngestError("empty document: no paragraph content")

    doc_id = hashlib.sha256(source.encode("utf-8")).hexdigest()[:16]
    paragraphs = []
    for ordinal, (text, section) in enumerate(blocks):
        para_id = f"{doc_id}:p{ordinal}"
        paragraphs.append(_build_paragraph(para_id, text, section, tagger))
    return Document(doc_id=doc_id, metadata=metadata, paragraphs=tuple(paragraphs))


def _build_paragraph(
    para_id: str, text: str, section: str | None, tagger: PosTagger | None
) -> Paragraph:
    sentences = []
    for ordinal, (s_start, s_end) in enumerate(segment_sentences(text)):
        spans = tokenize(text[s_start:s_end], offset=s_start)
        surfaces = [text[a:b] for a, b in spans]
        tags = pos_tag(surfaces, tagger)
        tokens = tuple(
            Token(start=a, end=b, surface=surf, pos=tag)
            for (a, b), surf, tag in zip(spans, surfaces, tags)
        )
        sentences.append(
            Sentence(sent_id=f"{para_id}:s{ordinal}", start=s_start, end=s_end, tokens=tokens)
        )
    return Paragraph(
        para_id=para_id, text=text, sentences=tuple(sentences), source_section=section
    )


def _plain_text_blocks(source: str) -> list[tuple[str, str | None]]:
    text = source.replace("\r\n", "\n").replace("\r", "\n")
    blocks = []
    for block in re.split(r"\n\s*\n", text):
        block = block.strip()
        if block:
            blocks.append((block, None))
    return blocks


def _local(tag: str) -> str:
    return tag.rsplit("}", 1)[-1].lower()


def _tei_blocks(source: str) -> tuple[list[tuple[str, str | None]], Metadata]:
    try:
        root = ET.fromstring(source)
    except ET.ParseError as exc:
        raise IngestError(
            f"malformed XML at byte {_byte_position(source, exc)}: {exc}"
        ) from exc

    body = next((el for el in root.iter() if _local(el.tag) == "body"), None)
    if body is None:
        raise IngestError("empty body: no body element")

    blocks: list[tuple[str, str | None]] = []
    _collect_paragraphs(body, [], blocks)
    if not blocks:
        raise IngestError("empty body: no paragraph elements")
    return blocks, _tei_metadata(root)


def _collect_paragraphs(
    el: ET.Element, heading_path: list[str], out: list[tuple[str, str | None]]
) -> None:
    for child in el:
        name = _local(child.tag)
        if name in _EXCLUDED_CONTAINERS:
            continue
        if name == "head":
            head_text = _element_text(child)
            if head_text:
                heading_path = heading_path + [head_text]
            continue
        if name == "p":
            text = _element_text(child)
            if text:
                out.append((text, " / ".join(heading_path) or None))
            continue
        _collect_paragraphs(child, heading_path, out)


def _element_text(el: ET.Element) -> str:
    # Whitespace in the XML source is presentation, not content; collapse it.
    return re.sub(r"\s+", " ", "".join(el.itertext())).strip()


def _byte_position(source: str, exc: ET.ParseError) -> int:
    line, column = exc.position
    lines = source.split("\n")
    prefix = "\n".join(lines[: line - 1])
    offset = len(prefix.encode("utf-8")) + (1 if line > 1 else 0)
    return offset + len(lines[line - 1][:column].encode("utf-8"))


def _tei_metadata(root: ET.Element) -> Metadata:
    header = next((el for el in root.iter() if _local(el.tag) == "teiheader"), None)
    if header is None:
        return Metadata()
    title = ""
    authors: list[str] = []
    year: int | None = None
    for el in header.iter():
        name = _local(el.tag)
        if name == "title" and not title:
            title = _element_text(el)
        elif name == "persname":
            person = _element_text(el)
            if person and person not in authors:
                authors.append(person)
        elif name == "date" and year is None:
            when = el.get("when", "") or _element_text(el)
            match = re.search(r"\b(\d{4})\b", when)
            if match:
                year = int(match.group(1))
    return Metadata(title=title, authors=tuple(authors), year=year)
