"""Training-data export: one record per sentence.

Character spans are snapped to token boundaries: a span maps to the smallest
token range covering it; a span starting or ending mid-token expands to the
full token with a warning. Spans crossing sentence boundaries (and relations
whose arguments end up in different sentences) are skipped with a warning.

Relation labels close over all ordered entity pairs in the sentence; pairs
without an annotated relation are labelled NONE.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import IO, Iterable, Sequence

from litkb.annotation.model import AnnotationSet
from litkb.corpus.model import Document, Sentence

NONE_LABEL = "NONE"


@dataclass(frozen=True)
class TrainingRecord:
    doc_id: str
    para_id: str
    sent_id: str
    tokens: tuple[str, ...]
    pos: tuple[str, ...]
    # gold spans as token-index ranges [i, j) with type labels
    spans: tuple[tuple[int, int, str], ...] = ()
    # (head span index, tail span index, label) over all ordered pairs
    pairs: tuple[tuple[int, int, str], ...] = ()


@dataclass
class ExportResult:
    records: list[TrainingRecord] = field(default_factory=list)
    warnings: list[str] = field(default_factory=list)


def export_training(
    corpus: Sequence[Document], sets: Iterable[AnnotationSet]
) -> ExportResult:
    docs = {doc.doc_id: doc for doc in corpus}
    by_doc = {}
    for annset in sets:
        if annset.doc_id not in docs:
            raise KeyError(f"annotation set references unknown document {annset.doc_id}")
        if annset.doc_id in by_doc:
            raise ValueError(f"duplicate annotation set for document {annset.doc_id}")
        by_doc[annset.doc_id] = annset

    result = ExportResult()
    for doc_id, annset in by_doc.items():
        _export_document(docs[doc_id], annset, result)
    return result


def _export_document(doc: Document, annset: AnnotationSet, result: ExportResult) -> None:
    # (para_id, sent index within paragraph) -> entity ann_id -> span index
    placed: dict[str, tuple[Sentence, dict[str, int], list[tuple[int, int, str]]]] = {}
    for para in doc.paragraphs:
        for sent in para.sentences:
            placed[sent.sent_id] = (sent, {}, [])

    entity_sentence: dict[str, str] = {}
    for ent in annset.entities:
        try:
            para = doc.paragraph(ent.para_id)
        except KeyError:
            result.warnings.append(f"{ent.ann_id}: unknown paragraph {ent.para_id}, skipped")
            continue
        sent = _owning_sentence(para.sentences, ent.start, ent.end)
        if sent is None:
            result.warnings.append(
                f"{ent.ann_id}: span ({ent.start}, {ent.end}) crosses a sentence "
                "boundary, skipped"
            )
            continue
        rng = _snap_to_tokens(sent, ent.start, ent.end)
        if rng is None:
            result.warnings.append(
                f"{ent.ann_id}: span ({ent.start}, {ent.end}) covers no tokens, skipped"
            )
            continue
        (i, j), exact = rng
        if not exact:
            result.warnings.append(
                f"{ent.ann_id}: span ({ent.start}, {ent.end}) snapped to token "
                f"range [{i}, {j})"
            )
        _, index_of, spans = placed[sent.sent_id]
        index_of[ent.ann_id] = len(spans)
        spans.append((i, j, ent.entity_type))
        entity_sentence[ent.ann_id] = sent.sent_id

    gold_pairs: dict[str, dict[tuple[int, int], str]] = {s: {} for s in placed}
    for rel in annset.relations:
        s1 = entity_sentence.get(rel.arg1)
        s2 = entity_sentence.get(rel.arg2)
        if s1 is None or s2 is None or s1 != s2:
            result.warnings.append(
                f"{rel.ann_id}: arguments not in the same sentence, skipped"
            )
            continue
        _, index_of, _ = placed[s1]
        key = (index_of[rel.arg1], index_of[rel.arg2])
        if key in gold_pairs[s1] and gold_pairs[s1][key] != rel.relation_type:
            result.warnings.append(
                f"{rel.ann_id}: duplicate pair label, keeping {gold_pairs[s1][key]!r}"
            )
            continue
        gold_pairs[s1][key] = rel.relation_type

    for para in doc.paragraphs:
        for sent in para.sentences:
            _, _, spans = placed[sent.sent_id]
            labels = gold_pairs[sent.sent_id]
            pairs = tuple(
                (a, b, labels.get((a, b), NONE_LABEL))
                for a in range(len(spans))
                for b in range(len(spans))
                if a != b
            )
            result.records.append(
                TrainingRecord(
                    doc_id=doc.doc_id,
                    para_id=para.para_id,
                    sent_id=sent.sent_id,
                    tokens=tuple(t.surface for t in sent.tokens),
                    pos=tuple(t.pos or "X" for t in sent.tokens),
                    spans=tuple(spans),
                    pairs=pairs,
                )
            )


def _owning_sentence(sentences: Sequence[Sentence], start: int, end: int) -> Sentence | None:
    for sent in sentences:
        if sent.start <= start and end <= sent.end:
            return sent
    return None


def _snap_to_tokens(
    sent: Sentence, start: int, end: int
) -> tuple[tuple[int, int], bool] | None:
    first = last = None
    for idx, tok in enumerate(sent.tokens):
        if tok.end > start and tok.start < end:
            if first is None:
                first = idx
            last = idx
    if first is None or last is None:
        return None
    exact = sent.tokens[first].start == start and sent.tokens[last].end == end
    return (first, last + 1), exact


def record_to_dict(rec: TrainingRecord) -> dict:
    return {
        "doc_id": rec.doc_id,
        "para_id": rec.para_id,
        "sent_id": rec.sent_id,
        "tokens": list(rec.tokens),
        "pos": list(rec.pos),
        "spans": [list(s) for s in rec.spans],
        "pairs": [list(p) for p in rec.pairs],
    }


def record_from_dict(obj: dict) -> TrainingRecord:
    return TrainingRecord(
        doc_id=obj["doc_id"],
        para_id=obj["para_id"],
        sent_id=obj["sent_id"],
        tokens=tuple(obj["tokens"]),
        pos=tuple(obj["pos"]),
        spans=tuple((s[0], s[1], s[2]) for s in obj["spans"]),
        pairs=tuple((p[0], p[1], p[2]) for p in obj["pairs"]),
    )


def save_records(records: Iterable[TrainingRecord], fp: IO[str]) -> None:
    """Newline-delimited sentence records (tokens, gold spans, gold pairs)."""
    for rec in records:
        fp.write(json.dumps(record_to_dict(rec), ensure_ascii=False, sort_keys=True))
        fp.write("\n")


def load_records(fp: IO[str]) -> list[TrainingRecord]:
    return [record_from_dict(json.loads(line)) for line in fp if line.strip()]
