"""BRAT-style standoff text format, per paragraph.

Grammar (bit-exact, UTF-8, one record per line):

    entity line    T<id>\\t<Type> <start> <end>\\t<surface>
    relation line  R<id>\\t<Rel> Arg1:T<i> Arg2:T<j>

Offsets are Unicode scalar offsets into the paragraph text the annotations
refer to. Event, attribute and normalization records are not supported.
"""

from __future__ import annotations

import re

from litkb.annotation.model import (
    AnnotationSet,
    EntityAnnotation,
    RelationAnnotation,
    canonicalize,
)

_ENTITY_RE = re.compile(r"^T(\d+)\t(\S+) (\d+) (\d+)\t(.*)$")
_RELATION_RE = re.compile(r"^R(\d+)\t(\S+) Arg1:(T\d+) Arg2:(T\d+)$")


class ParseError(Exception):
    """Malformed standoff record or offset/surface mismatch."""


def parse_standoff(
    ann_text: str,
    paragraph_text: str,
    *,
    doc_id: str = "",
    para_id: str = "",
    provenance: str = "human",
) -> AnnotationSet:
    """Parse one paragraph's standoff records against the exact paragraph text.

    Every T line becomes an EntityAnnotation (surface verified against the
    offsets), every R line a RelationAnnotation. Raises ParseError naming the
    line number or annotation id on any mismatch.
    """
    entities: list[EntityAnnotation] = []
    relations: list[RelationAnnotation] = []
    entity_ids: set[str] = set()
    for lineno, line in enumerate(ann_text.splitlines(), start=1):
        if not line.strip():
            continue
        if line.startswith("T"):
            match = _ENTITY_RE.match(line)
            if not match:
                raise ParseError(f"line {lineno}: malformed entity line")
            num, ent_type, start_s, end_s, surface = match.groups()
            ann_id = f"T{num}"
            start, end = int(start_s), int(end_s)
            if not 0 <= start < end <= len(paragraph_text):
                raise ParseError(f"{ann_id}: span ({start}, {end}) outside text")
            if paragraph_text[start:end] != surface:
                raise ParseError(
                    f"{ann_id}: surface {surface!r} does not match text slice "
                    f"{paragraph_text[start:end]!r}"
                )
            entities.append(
                EntityAnnotation(
                    ann_id=ann_id,
                    entity_type=ent_type,
                    para_id=para_id,
                    start=start,
                    end=end,
                    surface=surface,
                    provenance=provenance,
                )
            )
            entity_ids.add(ann_id)
        elif line.startswith("R"):
            match = _RELATION_RE.match(line)
            if not match:
                raise ParseError(f"line {lineno}: malformed relation line")
            num, rel_type, arg1, arg2 = match.groups()
            relations.append(
                RelationAnnotation(
                    ann_id=f"R{num}",
                    relation_type=rel_type,
                    arg1=arg1,
                    arg2=arg2,
                    provenance=provenance,
                )
            )
        else:
            raise ParseError(f"line {lineno}: unknown record type")
    for rel in relations:
        for arg in (rel.arg1, rel.arg2):
            if arg not in entity_ids:
                raise ParseError(f"{rel.ann_id}: dangling argument {arg}")
    try:
        return AnnotationSet(doc_id=doc_id, entities=tuple(entities), relations=tuple(relations))
    except ValueError as exc:
        raise ParseError(str(exc)) from exc


def serialize_standoff(annset: AnnotationSet) -> str:
    """Serialize a single-paragraph fragment in canonical order.

    Entities sorted by (start, end, type) and renumbered T1..; relations by
    canonical id. ``parse_standoff(serialize_standoff(s))`` equals ``s``
    modulo id renumbering.
    """
    paragraphs = {e.para_id for e in annset.entities}
    if len(paragraphs) > 1:
        raise ValueError(
            "standoff text is per paragraph; serialize one fragment at a time "
            f"(got paragraphs {sorted(paragraphs)})"
        )
    canon = canonicalize(annset)
    lines = [
        f"{e.ann_id}\t{e.entity_type} {e.start} {e.end}\t{e.surface}"
        for e in canon.entities
    ]
    lines += [
        f"{r.ann_id}\t{r.relation_type} Arg1:{r.arg1} Arg2:{r.arg2}"
        for r in canon.relations
    ]
    return "".join(line + "\n" for line in lines)
