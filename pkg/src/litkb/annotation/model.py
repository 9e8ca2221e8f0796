"""Annotation value types.

Entity spans may nest; identical duplicates (same paragraph, span, type) are
forbidden. Relations are typed binary links between entity annotations of the
same set. Every annotation carries a provenance: human, regex or model.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

PROVENANCES = ("human", "regex", "model")


@dataclass(frozen=True)
class EntityAnnotation:
    ann_id: str  # pattern T<n>
    entity_type: str
    para_id: str
    start: int
    end: int
    surface: str
    provenance: str = "human"

    def __post_init__(self) -> None:
        if not self.start < self.end:
            raise ValueError(f"{self.ann_id}: empty span ({self.start}, {self.end})")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"{self.ann_id}: unknown provenance {self.provenance!r}")

    @property
    def span(self) -> tuple[int, int]:
        return (self.start, self.end)

    def key(self) -> tuple[str, int, int, str]:
        return (self.para_id, self.start, self.end, self.entity_type)


@dataclass(frozen=True)
class RelationAnnotation:
    ann_id: str  # pattern R<n>
    relation_type: str
    arg1: str  # entity ann_id
    arg2: str
    provenance: str = "human"

    def __post_init__(self) -> None:
        if self.arg1 == self.arg2:
            raise ValueError(f"{self.ann_id}: relation arguments must differ")
        if self.provenance not in PROVENANCES:
            raise ValueError(f"{self.ann_id}: unknown provenance {self.provenance!r}")


@dataclass(frozen=True)
class AnnotationSet:
    doc_id: str
    entities: tuple[EntityAnnotation, ...] = ()
    relations: tuple[RelationAnnotation, ...] = ()

    def __post_init__(self) -> None:
        ids: set[str] = set()
        keys: set[tuple] = set()
        for ent in self.entities:
            if ent.ann_id in ids:
                raise ValueError(f"duplicate annotation id {ent.ann_id}")
            ids.add(ent.ann_id)
            if ent.key() in keys:
                raise ValueError(
                    f"{ent.ann_id}: duplicate (type, span) annotation {ent.key()}"
                )
            keys.add(ent.key())
        for rel in self.relations:
            if rel.ann_id in ids:
                raise ValueError(f"duplicate annotation id {rel.ann_id}")
            ids.add(rel.ann_id)
            for arg in (rel.arg1, rel.arg2):
                if not any(ent.ann_id == arg for ent in self.entities):
                    raise ValueError(f"{rel.ann_id}: dangling argument {arg}")

    def entity(self, ann_id: str) -> EntityAnnotation:
        for ent in self.entities:
            if ent.ann_id == ann_id:
                return ent
        raise KeyError(ann_id)

    def next_ids(self) -> tuple[int, int]:
        """Next free numeric suffixes for T and R ids."""
        t_max = max((_numeric(e.ann_id) for e in self.entities), default=0)
        r_max = max((_numeric(r.ann_id) for r in self.relations), default=0)
        return t_max + 1, r_max + 1


def _numeric(ann_id: str) -> int:
    digits = "".join(ch for ch in ann_id if ch.isdigit())
    return int(digits) if digits else 0


def canonicalize(annset: AnnotationSet) -> AnnotationSet:
    """Renumber ids canonically: entities T1.. sorted by (para, start, end,
    type); relations R1.. sorted by (arg1 order, arg2 order, type)."""
    ordered = sorted(annset.entities, key=lambda e: e.key())
    rename = {ent.ann_id: f"T{i}" for i, ent in enumerate(ordered, start=1)}
    order = {ent.ann_id: i for i, ent in enumerate(ordered)}
    entities = tuple(
        replace(ent, ann_id=rename[ent.ann_id]) for ent in ordered
    )
    rels = sorted(
        annset.relations,
        key=lambda r: (order[r.arg1], order[r.arg2], r.relation_type),
    )
    relations = tuple(
        RelationAnnotation(
            ann_id=f"R{i}",
            relation_type=rel.relation_type,
            arg1=rename[rel.arg1],
            arg2=rename[rel.arg2],
            provenance=rel.provenance,
        )
        for i, rel in enumerate(rels, start=1)
    )
    return AnnotationSet(doc_id=annset.doc_id, entities=entities, relations=relations)


def annotation_set_to_dict(annset: AnnotationSet) -> dict:
    """Structured (JSON-ready) form: the training/interchange format."""
    return {
        "doc_id": annset.doc_id,
        "entities": [
            {
                "ann_id": e.ann_id,
                "entity_type": e.entity_type,
                "para_id": e.para_id,
                "span": [e.start, e.end],
                "surface": e.surface,
                "provenance": e.provenance,
            }
            for e in annset.entities
        ],
        "relations": [
            {
                "ann_id": r.ann_id,
                "relation_type": r.relation_type,
                "arg1": r.arg1,
                "arg2": r.arg2,
                "provenance": r.provenance,
            }
            for r in annset.relations
        ],
    }


def annotation_set_from_dict(obj: dict) -> AnnotationSet:
    return AnnotationSet(
        doc_id=obj["doc_id"],
        entities=tuple(
            EntityAnnotation(
                ann_id=e["ann_id"],
                entity_type=e["entity_type"],
                para_id=e["para_id"],
                start=e["span"][0],
                end=e["span"][1],
                surface=e["surface"],
                provenance=e.get("provenance", "human"),
            )
            for e in obj.get("entities", ())
        ),
        relations=tuple(
            RelationAnnotation(
                ann_id=r["ann_id"],
                relation_type=r["relation_type"],
                arg1=r["arg1"],
                arg2=r["arg2"],
                provenance=r.get("provenance", "human"),
            )
            for r in obj.get("relations", ())
        ),
    )
