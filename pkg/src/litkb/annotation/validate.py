"""Schema validation of annotation sets (report-based, never raises)."""

from __future__ import annotations

from dataclasses import dataclass

from litkb.annotation.model import AnnotationSet
from litkb.ontology import OntologySchema, allowed


@dataclass(frozen=True)
class Violation:
    ann_id: str
    kind: str  # unknown_entity_type | disallowed_relation
    message: str


@dataclass(frozen=True)
class ValidationReport:
    violations: tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dicts(self) -> list[dict]:
        return [
            {"ann_id": v.ann_id, "kind": v.kind, "message": v.message}
            for v in self.violations
        ]


def validate(annset: AnnotationSet, schema: OntologySchema) -> ValidationReport:
    """List every entity with an unknown type and every relation whose typed
    triple is not allowed by the schema."""
    violations: list[Violation] = []
    types = {}
    for ent in annset.entities:
        types[ent.ann_id] = ent.entity_type
        if ent.entity_type not in schema.entity_types:
            violations.append(
                Violation(
                    ann_id=ent.ann_id,
                    kind="unknown_entity_type",
                    message=f"{ent.ann_id}: entity type {ent.entity_type!r} not in schema",
                )
            )
    for rel in annset.relations:
        head, tail = types[rel.arg1], types[rel.arg2]
        if not allowed(schema, head, rel.relation_type, tail):
            violations.append(
                Violation(
                    ann_id=rel.ann_id,
                    kind="disallowed_relation",
                    message=(
                        f"{rel.ann_id}: ({head}, {rel.relation_type}, {tail}) "
                        "is not an allowed triple"
                    ),
                )
            )
    return ValidationReport(violations=tuple(violations))
