"""Entity/relation annotations: standoff parsing, validation, training
export and human revision."""

from litkb.annotation.model import (
    PROVENANCES,
    AnnotationSet,
    EntityAnnotation,
    RelationAnnotation,
    annotation_set_from_dict,
    annotation_set_to_dict,
    canonicalize,
)
from litkb.annotation.standoff import ParseError, parse_standoff, serialize_standoff
from litkb.annotation.validate import ValidationReport, Violation, validate
from litkb.annotation.export import ExportResult, TrainingRecord, export_training
from litkb.annotation.revision import (
    AddEntity,
    AddRelation,
    Delete,
    Retype,
    RevisionError,
    apply_revision,
)

__all__ = [
    "PROVENANCES",
    "AddEntity",
    "AddRelation",
    "AnnotationSet",
    "Delete",
    "EntityAnnotation",
    "ExportResult",
    "ParseError",
    "RelationAnnotation",
    "Retype",
    "RevisionError",
    "TrainingRecord",
    "ValidationReport",
    "Violation",
    "annotation_set_from_dict",
    "annotation_set_to_dict",
    "apply_revision",
    "canonicalize",
    "export_training",
    "parse_standoff",
    "serialize_standoff",
    "validate",
]
