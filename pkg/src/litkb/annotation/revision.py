"""Human revision of annotation sets.

Edits apply in order. Deleting an entity cascades to its incident relations.
Edited or added items get provenance ``human``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence, Union

from litkb.annotation.model import AnnotationSet, EntityAnnotation, RelationAnnotation


class RevisionError(Exception):
    """Edit referencing an unknown id or breaking a set invariant."""


@dataclass(frozen=True)
class AddEntity:
    entity_type: str
    para_id: str
    start: int
    end: int
    surface: str


@dataclass(frozen=True)
class AddRelation:
    relation_type: str
    arg1: str
    arg2: str


@dataclass(frozen=True)
class Delete:
    ann_id: str


@dataclass(frozen=True)
class Retype:
    ann_id: str
    new_type: str


Edit = Union[AddEntity, AddRelation, Delete, Retype]


def apply_revision(annset: AnnotationSet, edits: Sequence[Edit]) -> AnnotationSet:
    entities = list(annset.entities)
    relations = list(annset.relations)
    next_t, next_r = annset.next_ids()

    for edit in edits:
        if isinstance(edit, AddEntity):
            new = EntityAnnotation(
                ann_id=f"T{next_t}",
                entity_type=edit.entity_type,
                para_id=edit.para_id,
                start=edit.start,
                end=edit.end,
                surface=edit.surface,
                provenance="human",
            )
            if any(ent.key() == new.key() for ent in entities):
                raise RevisionError(f"duplicate (type, span) annotation {new.key()}")
            entities.append(new)
            next_t += 1
        elif isinstance(edit, AddRelation):
            known = {ent.ann_id for ent in entities}
            for arg in (edit.arg1, edit.arg2):
                if arg not in known:
                    raise RevisionError(f"unknown entity id {arg}")
            relations.append(
                RelationAnnotation(
                    ann_id=f"R{next_r}",
                    relation_type=edit.relation_type,
                    arg1=edit.arg1,
                    arg2=edit.arg2,
                    provenance="human",
                )
            )
            next_r += 1
        elif isinstance(edit, Delete):
            if any(ent.ann_id == edit.ann_id for ent in entities):
                entities = [ent for ent in entities if ent.ann_id != edit.ann_id]
                relations = [
                    rel for rel in relations
                    if edit.ann_id not in (rel.arg1, rel.arg2)
                ]
            elif any(rel.ann_id == edit.ann_id for rel in relations):
                relations = [rel for rel in relations if rel.ann_id != edit.ann_id]
            else:
                raise RevisionError(f"unknown annotation id {edit.ann_id}")
        elif isinstance(edit, Retype):
            for i, ent in enumerate(entities):
                if ent.ann_id == edit.ann_id:
                    retyped = replace(ent, entity_type=edit.new_type, provenance="human")
                    if any(
                        other.key() == retyped.key()
                        for j, other in enumerate(entities) if j != i
                    ):
                        raise RevisionError(
                            f"duplicate (type, span) annotation {retyped.key()}"
                        )
                    entities[i] = retyped
                    break
            else:
                for i, rel in enumerate(relations):
                    if rel.ann_id == edit.ann_id:
                        relations[i] = replace(
                            rel, relation_type=edit.new_type, provenance="human"
                        )
                        break
                else:
                    raise RevisionError(f"unknown annotation id {edit.ann_id}")
        else:
            raise RevisionError(f"unknown edit {edit!r}")

    try:
        return AnnotationSet(
            doc_id=annset.doc_id, entities=tuple(entities), relations=tuple(relations)
        )
    except ValueError as exc:
        raise RevisionError(str(exc)) from exc


def edit_from_dict(obj: dict) -> Edit:
    """Parse a structured edit (the HTTP revise endpoint body)."""
    op = obj.get("op")
    if op == "add_entity":
        return AddEntity(
            entity_type=obj["entity_type"],
            para_id=obj["para_id"],
            start=obj["span"][0],
            end=obj["span"][1],
            surface=obj["surface"],
        )
    if op == "add_relation":
        return AddRelation(
            relation_type=obj["relation_type"], arg1=obj["arg1"], arg2=obj["arg2"]
        )
    if op == "delete":
        return Delete(ann_id=obj["ann_id"])
    if op == "retype":
        return Retype(ann_id=obj["ann_id"], new_type=obj["new_type"])
    raise RevisionError(f"unknown edit op {op!r}")
