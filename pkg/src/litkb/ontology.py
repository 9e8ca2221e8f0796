"""User-defined schema of entity types and allowed relation triples.

Relations are directed: ``(head_type, relation, tail_type)``. The schema file
is YAML with top-level ``entities`` and ``rules`` arrays, e.g.::

    entities: [MATERIAL, PROPERTY]
    rules:
    - [MATERIAL, hasProperty, PROPERTY]
"""

from __future__ import annotations

from dataclasses import dataclass, field

import yaml


class SchemaError(Exception):
    """Invalid schema document or selection."""


@dataclass(frozen=True)
class OntologySchema:
    entity_types: frozenset[str]
    relation_rules: frozenset[tuple[str, str, str]] = frozenset()

    def __post_init__(self) -> None:
        for name in self.entity_types:
            if not name:
                raise SchemaError("empty entity type name")
        for head, rel, tail in self.relation_rules:
            if not rel:
                raise SchemaError("empty relation name")
            for endpoint in (head, tail):
                if endpoint not in self.entity_types:
                    raise SchemaError(f"rule references undeclared entity type {endpoint!r}")

    @property
    def relation_names(self) -> frozenset[str]:
        return frozenset(rel for _, rel, _ in self.relation_rules)


@dataclass(frozen=True)
class ExternalListing:
    """Pre-flattened external ontology: entity names (optionally with a
    parent) plus relation triples. OWL parsing is out of scope."""

    entities: tuple[str, ...]
    relations: tuple[tuple[str, str, str], ...] = ()
    parents: dict[str, str] = field(default_factory=dict)


def allowed(schema: OntologySchema, head_type: str, relation: str, tail_type: str) -> bool:
    """True iff the exact directed triple is an allowed rule."""
    return (head_type, relation, tail_type) in schema.relation_rules


def load_schema(config: str | dict) -> OntologySchema:
    """Parse a schema document (YAML text or an already-parsed mapping)."""
    if isinstance(config, str):
        try:
            data = yaml.safe_load(config)
        except yaml.YAMLError as exc:
            raise SchemaError(f"unparseable schema document: {exc}") from exc
    else:
        data = config
    if data is None:
        data = {}
    if not isinstance(data, dict):
        raise SchemaError("schema document must be a mapping")
    unknown = set(data) - {"entities", "rules"}
    if unknown:
        raise SchemaError(f"unknown schema fields: {sorted(unknown)}")

    entities = data.get("entities") or []
    rules = data.get("rules") or []
    if not isinstance(entities, list) or not all(isinstance(e, str) for e in entities):
        raise SchemaError("entities must be a list of names")
    triples = set()
    for rule in rules:
        if not (isinstance(rule, (list, tuple)) and len(rule) == 3):
            raise SchemaError(f"rule must be a [head, relation, tail] triple: {rule!r}")
        triples.add(tuple(str(part) for part in rule))
    return OntologySchema(entity_types=frozenset(entities), relation_rules=frozenset(triples))


def serialize_schema(schema: OntologySchema) -> str:
    """Canonical YAML text; ``load_schema(serialize_schema(s)) == s``."""
    doc = {
        "entities": sorted(schema.entity_types),
        "rules": [list(rule) for rule in sorted(schema.relation_rules)],
    }
    return yaml.safe_dump(doc, sort_keys=True, default_flow_style=None)


def load_schema_file(path: str) -> OntologySchema:
    with open(path, "r", encoding="utf-8") as fp:
        return load_schema(fp.read())


def import_listing(external: ExternalListing, selection: set[str]) -> OntologySchema:
    """Restrict an external listing to the selected entity names.

    Rules are kept only when both endpoints are selected.
    """
    unknown = set(selection) - set(external.entities)
    if unknown:
        raise SchemaError(f"selection of unknown entities: {sorted(unknown)}")
    rules = frozenset(
        (head, rel, tail)
        for head, rel, tail in external.relations
        if head in selection and tail in selection
    )
    return OntologySchema(entity_types=frozenset(selection), relation_rules=rules)
