"""Rule-based auto-annotation from regex/gazetteer rules.

Rules file format: one rule per line, ``<type>\\t<regex>\\t<cs|ci>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import IO, Sequence

from litkb.annotation.model import AnnotationSet, EntityAnnotation
from litkb.corpus.model import Document
from litkb.ontology import OntologySchema, SchemaError


@dataclass(frozen=True)
class GazetteerRule:
    pattern: str
    entity_type: str
    case_sensitive: bool = True

    def __post_init__(self) -> None:
        self.compiled()  # pattern must compile

    def compiled(self) -> re.Pattern:
        flags = 0 if self.case_sensitive else re.IGNORECASE
        try:
            return re.compile(self.pattern, flags)
        except re.error as exc:
            raise ValueError(f"bad pattern {self.pattern!r}: {exc}") from exc


def check_rules(rules: Sequence[GazetteerRule], schema: OntologySchema) -> None:
    for rule in rules:
        if rule.entity_type not in schema.entity_types:
            raise SchemaError(f"rule type {rule.entity_type!r} not in schema")


def regex_annotate(doc: Document, rules: Sequence[GazetteerRule]) -> AnnotationSet:
    """Annotate every non-overlapping leftmost-longest match of each rule.

    Overlaps across rules resolve by (longer span, earlier rule) priority;
    accepted spans are pairwise disjoint. Provenance is ``regex``.
    """
    compiled = [rule.compiled() for rule in rules]
    entities: list[EntityAnnotation] = []
    counter = 1
    for para in doc.paragraphs:
        candidates: list[tuple[int, int, int]] = []  # (start, end, rule index)
        for rule_idx, pattern in enumerate(compiled):
            for match in pattern.finditer(para.text):
                if match.end() > match.start():
                    candidates.append((match.start(), match.end(), rule_idx))
        candidates.sort(key=lambda c: (c[0] - c[1], c[2], c[0]))
        accepted: list[tuple[int, int, int]] = []
        for start, end, rule_idx in candidates:
            if not any(start < a_end and a_start < end for a_start, a_end, _ in accepted):
                accepted.append((start, end, rule_idx))
        for start, end, rule_idx in sorted(accepted):
            entities.append(
                EntityAnnotation(
                    ann_id=f"T{counter}",
                    entity_type=rules[rule_idx].entity_type,
                    para_id=para.para_id,
                    start=start,
                    end=end,
                    surface=para.text[start:end],
                    provenance="regex",
                )
            )
            counter += 1
    return AnnotationSet(doc_id=doc.doc_id, entities=tuple(entities))


def save_rules(rules: Sequence[GazetteerRule], fp: IO[str]) -> None:
    for rule in rules:
        cs = "cs" if rule.case_sensitive else "ci"
        fp.write(f"{rule.entity_type}\t{rule.pattern}\t{cs}\n")


def load_rules(fp: IO[str]) -> list[GazetteerRule]:
    rules = []
    for lineno, line in enumerate(fp, start=1):
        line = line.rstrip("\n")
        if not line.strip():
            continue
        parts = line.split("\t")
        if len(parts) != 3 or parts[2] not in ("cs", "ci"):
            raise ValueError(f"line {lineno}: expected <type>\\t<regex>\\t<cs|ci>")
        rules.append(
            GazetteerRule(
                pattern=parts[1], entity_type=parts[0], case_sensitive=parts[2] == "cs"
            )
        )
    return rules


def load_rules_file(path: str) -> list[GazetteerRule]:
    with open(path, "r", encoding="utf-8") as fp:
        return load_rules(fp)
