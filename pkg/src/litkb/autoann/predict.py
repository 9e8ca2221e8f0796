"""Model-based auto-annotation of a document.

Per sentence: enumerate candidates, score, decode (nesting allowed), classify
each selected span, then predict a relation for every ordered pair of
selected spans. Pairs predicted NONE or violating the ontology are dropped.
"""

from __future__ import annotations

from litkb.annotation.model import AnnotationSet, EntityAnnotation, RelationAnnotation
from litkb.autoann.features import (
    PAIR_FEATURE_SPEC,
    SPAN_FEATURE_SPEC,
    build_matrix,
    pair_features,
    span_features,
)
from litkb.autoann.models import NONE_LABEL, NerModel, RcModel
from litkb.autoann.spans import decode_nested, enumerate_spans
from litkb.corpus.model import Document
from litkb.ontology import OntologySchema, allowed


class ModelSchemaError(Exception):
    """Model class lists incompatible with the project schema."""


def _check_compat(ner: NerModel, rc: RcModel, schema: OntologySchema) -> None:
    if ner.feature_spec != SPAN_FEATURE_SPEC or rc.feature_spec != PAIR_FEATURE_SPEC:
        raise ModelSchemaError(
            f"incompatible feature specs: {ner.feature_spec}, {rc.feature_spec}"
        )
    missing = set(ner.type_list) - schema.entity_types
    if missing:
        raise ModelSchemaError(f"model entity types not in schema: {sorted(missing)}")
    # relations the schema does not allow are masked to NONE by the post-filter


def auto_annotate(
    doc: Document, ner: NerModel, rc: RcModel, schema: OntologySchema
) -> AnnotationSet:
    _check_compat(ner, rc, schema)
    dim = ner.hyper.feature_dim
    entities: list[EntityAnnotation] = []
    relations: list[RelationAnnotation] = []
    t_counter = r_counter = 1

    for para in doc.paragraphs:
        for sent in para.sentences:
            tokens = [t.surface for t in sent.tokens]
            pos = [t.pos or "X" for t in sent.tokens]
            candidates = enumerate_spans(len(tokens), ner.hyper.L_max)
            if not candidates:
                continue
            X = build_matrix(
                [span_features(tokens, pos, i, j) for i, j in candidates], dim
            )
            scores = ner.span_detector.scorer.score(X)
            selected = decode_nested(
                list(zip(candidates, scores)), ner.span_detector.tau
            )
            if not selected:
                continue
            Xsel = build_matrix(
                [span_features(tokens, pos, i, j) for i, j in selected], dim
            )
            types = ner.entity_classifier.predict(Xsel)

            sent_entities = []
            for (i, j), ent_type in zip(selected, types):
                start = sent.tokens[i].start
                end = sent.tokens[j - 1].end
                ann = EntityAnnotation(
                    ann_id=f"T{t_counter}",
                    entity_type=ent_type,
                    para_id=para.para_id,
                    start=start,
                    end=end,
                    surface=para.text[start:end],
                    provenance="model",
                )
                t_counter += 1
                entities.append(ann)
                sent_entities.append(((i, j), ent_type, ann.ann_id))

            if len(sent_entities) < 2:
                continue
            pairs = [
                (head, tail)
                for head in sent_entities
                for tail in sent_entities
                if head is not tail
            ]
            Xp = build_matrix(
                [
                    pair_features(tokens, h_rng, h_type, t_rng, t_type)
                    for (h_rng, h_type, _), (t_rng, t_type, _) in pairs
                ],
                rc.hyper.feature_dim,
            )
            predicted = rc.scorer.predict(Xp)
            for ((_, h_type, h_id), (_, t_type, t_id)), label in zip(pairs, predicted):
                if label == NONE_LABEL:
                    continue
                if not allowed(schema, h_type, label, t_type):
                    continue  # ontology is the source of truth: mask to NONE
                relations.append(
                    RelationAnnotation(
                        ann_id=f"R{r_counter}",
                        relation_type=label,
                        arg1=h_id,
                        arg2=t_id,
                        provenance="model",
                    )
                )
                r_counter += 1

    return AnnotationSet(doc_id=doc.doc_id, entities=tuple(entities), relations=tuple(relations))
