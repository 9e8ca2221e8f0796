"""Training the two-stage NER (span detector + entity classifier) and the
pairwise relation classifier from exported sentence records."""

from __future__ import annotations

import warnings
from typing import Sequence

import numpy as np

from litkb.annotation.export import NONE_LABEL, TrainingRecord
from litkb.autoann.features import (
    PAIR_FEATURE_SPEC,
    SPAN_FEATURE_SPEC,
    build_matrix,
    pair_features,
    span_features,
)
from litkb.autoann.linear import (
    Hyper,
    LinearScorer,
    TrainError,
    fit_binary,
    fit_ovr,
)
from litkb.autoann.models import NerModel, RcModel, SpanDetector
from litkb.autoann.spans import enumerate_spans


def train_span_detector(records: Sequence[TrainingRecord], hyper: Hyper) -> SpanDetector:
    """Binary logistic model over all span candidates; a candidate is positive
    iff it equals a gold span of any type."""
    rows = []
    labels = []
    for rec in records:
        gold = {(i, j) for i, j, _ in rec.spans}
        for i, j in enumerate_spans(len(rec.tokens), hyper.L_max):
            rows.append(span_features(rec.tokens, rec.pos, i, j))
            labels.append(1.0 if (i, j) in gold else 0.0)
    y = np.asarray(labels, dtype=np.float64)
    if not rows or not y.any():
        raise TrainError("no positive span examples in the training records")
    X = build_matrix(rows, hyper.feature_dim)
    fit = fit_binary(X, y, hyper)
    return SpanDetector(
        scorer=LinearScorer(weights=fit.weights, bias=fit.bias),
        tau=hyper.tau,
        losses=fit.losses,
    )


def train_entity_classifier(records: Sequence[TrainingRecord], hyper: Hyper):
    """One-vs-rest logistic classifier over the gold spans' features."""
    rows = []
    labels = []
    for rec in records:
        for i, j, label in rec.spans:
            rows.append(span_features(rec.tokens, rec.pos, i, j))
            labels.append(label)
    if not rows:
        raise TrainError("no gold spans in the training records")
    classes = tuple(sorted(set(labels)))
    if len(classes) < 2:
        warnings.warn(
            f"single-type corpus: classifier will always predict {classes[0]!r}",
            stacklevel=2,
        )
    X = build_matrix(rows, hyper.feature_dim)
    return fit_ovr(X, labels, classes, hyper)


def train_ner(records: Sequence[TrainingRecord], hyper: Hyper) -> NerModel:
    return NerModel(
        span_detector=train_span_detector(records, hyper),
        entity_classifier=train_entity_classifier(records, hyper),
        feature_spec=SPAN_FEATURE_SPEC,
        hyper=hyper,
    )


def train_rc(records: Sequence[TrainingRecord], schema, hyper: Hyper) -> RcModel:
    """Multiclass logistic model over ordered gold-span pairs; classes are the
    schema's relation names plus NONE."""
    rows = []
    labels = []
    for rec in records:
        for a, b, label in rec.pairs:
            ai, aj, atype = rec.spans[a]
            bi, bj, btype = rec.spans[b]
            rows.append(pair_features(rec.tokens, (ai, aj), atype, (bi, bj), btype))
            labels.append(label)
    if not any(label != NONE_LABEL for label in labels):
        raise TrainError("no relation examples in the training records")
    classes = tuple(sorted(schema.relation_names)) + (NONE_LABEL,)
    unknown = set(labels) - set(classes)
    if unknown:
        raise TrainError(f"gold relation labels missing from schema: {sorted(unknown)}")
    X = build_matrix(rows, hyper.feature_dim)
    scorer = fit_ovr(X, labels, classes, hyper)
    return RcModel(scorer=scorer, feature_spec=PAIR_FEATURE_SPEC, hyper=hyper)
