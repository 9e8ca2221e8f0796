from __future__ import annotations

import numpy as np
import pytest

from litkb.annotation import validate
from litkb.annotation.export import export_training
from litkb.autoann import (
    Hyper,
    ModelIOError,
    ModelSchemaError,
    TrainError,
    auto_annotate,
    evaluate_micro_f1,
    load_ner_model,
    load_rc_model,
    save_ner_model,
    save_rc_model,
    train_entity_classifier,
    train_ner,
    train_rc,
    train_span_detector,
)
from litkb.autoann.features import build_matrix, pair_features, span_features
from litkb.autoann.spans import decode_nested, enumerate_spans
from litkb.corpus.model import Document
from litkb.ontology import OntologySchema
from synth import SHAPE_SCHEMA, shape_corpus, shape_gold

FAST = Hyper(epochs=40)


@pytest.fixture(scope="module")
def small_records():
    doc = shape_corpus(seed=23, n_paragraphs=8)
    result = export_training([doc], [shape_gold(doc)])
    assert not result.warnings
    return result.records


def detection_f1(detector, records, hyper):
    tp = fp = fn = 0
    for rec in records:
        cands = enumerate_spans(len(rec.tokens), hyper.L_max)
        X = build_matrix(
            [span_features(rec.tokens, rec.pos, i, j) for i, j in cands],
            hyper.feature_dim,
        )
        sel = set(decode_nested(list(zip(cands, detector.scorer.score(X))), detector.tau))
        gold = {(i, j) for i, j, _ in rec.spans}
        tp += len(sel & gold)
        fp += len(sel - gold)
        fn += len(gold - sel)
    precision = tp / (tp + fp) if tp + fp else 0.0
    recall = tp / (tp + fn) if tp + fn else 0.0
    return 2 * precision * recall / (precision + recall) if precision + recall else 0.0


class TestSpanDetector:
    def test_zero_epochs_scores_half(self, small_records):
        det = train_span_detector(small_records[:10], Hyper(epochs=0))
        rec = small_records[0]
        cands = enumerate_spans(len(rec.tokens), FAST.L_max)
        X = build_matrix(
            [span_features(rec.tokens, rec.pos, i, j) for i, j in cands], FAST.feature_dim
        )
        assert np.all(det.scorer.score(X) == 0.5)

    def test_loss_decreases_monotonically(self, shape_setup):
        losses = shape_setup["ner"].span_detector.losses
        assert len(losses) == shape_setup["hyper"].epochs + 1
        assert all(losses[i + 1] <= losses[i] for i in range(len(losses) - 1))

    def test_no_positives_raises(self, small_records):
        empty = [r for r in small_records if not r.spans][:5]
        with pytest.raises(TrainError):
            train_span_detector(empty, FAST)

    def test_heldout_detection_f1(self, shape_setup):
        f1 = detection_f1(
            shape_setup["ner"].span_detector, shape_setup["dev"], shape_setup["hyper"]
        )
        assert f1 >= 0.95


class TestEntityClassifier:
    def test_heldout_accuracy(self, shape_setup):
        ner, dev, hyper = shape_setup["ner"], shape_setup["dev"], shape_setup["hyper"]
        correct = total = 0
        for rec in dev:
            if not rec.spans:
                continue
            X = build_matrix(
                [span_features(rec.tokens, rec.pos, i, j) for i, j, _ in rec.spans],
                hyper.feature_dim,
            )
            for (_, _, gold_label), pred in zip(rec.spans, ner.entity_classifier.predict(X)):
                total += 1
                correct += pred == gold_label
        assert total > 0
        assert correct / total >= 0.95

    def test_training_examples_recovered(self, shape_setup):
        ner, train, hyper = shape_setup["ner"], shape_setup["train"], shape_setup["hyper"]
        rec = next(r for r in train if r.spans)
        X = build_matrix(
            [span_features(rec.tokens, rec.pos, i, j) for i, j, _ in rec.spans],
            hyper.feature_dim,
        )
        assert ner.entity_classifier.predict(X) == [label for _, _, label in rec.spans]

    def test_single_type_warns_and_predicts_it(self, small_records):
        only_qty = []
        for rec in small_records:
            spans = tuple(s for s in rec.spans if s[2] == "QTY")
            if spans:
                only_qty.append(
                    type(rec)(
                        doc_id=rec.doc_id, para_id=rec.para_id, sent_id=rec.sent_id,
                        tokens=rec.tokens, pos=rec.pos, spans=spans, pairs=(),
                    )
                )
        with pytest.warns(UserWarning, match="single-type"):
            cls = train_entity_classifier(only_qty[:6], FAST)
        rec = only_qty[0]
        X = build_matrix(
            [span_features(rec.tokens, rec.pos, i, j) for i, j, _ in rec.spans],
            FAST.feature_dim,
        )
        assert set(cls.predict(X)) == {"QTY"}

    def test_empty_features_gives_largest_bias(self, shape_setup):
        cls = shape_setup["ner"].entity_classifier
        X = build_matrix([[]], shape_setup["hyper"].feature_dim)
        expected = cls.classes[int(np.argmax(cls.bias))]
        assert cls.predict(X) == [expected]


class TestRc:
    def test_heldout_pair_accuracy(self, shape_setup):
        rc, dev, hyper = shape_setup["rc"], shape_setup["dev"], shape_setup["hyper"]
        rows = []
        gold_labels = []
        for rec in dev:
            for a, b, gold_label in rec.pairs:
                ai, aj, at = rec.spans[a]
                bi, bj, bt = rec.spans[b]
                rows.append(pair_features(rec.tokens, (ai, aj), at, (bi, bj), bt))
                gold_labels.append(gold_label)
        assert rows
        X = build_matrix(rows, hyper.feature_dim)
        predictions = rc.scorer.predict(X)
        accuracy = sum(p == g for p, g in zip(predictions, gold_labels)) / len(rows)
        assert accuracy >= 0.95

    def test_no_relation_examples_raises(self, small_records):
        unrelated = []
        for rec in small_records:
            pairs = tuple((a, b, "NONE") for a, b, _ in rec.pairs)
            unrelated.append(
                type(rec)(
                    doc_id=rec.doc_id, para_id=rec.para_id, sent_id=rec.sent_id,
                    tokens=rec.tokens, pos=rec.pos, spans=rec.spans, pairs=pairs,
                )
            )
        with pytest.raises(TrainError):
            train_rc(unrelated, SHAPE_SCHEMA, FAST)

    def test_label_missing_from_schema_raises(self, small_records):
        schema = OntologySchema(entity_types=frozenset({"CODE", "QTY"}))
        with pytest.raises(TrainError):
            train_rc(small_records, schema, FAST)


class TestAutoAnnotate:
    def test_empty_document(self, shape_setup):
        out = auto_annotate(
            Document(doc_id="empty"), shape_setup["ner"], shape_setup["rc"], SHAPE_SCHEMA
        )
        assert out.entities == () and out.relations == ()

    def test_fresh_document_f1(self, shape_setup):
        doc = shape_corpus(seed=77, n_paragraphs=8)
        gold = shape_gold(doc)
        pred = auto_annotate(doc, shape_setup["ner"], shape_setup["rc"], SHAPE_SCHEMA)
        assert evaluate_micro_f1(pred, gold).micro_f1 >= 0.9

    def test_output_validates_against_schema(self, shape_setup):
        doc = shape_corpus(seed=78, n_paragraphs=4)
        out = auto_annotate(doc, shape_setup["ner"], shape_setup["rc"], SHAPE_SCHEMA)
        assert validate(out, SHAPE_SCHEMA).ok
        assert all(e.provenance == "model" for e in out.entities)
        assert all(r.provenance == "model" for r in out.relations)

    def test_single_entity_sentence_no_relations(self, shape_setup):
        doc = shape_corpus(seed=79, n_paragraphs=6)
        pred = auto_annotate(doc, shape_setup["ner"], shape_setup["rc"], SHAPE_SCHEMA)
        per_para = {}
        for ent in pred.entities:
            per_para.setdefault(ent.para_id, []).append(ent.ann_id)
        for rel in pred.relations:
            arg_para = next(e.para_id for e in pred.entities if e.ann_id == rel.arg1)
            assert len(per_para[arg_para]) >= 2

    def test_schema_mismatch_raises(self, shape_setup):
        other = OntologySchema(entity_types=frozenset({"OTHER"}))
        with pytest.raises(ModelSchemaError):
            auto_annotate(Document(doc_id="x"), shape_setup["ner"], shape_setup["rc"], other)

    def test_disallowed_relations_masked(self, shape_setup):
        # same types, no relation rules: every relation prediction is masked
        bare = OntologySchema(entity_types=frozenset({"CODE", "QTY"}))
        doc = shape_corpus(seed=80, n_paragraphs=6)
        pred = auto_annotate(doc, shape_setup["ner"], shape_setup["rc"], bare)
        assert pred.relations == ()
        assert pred.entities  # masking drops relations, not entities


class TestDeterminismAndIO:
    def test_bitwise_identical_training(self, small_records):
        a = train_ner(small_records, FAST)
        b = train_ner(small_records, FAST)
        assert a.span_detector.scorer.weights.tobytes() == b.span_detector.scorer.weights.tobytes()
        assert a.span_detector.scorer.bias == b.span_detector.scorer.bias
        assert a.entity_classifier.weights.tobytes() == b.entity_classifier.weights.tobytes()
        ra = train_rc(small_records, SHAPE_SCHEMA, FAST)
        rb = train_rc(small_records, SHAPE_SCHEMA, FAST)
        assert ra.scorer.weights.tobytes() == rb.scorer.weights.tobytes()

    def test_identical_auto_annotation(self, shape_setup):
        doc = shape_corpus(seed=81, n_paragraphs=5)
        first = auto_annotate(doc, shape_setup["ner"], shape_setup["rc"], SHAPE_SCHEMA)
        second = auto_annotate(doc, shape_setup["ner"], shape_setup["rc"], SHAPE_SCHEMA)
        assert first == second

    def test_model_roundtrip(self, shape_setup, tmp_path):
        ner, rc = shape_setup["ner"], shape_setup["rc"]
        ner_path = tmp_path / "ner.npz"
        rc_path = tmp_path / "rc.npz"
        save_ner_model(ner, str(ner_path))
        save_rc_model(rc, str(rc_path))
        ner2 = load_ner_model(str(ner_path))
        rc2 = load_rc_model(str(rc_path))
        assert np.array_equal(ner2.span_detector.scorer.weights, ner.span_detector.scorer.weights)
        assert ner2.type_list == ner.type_list
        assert ner2.hyper == ner.hyper
        assert np.array_equal(rc2.scorer.weights, rc.scorer.weights)
        doc = shape_corpus(seed=82, n_paragraphs=3)
        assert auto_annotate(doc, ner, rc, SHAPE_SCHEMA) == auto_annotate(doc, ner2, rc2, SHAPE_SCHEMA)

    def test_wrong_kind_rejected(self, shape_setup, tmp_path):
        path = tmp_path / "ner.npz"
        save_ner_model(shape_setup["ner"], str(path))
        with pytest.raises(ModelIOError, match="rc"):
            load_rc_model(str(path))

    def test_unknown_feature_spec_rejected(self, shape_setup, tmp_path):
        ner = shape_setup["ner"]
        path = tmp_path / "ner.npz"
        ner_alien = type(ner)(
            span_detector=ner.span_detector,
            entity_classifier=ner.entity_classifier,
            feature_spec="span-hash-v999",
            hyper=ner.hyper,
        )
        save_ner_model(ner_alien, str(path))
        with pytest.raises(ModelIOError, match="feature_spec"):
            load_ner_model(str(path))
