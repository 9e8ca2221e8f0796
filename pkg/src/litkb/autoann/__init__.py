"""Auto-annotation: rule-based (regex/gazetteer) and learned (two-stage NER
plus pairwise relation classification), with training and micro-F1 evaluation.

The learned scorers are hashed sparse linear models trained by deterministic
full-batch gradient descent; a transformer scorer can be plugged in behind
the same featurize/score interface.
"""

from litkb.autoann.features import (
    PAIR_FEATURE_SPEC,
    SPAN_FEATURE_SPEC,
    build_matrix,
    featurize_span,
    pair_features,
    span_features,
    token_shape,
)
from litkb.autoann.linear import Hyper, LinearScorer, MulticlassScorer, TrainError
from litkb.autoann.spans import crosses, decode_nested, enumerate_spans
from litkb.autoann.gazetteer import (
    GazetteerRule,
    load_rules,
    load_rules_file,
    regex_annotate,
    save_rules,
)
from litkb.autoann.models import (
    ModelIOError,
    NerModel,
    RcModel,
    SpanDetector,
    load_ner_model,
    load_rc_model,
    save_ner_model,
    save_rc_model,
)
from litkb.autoann.train import (
    train_entity_classifier,
    train_ner,
    train_rc,
    train_span_detector,
)
from litkb.autoann.predict import ModelSchemaError, auto_annotate
from litkb.autoann.evaluate import EvalError, EvalResult, TypeStats, evaluate_micro_f1, evaluate_many

__all__ = [
    "EvalError",
    "EvalResult",
    "GazetteerRule",
    "Hyper",
    "LinearScorer",
    "ModelIOError",
    "ModelSchemaError",
    "MulticlassScorer",
    "NerModel",
    "PAIR_FEATURE_SPEC",
    "RcModel",
    "SPAN_FEATURE_SPEC",
    "SpanDetector",
    "TrainError",
    "TypeStats",
    "auto_annotate",
    "build_matrix",
    "crosses",
    "decode_nested",
    "enumerate_spans",
    "evaluate_many",
    "evaluate_micro_f1",
    "featurize_span",
    "load_ner_model",
    "load_rc_model",
    "load_rules",
    "load_rules_file",
    "pair_features",
    "regex_annotate",
    "save_ner_model",
    "save_rc_model",
    "save_rules",
    "span_features",
    "token_shape",
    "train_entity_classifier",
    "train_ner",
    "train_rc",
    "train_span_detector",
]
