"""Micro-averaged precision / recall / F1 for entity annotations.

Matching convention: a prediction is a true positive iff gold contains an
entity with exactly the same (paragraph, span, type). Empty denominators
follow the 0 convention.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

from litkb.annotation.model import AnnotationSet


class EvalError(Exception):
    """Prediction and gold sets reference different documents."""


@dataclass(frozen=True)
class TypeStats:
    tp: int
    fp: int
    fn: int

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0


@dataclass(frozen=True)
class EvalResult:
    tp: int
    fp: int
    fn: int
    per_type: dict[str, TypeStats]

    @property
    def support(self) -> int:
        return self.tp + self.fn

    @property
    def precision(self) -> float:
        return self.tp / (self.tp + self.fp) if self.tp + self.fp else 0.0

    @property
    def recall(self) -> float:
        return self.tp / (self.tp + self.fn) if self.tp + self.fn else 0.0

    @property
    def micro_f1(self) -> float:
        p, r = self.precision, self.recall
        return 2 * p * r / (p + r) if p + r else 0.0

    def to_dict(self) -> dict:
        return {
            "precision": self.precision,
            "recall": self.recall,
            "micro_f1": self.micro_f1,
            "support": self.support,
            "counts": {"tp": self.tp, "fp": self.fp, "fn": self.fn},
            "per_type": {
                name: {
                    "precision": st.precision,
                    "recall": st.recall,
                    "f1": st.f1,
                    "tp": st.tp,
                    "fp": st.fp,
                    "fn": st.fn,
                    "support": st.support,
                }
                for name, st in sorted(self.per_type.items())
            },
        }


def _count(pred: AnnotationSet, gold: AnnotationSet) -> dict[str, list[int]]:
    pred_keys = {e.key() for e in pred.entities}
    gold_keys = {e.key() for e in gold.entities}
    counts: dict[str, list[int]] = {}
    for key in pred_keys | gold_keys:
        ent_type = key[3]
        stats = counts.setdefault(ent_type, [0, 0, 0])
        if key in pred_keys and key in gold_keys:
            stats[0] += 1
        elif key in pred_keys:
            stats[1] += 1
        else:
            stats[2] += 1
    return counts


def evaluate_micro_f1(pred: AnnotationSet, gold: AnnotationSet) -> EvalResult:
    if pred.doc_id != gold.doc_id:
        raise EvalError(
            f"document mismatch: pred {pred.doc_id!r} vs gold {gold.doc_id!r}"
        )
    return _result(_count(pred, gold))


def evaluate_many(pairs: Sequence[tuple[AnnotationSet, AnnotationSet]]) -> EvalResult:
    """Micro-average over several (pred, gold) document pairs."""
    merged: dict[str, list[int]] = {}
    for pred, gold in pairs:
        if pred.doc_id != gold.doc_id:
            raise EvalError(
                f"document mismatch: pred {pred.doc_id!r} vs gold {gold.doc_id!r}"
            )
        for ent_type, (tp, fp, fn) in _count(pred, gold).items():
            stats = merged.setdefault(ent_type, [0, 0, 0])
            stats[0] += tp
            stats[1] += fp
            stats[2] += fn
    return _result(merged)


def _result(counts: dict[str, list[int]]) -> EvalResult:
    per_type = {name: TypeStats(tp=c[0], fp=c[1], fn=c[2]) for name, c in counts.items()}
    return EvalResult(
        tp=sum(c[0] for c in counts.values()),
        fp=sum(c[1] for c in counts.values()),
        fn=sum(c[2] for c in counts.values()),
        per_type=per_type,
    )
