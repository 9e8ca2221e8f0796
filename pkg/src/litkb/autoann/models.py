"""Model containers and versioned model files.

Files are numpy .npz archives: a JSON metadata entry (kind, feature_spec,
hyperparameters, class lists) plus the nonzero weight entries. Loading a file
whose feature_spec id the current featurizers do not implement is an error.
"""

from __future__ import annotations

import json
from dataclasses import dataclass

import numpy as np

from litkb.autoann.features import PAIR_FEATURE_SPEC, SPAN_FEATURE_SPEC
from litkb.autoann.linear import Hyper, LinearScorer, MulticlassScorer

NONE_LABEL = "NONE"

_FORMAT_VERSION = 1
_KNOWN_SPECS = {SPAN_FEATURE_SPEC, PAIR_FEATURE_SPEC}


class ModelIOError(Exception):
    """Unreadable model file or incompatible feature_spec."""


@dataclass(eq=False)
class SpanDetector:
    scorer: LinearScorer
    tau: float
    losses: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if not 0.0 < self.tau < 1.0:
            raise ValueError(f"tau must be in (0, 1), got {self.tau}")


@dataclass(eq=False)
class NerModel:
    span_detector: SpanDetector
    entity_classifier: MulticlassScorer
    feature_spec: str
    hyper: Hyper

    @property
    def type_list(self) -> tuple[str, ...]:
        return self.entity_classifier.classes


@dataclass(eq=False)
class RcModel:
    scorer: MulticlassScorer  # classes include NONE
    feature_spec: str
    hyper: Hyper

    @property
    def relation_list(self) -> tuple[str, ...]:
        return self.scorer.classes


def _nonzero_flat(arr: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    flat = arr.ravel()
    idx = np.flatnonzero(flat).astype(np.int64)
    return idx, flat[idx].astype(np.float64)


def _from_flat(idx: np.ndarray, val: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    flat = np.zeros(int(np.prod(shape)), dtype=np.float64)
    flat[idx] = val
    return flat.reshape(shape)


def save_ner_model(model: NerModel, path: str) -> None:
    meta = {
        "format_version": _FORMAT_VERSION,
        "kind": "ner",
        "feature_spec": model.feature_spec,
        "hyper": model.hyper.to_dict(),
        "tau": model.span_detector.tau,
        "type_list": list(model.type_list),
        "dim": model.entity_classifier.dim,
    }
    det_idx, det_val = _nonzero_flat(model.span_detector.scorer.weights)
    cls_idx, cls_val = _nonzero_flat(model.entity_classifier.weights)
    with open(path, "wb") as fp:
        np.savez(
            fp,
            meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8),
            det_idx=det_idx,
            det_val=det_val,
            det_bias=np.float64(model.span_detector.scorer.bias),
            cls_idx=cls_idx,
            cls_val=cls_val,
            cls_bias=model.entity_classifier.bias,
            det_losses=np.asarray(model.span_detector.losses, dtype=np.float64),
        )


def _read_meta(data: np.lib.npyio.NpzFile, expected_kind: str) -> dict:
    try:
        meta = json.loads(bytes(data["meta"]).decode("utf-8"))
    except (KeyError, ValueError) as exc:
        raise ModelIOError(f"unreadable model metadata: {exc}") from exc
    if meta.get("kind") != expected_kind:
        raise ModelIOError(f"expected a {expected_kind} model, got {meta.get('kind')!r}")
    if meta.get("feature_spec") not in _KNOWN_SPECS:
        raise ModelIOError(
            f"unsupported feature_spec {meta.get('feature_spec')!r}; "
            f"this build implements {sorted(_KNOWN_SPECS)}"
        )
    return meta


def load_ner_model(path: str) -> NerModel:
    try:
        data = np.load(path)
    except (OSError, ValueError) as exc:
        raise ModelIOError(f"cannot read model file {path}: {exc}") from exc
    meta = _read_meta(data, "ner")
    if meta["feature_spec"] != SPAN_FEATURE_SPEC:
        raise ModelIOError(
            f"ner model has feature_spec {meta['feature_spec']!r}, "
            f"expected {SPAN_FEATURE_SPEC!r}"
        )
    dim = int(meta["dim"])
    types = tuple(meta["type_list"])
    detector = SpanDetector(
        scorer=LinearScorer(
            weights=_from_flat(data["det_idx"], data["det_val"], (dim,)),
            bias=float(data["det_bias"]),
        ),
        tau=float(meta["tau"]),
        losses=tuple(float(x) for x in data["det_losses"]),
    )
    classifier = MulticlassScorer(
        classes=types,
        weights=_from_flat(data["cls_idx"], data["cls_val"], (len(types), dim)),
        bias=np.asarray(data["cls_bias"], dtype=np.float64),
    )
    return NerModel(
        span_detector=detector,
        entity_classifier=classifier,
        feature_spec=meta["feature_spec"],
        hyper=Hyper.from_dict(meta["hyper"]),
    )


def save_rc_model(model: RcModel, path: str) -> None:
    meta = {
        "format_version": _FORMAT_VERSION,
        "kind": "rc",
        "feature_spec": model.feature_spec,
        "hyper": model.hyper.to_dict(),
        "relation_list": list(model.relation_list),
        "dim": model.scorer.dim,
    }
    idx, val = _nonzero_flat(model.scorer.weights)
    with open(path, "wb") as fp:
        np.savez(
            fp,
            meta=np.frombuffer(json.dumps(meta, sort_keys=True).encode("utf-8"), dtype=np.uint8),
            rc_idx=idx,
            rc_val=val,
            rc_bias=model.scorer.bias,
        )


def load_rc_model(path: str) -> RcModel:
    try:
        data = np.load(path)
    except (OSError, ValueError) as exc:
        raise ModelIOError(f"cannot read model file {path}: {exc}") from exc
    meta = _read_meta(data, "rc")
    if meta["feature_spec"] != PAIR_FEATURE_SPEC:
        raise ModelIOError(
            f"rc model has feature_spec {meta['feature_spec']!r}, "
            f"expected {PAIR_FEATURE_SPEC!r}"
        )
    dim = int(meta["dim"])
    classes = tuple(meta["relation_list"])
    scorer = MulticlassScorer(
        classes=classes,
        weights=_from_flat(data["rc_idx"], data["rc_val"], (len(classes), dim)),
        bias=np.asarray(data["rc_bias"], dtype=np.float64),
    )
    return RcModel(scorer=scorer, feature_spec=meta["feature_spec"], hyper=Hyper.from_dict(meta["hyper"]))
