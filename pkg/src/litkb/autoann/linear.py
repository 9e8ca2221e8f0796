"""Sparse logistic models trained by deterministic full-batch gradient descent.

All-zeros initialization, fixed epoch count, single-threaded: identical
records and hyperparameters give bitwise-identical parameters. The bias is
not regularized.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import csr_matrix
from scipy.special import expit


class TrainError(Exception):
    """Training precondition not met (e.g. no positive examples)."""


@dataclass(frozen=True)
class Hyper:
    epochs: int = 200
    learning_rate: float = 0.5
    l2: float = 1e-4
    L_max: int = 8
    tau: float = 0.5
    feature_dim: int = 2**18

    def to_dict(self) -> dict:
        return {
            "epochs": self.epochs,
            "learning_rate": self.learning_rate,
            "l2": self.l2,
            "L_max": self.L_max,
            "tau": self.tau,
            "feature_dim": self.feature_dim,
        }

    @staticmethod
    def from_dict(obj: dict) -> "Hyper":
        return Hyper(
            epochs=int(obj["epochs"]),
            learning_rate=float(obj["learning_rate"]),
            l2=float(obj["l2"]),
            L_max=int(obj["L_max"]),
            tau=float(obj["tau"]),
            feature_dim=int(obj["feature_dim"]),
        )


@dataclass(eq=False)
class LinearScorer:
    """Binary scorer: calibrated probability ``sigmoid(x . w + b)``."""

    weights: np.ndarray  # (D,) float64
    bias: float

    @property
    def dim(self) -> int:
        return int(self.weights.shape[0])

    def score(self, X: csr_matrix) -> np.ndarray:
        return expit(X @ self.weights + self.bias)


@dataclass(eq=False)
class MulticlassScorer:
    """One-vs-rest multiclass scorer; predicts the argmax class, ties going
    to the earlier class in ``classes``."""

    classes: tuple[str, ...]
    weights: np.ndarray  # (C, D) float64
    bias: np.ndarray  # (C,) float64

    @property
    def dim(self) -> int:
        return int(self.weights.shape[1])

    def logits(self, X: csr_matrix) -> np.ndarray:
        return X @ self.weights.T + self.bias

    def predict(self, X: csr_matrix) -> list[str]:
        z = self.logits(X)
        return [self.classes[k] for k in np.argmax(z, axis=1)]


def _log_loss(z: np.ndarray, y: np.ndarray) -> float:
    # mean log(1 + exp(-margin)), computed stably
    margin = z * (2.0 * y - 1.0)
    return float(np.mean(np.logaddexp(0.0, -margin)))


@dataclass
class FitResult:
    weights: np.ndarray
    bias: float
    losses: tuple[float, ...] = field(default=())


def fit_binary(X: csr_matrix, y: np.ndarray, hyper: Hyper) -> FitResult:
    """Full-batch gradient descent on L2-regularized mean logistic loss.

    Returns the regularized training loss recorded before every update and
    once after the last (``epochs + 1`` values).
    """
    n, dim = X.shape
    if n == 0:
        raise TrainError("no training examples")
    Xt = X.T.tocsr()
    w = np.zeros(dim, dtype=np.float64)
    b = 0.0
    y = np.asarray(y, dtype=np.float64)
    losses = []
    for _ in range(hyper.epochs):
        z = X @ w + b
        losses.append(_log_loss(z, y) + 0.5 * hyper.l2 * float(w @ w))
        g = (expit(z) - y) / n
        w -= hyper.learning_rate * (Xt @ g + hyper.l2 * w)
        b -= hyper.learning_rate * float(g.sum())
    z = X @ w + b
    losses.append(_log_loss(z, y) + 0.5 * hyper.l2 * float(w @ w))
    return FitResult(weights=w, bias=b, losses=tuple(losses))


def fit_ovr(
    X: csr_matrix, labels: list[str], classes: tuple[str, ...], hyper: Hyper
) -> MulticlassScorer:
    """Fit one binary model per class (class vs rest)."""
    n, dim = X.shape
    W = np.zeros((len(classes), dim), dtype=np.float64)
    b = np.zeros(len(classes), dtype=np.float64)
    labels_arr = np.asarray(labels)
    for k, cls in enumerate(classes):
        y = (labels_arr == cls).astype(np.float64)
        fit = fit_binary(X, y, hyper)
        W[k] = fit.weights
        b[k] = fit.bias
    return MulticlassScorer(classes=tuple(classes), weights=W, bias=b)
