"""Shared pieces for the classifier families."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class ConvergenceWarning(UserWarning):
    pass


@dataclass(frozen=True)
class Prediction:
    """Predicted class index plus per-class scores.

    ``probabilities`` is set only when the model yields calibrated
    probabilities (logistic regression, trees).
    """

    label: int
    scores: np.ndarray
    probabilities: np.ndarray | None = None


def check_dimension(X, n_features: int) -> None:
    if X.shape[1] != n_features:
        raise ValueError(f"feature dimension {X.shape[1]} does not match model ({n_features})")


def check_binary_labels(y, n: int) -> np.ndarray:
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {y.shape}")
    if y.dtype == bool:
        y = y.astype(np.int64)
    if not np.isin(y, (0, 1)).all():
        raise ValueError("binary labels must be 0/1")
    y = y.astype(np.int64)
    if y.min() == y.max():
        raise ValueError("training labels contain a single class")
    return y


def check_class_labels(y, n: int, n_classes: int | None = None) -> tuple[np.ndarray, int]:
    y = np.asarray(y)
    if y.shape != (n,):
        raise ValueError(f"expected {n} labels, got shape {y.shape}")
    if n == 0:
        raise ValueError("empty training set")
    if not np.issubdtype(y.dtype, np.integer):
        raise ValueError("class labels must be integer indices")
    if y.min() < 0:
        raise ValueError("class indices must be non-negative")
    k = int(y.max()) + 1 if n_classes is None else n_classes
    if y.max() >= k:
        raise ValueError(f"class index {y.max()} out of range for {k} classes")
    return y.astype(np.int64), k


def class_weight_vector(y01: np.ndarray, class_weight) -> np.ndarray:
    """Per-class weights (negative, positive)."""
    if class_weight is None:
        return np.ones(2)
    if class_weight == "balanced":
        counts = np.bincount(y01, minlength=2).astype(np.float64)
        return counts.sum() / (2.0 * counts)
    w = np.asarray(class_weight, dtype=np.float64)
    if w.shape != (2,) or not np.all(w > 0):
        raise ValueError("class_weight must be None, 'balanced' or two positive numbers")
    return w
