"""Classifier families, multiclass wrappers and coefficient inspection."""

from __future__ import annotations

import numpy as np

from ..preprocess import Vocabulary
from .base import ConvergenceWarning, Prediction
from .logreg import LogRegModel, logistic_gradient, logistic_objective, predict_logreg, train_logreg
from .multiclass import (FAMILIES, OvoModel, OvrModel, predict_ovo, predict_ovr, train_binary, train_ovo,
                         train_ovr)
from .svm import LinearSvmModel, predict_svm, svm_objective, train_linear_svm
from .tree import DecisionTreeModel, predict_tree, train_tree


def top_coefficients(model: LogRegModel | LinearSvmModel, vocab: Vocabulary, n: int) -> tuple[list[str], list[str]]:
    """Tokens with the ``n`` largest and ``n`` smallest coefficients.

    The full ordering sorts by coefficient descending, ties in lexicographic
    token order; the bottom list is the tail of that ordering reversed, so
    with ``n == V`` the two lists are exact reverses.
    """
    w = np.asarray(model.weights)
    if w.shape[0] != vocab.size:
        raise ValueError("model and vocabulary dimensions differ")
    if not 0 <= n <= vocab.size:
        raise ValueError(f"n must lie in [0, {vocab.size}]")
    tokens = vocab.tokens
    ranked = [tokens[i] for i in sorted(range(len(tokens)), key=lambda i: (-w[i], tokens[i]))]
    return ranked[:n], ranked[::-1][:n]


__all__ = [
    "ConvergenceWarning", "DecisionTreeModel", "FAMILIES", "LinearSvmModel", "LogRegModel", "OvoModel",
    "OvrModel", "Prediction", "logistic_gradient", "logistic_objective", "predict_logreg", "predict_ovo",
    "predict_ovr", "predict_svm", "predict_tree", "svm_objective", "top_coefficients", "train_binary",
    "train_linear_svm", "train_logreg", "train_ovo", "train_ovr", "train_tree",
]
