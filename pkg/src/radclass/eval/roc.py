"""ROC curves and AUC for binary and one-vs-rest multiclass scores."""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np

MACRO_GRID_POINTS = 101


@dataclass(frozen=True)
class RocCurve:
    fpr: np.ndarray
    tpr: np.ndarray
    thresholds: np.ndarray
    auc: float

    def to_dict(self) -> dict:
        return {"fpr": self.fpr.tolist(), "tpr": self.tpr.tolist(),
                "thresholds": self.thresholds.tolist(), "auc": self.auc}


def trapezoid(x: np.ndarray, y: np.ndarray) -> float:
    x = np.asarray(x, dtype=np.float64)
    y = np.asarray(y, dtype=np.float64)
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) * 0.5))


def roc_auc(scores, truth) -> RocCurve:
    """Sweep every distinct score as a threshold, highest first.

    Tied scores move the curve diagonally, which makes the trapezoid area
    equal the probability that a random positive outscores a random
    negative with ties counted as one half.
    """
    s = np.asarray(scores, dtype=np.float64)
    y = np.asarray(truth).astype(bool)
    if s.shape != y.shape or s.ndim != 1:
        raise ValueError("scores and truth must be 1-d arrays of equal length")
    n_pos = int(y.sum())
    n_neg = y.size - n_pos
    if n_pos == 0 or n_neg == 0:
        raise ValueError("ROC needs both positive and negative examples")
    order = np.argsort(-s, kind="mergesort")
    s_sorted, y_sorted = s[order], y[order]
    # last index of each run of equal scores
    ends = np.flatnonzero(np.r_[s_sorted[1:] != s_sorted[:-1], True])
    tps = np.cumsum(y_sorted)[ends]
    fps = (ends + 1) - tps
    tpr = np.r_[0.0, tps / n_pos]
    fpr = np.r_[0.0, fps / n_neg]
    thresholds = np.r_[np.inf, s_sorted[ends]]
    return RocCurve(fpr, tpr, thresholds, trapezoid(fpr, tpr))


def _upper_interp(grid: np.ndarray, fpr: np.ndarray, tpr: np.ndarray) -> np.ndarray:
    # collapse vertical runs to their top point, then interpolate linearly
    xs, idx = np.unique(fpr, return_index=True)
    last = np.r_[idx[1:] - 1, fpr.size - 1]
    return np.interp(grid, xs, tpr[last])


def multiclass_roc(scores, truth, n_classes: int | None = None) -> tuple[RocCurve, RocCurve]:
    """Micro- and macro-averaged one-vs-rest ROC curves.

    Micro pools every (example, class) decision into one binary problem.
    Macro averages the per-class curves on a 101-point false-positive-rate
    grid; classes missing from ``truth`` are skipped with a warning.
    """
    S = np.asarray(scores, dtype=np.float64)
    y = np.asarray(truth, dtype=np.int64)
    if S.ndim != 2 or S.shape[0] != y.shape[0]:
        raise ValueError("scores must be (n_examples, n_classes) matching truth")
    k = S.shape[1] if n_classes is None else n_classes
    if k < 2 or S.shape[1] != k:
        raise ValueError("need at least 2 score columns, one per class")
    if not np.all(np.isfinite(S)):
        raise ValueError("scores must be finite")
    onehot = np.zeros_like(S, dtype=bool)
    onehot[np.arange(y.size), y] = True
    micro = roc_auc(S.ravel(), onehot.ravel())

    grid = np.linspace(0.0, 1.0, MACRO_GRID_POINTS)
    curves = []
    for c in range(k):
        pos = onehot[:, c]
        if pos.all() or not pos.any():
            warnings.warn(f"class {c} has no {'negatives' if pos.all() else 'positives'}; "
                          "excluded from the macro average", stacklevel=2)
            continue
        r = roc_auc(S[:, c], pos)
        curves.append(_upper_interp(grid, r.fpr, r.tpr))
    if not curves:
        raise ValueError("no class has both positives and negatives")
    mean_tpr = np.mean(curves, axis=0)
    fpr = np.r_[0.0, grid]
    tpr = np.r_[0.0, mean_tpr]
    macro = RocCurve(fpr, tpr, np.full(fpr.shape, np.nan), trapezoid(fpr, tpr))
    return micro, macro
