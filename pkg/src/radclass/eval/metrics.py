"""Confusion matrices and precision/recall/F1 with micro and macro averaging."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Hashable, Sequence

import numpy as np


@dataclass(frozen=True)
class ConfusionMatrix:
    """Rows are true classes, columns predicted classes."""

    counts: np.ndarray
    classes: tuple

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_dict(self) -> dict:
        return {"classes": list(self.classes), "counts": self.counts.tolist()}


def confusion(truth: Sequence[Hashable], preds: Sequence[Hashable], classes: Sequence[Hashable]) -> ConfusionMatrix:
    if len(truth) != len(preds):
        raise ValueError(f"length mismatch: {len(truth)} truths vs {len(preds)} predictions")
    index = {c: i for i, c in enumerate(classes)}
    k = len(index)
    try:
        t = np.fromiter((index[x] for x in truth), dtype=np.int64, count=len(truth))
        p = np.fromiter((index[x] for x in preds), dtype=np.int64, count=len(preds))
    except KeyError as exc:
        raise ValueError(f"unknown label {exc.args[0]!r}") from None
    counts = np.bincount(t * k + p, minlength=k * k).reshape(k, k)
    return ConfusionMatrix(counts, tuple(classes))


def _safe_div(a, b):
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    return np.divide(a, b, out=np.zeros(np.broadcast(a, b).shape), where=b != 0)


def _prf(tp, fp, fn):
    precision = _safe_div(tp, tp + fp)
    recall = _safe_div(tp, tp + fn)
    # harmonic mean in count form; exact when fp == fn (micro averaging)
    f1 = _safe_div(2 * np.asarray(tp), 2 * np.asarray(tp) + fp + fn)
    return precision, recall, f1


def f1_score(precision: float, recall: float) -> float:
    return float(_safe_div(2 * precision * recall, precision + recall))


def binary_metrics(cm: ConfusionMatrix, positive: int | Hashable = 1) -> tuple[float, float, float]:
    """(precision, recall, F1) for the positive class; 0/0 counts as 0."""
    if cm.counts.shape != (2, 2):
        raise ValueError("binary_metrics needs a 2x2 confusion matrix")
    pos = cm.classes.index(positive) if positive in cm.classes else int(positive)
    neg = 1 - pos
    c = cm.counts
    tp, fp, fn = c[pos, pos], c[neg, pos], c[pos, neg]
    p, r, f = _prf(tp, fp, fn)
    return float(p), float(r), float(f)


@dataclass(frozen=True)
class MetricsReport:
    classes: tuple
    precision: np.ndarray
    recall: np.ndarray
    f1: np.ndarray
    support: np.ndarray
    micro_precision: float
    micro_recall: float
    micro_f1: float
    macro_precision: float
    macro_recall: float
    macro_f1: float
    accuracy: float
    auc: dict = field(default_factory=dict)

    def rows(self) -> list[dict]:
        """One row per class followed by micro and macro rows."""
        out = [{"class": str(c), "precision": float(p), "recall": float(r), "f1": float(f), "support": int(s)}
               for c, p, r, f, s in zip(self.classes, self.precision, self.recall, self.f1, self.support)]
        total = int(self.support.sum())
        out.append({"class": "micro", "precision": self.micro_precision, "recall": self.micro_recall,
                    "f1": self.micro_f1, "support": total})
        out.append({"class": "macro", "precision": self.macro_precision, "recall": self.macro_recall,
                    "f1": self.macro_f1, "support": total})
        return out

    def to_dict(self) -> dict:
        return {"per_class": self.rows()[:-2], "micro": self.rows()[-2], "macro": self.rows()[-1],
                "accuracy": self.accuracy, "auc": dict(self.auc)}


def micro_macro(cm: ConfusionMatrix) -> MetricsReport:
    """Per-class metrics plus pooled (micro) and unweighted-mean (macro) aggregates."""
    c = cm.counts.astype(np.int64)
    if c.shape[0] < 2:
        raise ValueError("need at least 2 classes")
    tp = np.diag(c)
    fp = c.sum(axis=0) - tp
    fn = c.sum(axis=1) - tp
    p, r, f = _prf(tp, fp, fn)
    mp, mr, mf = _prf(tp.sum(), fp.sum(), fn.sum())
    total = c.sum()
    return MetricsReport(
        cm.classes, p, r, f, c.sum(axis=1),
        float(mp), float(mr), float(mf),
        float(p.mean()), float(r.mean()), float(f.mean()),
        float(tp.sum() / total) if total else 0.0,
    )
