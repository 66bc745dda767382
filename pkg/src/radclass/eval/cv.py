"""Seeded k-fold cross-validation with mean ± interval summaries."""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Protocol, Sequence

import numpy as np

from ..corpus import CorpusError, LabeledCorpus, Report
from .metrics import binary_metrics, confusion, micro_macro

Z95 = 1.96


class Predictor(Protocol):
    def predict_labels(self, reports: Sequence[Report]) -> list[str]: ...


def stratified_folds(labels: Sequence[str], k: int, seed: int, stratified: bool = True) -> np.ndarray:
    """Fold index for every example; fold sizes differ by at most one."""
    if k < 2:
        raise ValueError("k must be >= 2")
    n = len(labels)
    if n < k:
        raise ValueError(f"cannot make {k} folds from {n} examples")
    rng = np.random.default_rng(seed)
    folds = np.empty(n, dtype=np.int64)
    if not stratified:
        folds[rng.permutation(n)] = np.arange(n) % k
        return folds
    groups: dict[str, list[int]] = {}
    for i, lab in enumerate(labels):
        groups.setdefault(lab, []).append(i)
    too_small = sorted(c for c, g in groups.items() if len(g) < k)
    if too_small:
        raise ValueError(f"k={k} exceeds the size of class(es) {too_small}")
    offset = 0
    for c in sorted(groups):
        members = np.asarray(groups[c])[rng.permutation(len(groups[c]))]
        folds[members] = (offset + np.arange(members.size)) % k
        offset += members.size
    return folds


@dataclass(frozen=True)
class MetricSummary:
    values: tuple[float, ...]
    mean: float
    std: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "MetricSummary":
        v = np.asarray(values, dtype=np.float64)
        std = float(v.std(ddof=1)) if v.size > 1 else 0.0
        return cls(tuple(float(x) for x in v), float(v.mean()), std)

    @property
    def half_width(self) -> float:
        return Z95 * self.std

    @property
    def ci95(self) -> tuple[float, float]:
        """mean +/- 1.96 std of the fold values (unclipped)."""
        return self.mean - self.half_width, self.mean + self.half_width

    @property
    def se_ci95(self) -> tuple[float, float]:
        """mean +/- 1.96 std / sqrt(k), the standard-error interval."""
        h = Z95 * self.std / math.sqrt(len(self.values))
        return self.mean - h, self.mean + h

    def display(self, digits: int = 2) -> str:
        return f"{self.mean:.{digits}f} ± {self.half_width:.{digits}f}"

    def to_dict(self) -> dict:
        lo, hi = self.ci95
        slo, shi = self.se_ci95
        return {"values": list(self.values), "mean": self.mean, "std": self.std,
                "ci95": [lo, hi], "ci95_display": [max(lo, 0.0), min(hi, 1.0)], "se_ci95": [slo, shi]}


@dataclass(frozen=True)
class CvReport:
    k: int
    precision: MetricSummary
    recall: MetricSummary
    f1: MetricSummary
    fold_sizes: tuple[int, ...]
    average: str

    def to_dict(self) -> dict:
        return {"k": self.k, "average": self.average, "fold_sizes": list(self.fold_sizes),
                "precision": self.precision.to_dict(), "recall": self.recall.to_dict(),
                "f1": self.f1.to_dict()}


def kfold_cv(corpus: LabeledCorpus, k: int, trainer: Callable[[LabeledCorpus], Predictor], seed: int = 0,
             stratified: bool = True, average: str | None = None) -> CvReport:
    """Train on k-1 folds, score the held-out fold, summarize over folds.

    ``average`` defaults to the positive class for binary schemas and to
    macro averaging otherwise ("micro" is also accepted).
    """
    labels = corpus.label_list()
    schema = corpus.schema
    if average is None:
        average = "binary" if schema.kind == "binary" else "macro"
    if average not in ("binary", "micro", "macro"):
        raise ValueError(f"unknown average {average!r}")
    if average == "binary" and schema.kind != "binary":
        raise CorpusError("binary averaging needs a binary schema")
    folds = stratified_folds(labels, k, seed, stratified)
    ids = np.asarray(corpus.ids, dtype=object)
    ps, rs, fs, sizes = [], [], [], []
    for f in range(k):
        held = folds == f
        train = corpus.subset(ids[~held].tolist())
        test = corpus.subset(ids[held].tolist())
        model = trainer(train)
        preds = model.predict_labels(test.reports)
        cm = confusion(test.label_list(), preds, schema.classes)
        if average == "binary":
            p, r, f1 = binary_metrics(cm, schema.positive_class)
        else:
            rep = micro_macro(cm)
            p, r, f1 = ((rep.micro_precision, rep.micro_recall, rep.micro_f1) if average == "micro"
                        else (rep.macro_precision, rep.macro_recall, rep.macro_f1))
        ps.append(p)
        rs.append(r)
        fs.append(f1)
        sizes.append(int(held.sum()))
    return CvReport(k, MetricSummary.of(ps), MetricSummary.of(rs), MetricSummary.of(fs), tuple(sizes), average)
