"""Term-list n-gram threshold classifier for one positive report class.

Bigrams and trigrams are collected from the positive training reports,
kept when they contain at least one curated term, and every report is
summarized by the fraction of its n-grams that fall in that set. A single
threshold on this fraction separates the classes; it is placed at the
midpoint of the gap between the negative class's upper limit and the
positive class's lower limit, then rounded up onto a 0.05 grid.
"""

from __future__ import annotations

import json
import math
from collections import Counter
from dataclasses import asdict, dataclass, field
from importlib import resources
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

Ngram = tuple[str, ...]


class NoGapError(ValueError):
    """Class fraction intervals overlap, so no threshold can be placed."""


@dataclass(frozen=True)
class NgramRules:
    bigram_min_freq: int = 5
    bigram_min_word_len: int = 3
    trigram_min_freq: int = 1
    trigram_min_word_len: int = 2
    forbid_numeric_chars: bool = True

    def __post_init__(self):
        for name in ("bigram_min_freq", "bigram_min_word_len", "trigram_min_freq", "trigram_min_word_len"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")

    def for_order(self, order: int) -> tuple[int, int]:
        """(min_freq, min_word_len) for n-grams of ``order``."""
        if order == 2:
            return self.bigram_min_freq, self.bigram_min_word_len
        if order == 3:
            return self.trigram_min_freq, self.trigram_min_word_len
        raise ValueError(f"order must be 2 or 3, got {order}")


def load_terms(path=None) -> frozenset[str]:
    """Read a term list: one token per line, ``#`` starts a comment.

    Without a path the packaged chest X-ray list is returned.
    """
    if path is None:
        text = resources.files("radclass").joinpath("data/cxr_terms.txt").read_text(encoding="utf-8")
    else:
        text = Path(path).read_text(encoding="utf-8")
    terms = set()
    for line in text.splitlines():
        line = line.split("#", 1)[0].strip()
        if line:
            terms.add(line.lower())
    return frozenset(terms)


def ngrams(tokens: Sequence[str], order: int) -> list[Ngram]:
    return [tuple(tokens[i:i + order]) for i in range(len(tokens) - order + 1)]


def _word_ok(word: str, min_len: int, forbid_numeric: bool) -> bool:
    return len(word) >= min_len and not (forbid_numeric and any(ch.isdigit() for ch in word))


def build_corpus_ngrams(positive_reports: Sequence[Sequence[str]], rules: NgramRules = NgramRules(),
                        order: int = 3) -> Counter:
    """Frequencies of rule-conforming n-grams pooled over the reports.

    N-grams never span two reports. Entries below the order's minimum
    frequency are removed.
    """
    if not positive_reports:
        raise ValueError("no reports to extract n-grams from")
    min_freq, min_len = rules.for_order(order)
    counts: Counter = Counter()
    for tokens in positive_reports:
        counts.update(g for g in ngrams(tokens, order)
                      if all(_word_ok(w, min_len, rules.forbid_numeric_chars) for w in g))
    return Counter({g: n for g, n in counts.items() if n >= min_freq})


def filter_by_terms(grams: Iterable[Ngram], terms: Iterable[str]) -> frozenset[Ngram]:
    terms = frozenset(terms)
    return frozenset(g for g in grams if any(w in terms for w in g))


@dataclass(frozen=True)
class NgramSets:
    bigrams: frozenset[Ngram] = frozenset()
    trigrams: frozenset[Ngram] = frozenset()

    def for_order(self, order: int) -> frozenset[Ngram]:
        if order == 2:
            return self.bigrams
        if order == 3:
            return self.trigrams
        raise ValueError(f"order must be 2 or 3, got {order}")


def build_ngram_sets(positive_reports: Sequence[Sequence[str]], terms: Iterable[str],
                     rules: NgramRules = NgramRules()) -> NgramSets:
    terms = frozenset(terms)
    return NgramSets(filter_by_terms(build_corpus_ngrams(positive_reports, rules, 2), terms),
                     filter_by_terms(build_corpus_ngrams(positive_reports, rules, 3), terms))


def ngram_fraction(report: Sequence[str], grams: frozenset[Ngram], order: int = 3,
                   distinct: bool = False) -> float:
    """Share of the report's n-grams that belong to ``grams``.

    Counts occurrences unless ``distinct`` is set. Reports too short to hold
    one n-gram score 0.
    """
    seq = ngrams(report, order)
    if distinct:
        seq = list(set(seq))
    if not seq:
        return 0.0
    return sum(g in grams for g in seq) / len(seq)


@dataclass(frozen=True)
class ClassStats:
    mean: float
    std: float
    n: int
    min: float
    max: float

    @classmethod
    def of(cls, values: Sequence[float]) -> "ClassStats":
        v = np.asarray(values, dtype=np.float64)
        if v.size < 2:
            raise ValueError("need at least 2 reports per class for a sample standard deviation")
        return cls(float(v.mean()), float(v.std(ddof=1)), int(v.size), float(v.min()), float(v.max()))


@dataclass(frozen=True)
class FractionStats:
    order: int
    positive: ClassStats
    negative: ClassStats


def compute_stats(reports: Sequence[Sequence[str]], is_positive: Sequence[bool], sets: NgramSets,
                  order: int = 3, distinct: bool = False) -> FractionStats:
    """Per-class sample mean and standard deviation of the n-gram fraction."""
    flags = np.asarray(is_positive, dtype=bool)
    if flags.shape != (len(reports),):
        raise ValueError("is_positive must have one entry per report")
    grams = sets.for_order(order)
    fr = np.array([ngram_fraction(r, grams, order, distinct) for r in reports])
    return FractionStats(order, ClassStats.of(fr[flags]), ClassStats.of(fr[~flags]))


def class_limits(stats: FractionStats, limits: str = "std") -> tuple[float, float]:
    """(negative upper limit, positive lower limit).

    ``"std"`` uses mean +/- one sample std; ``"extreme"`` uses observed max/min.
    """
    if limits == "std":
        return stats.negative.mean + stats.negative.std, stats.positive.mean - stats.positive.std
    if limits == "extreme":
        return stats.negative.max, stats.positive.min
    raise ValueError(f"unknown limits {limits!r}")


def round_up_to_grid(x: float, grid: float = 0.05) -> float:
    steps = math.ceil(round(x / grid, 9))
    return round(steps * grid, 10)


@dataclass(frozen=True)
class ThresholdModel:
    sets: NgramSets
    order: int
    threshold: float
    midpoint: float
    stats: FractionStats
    terms: frozenset[str] = frozenset()
    rules: NgramRules = field(default_factory=NgramRules)
    extra_stats: tuple[FractionStats, ...] = ()
    distinct: bool = False

    def fraction(self, report: Sequence[str]) -> float:
        return ngram_fraction(report, self.sets.for_order(self.order), self.order, self.distinct)

    def to_dict(self) -> dict:
        def stats_dict(s: FractionStats):
            return {"order": s.order, "positive": asdict(s.positive), "negative": asdict(s.negative)}

        return {
            "rules": asdict(self.rules),
            "terms": sorted(self.terms),
            "bigrams": sorted(list(g) for g in self.sets.bigrams),
            "trigrams": sorted(list(g) for g in self.sets.trigrams),
            "order": self.order,
            "distinct": self.distinct,
            "stats": [stats_dict(s) for s in (self.stats, *self.extra_stats)],
            "midpoint": self.midpoint,
            "threshold": self.threshold,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ThresholdModel":
        def stats_of(s):
            return FractionStats(s["order"], ClassStats(**s["positive"]), ClassStats(**s["negative"]))

        stats = [stats_of(s) for s in d["stats"]]
        sets = NgramSets(frozenset(tuple(g) for g in d["bigrams"]), frozenset(tuple(g) for g in d["trigrams"]))
        return cls(sets, d["order"], d["threshold"], d["midpoint"], stats[0], frozenset(d["terms"]),
                   NgramRules(**d["rules"]), tuple(stats[1:]), d.get("distinct", False))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), indent=1, sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "ThresholdModel":
        return cls.from_dict(json.loads(Path(path).read_text(encoding="utf-8")))


def fit_threshold(stats: FractionStats, sets: NgramSets = NgramSets(), limits: str = "std",
                  grid: float = 0.05, **extra) -> ThresholdModel:
    """Place the decision threshold in the gap between the class intervals.

    Raises :class:`NoGapError` when the negative upper limit reaches the
    positive lower limit.
    """
    upper_neg, lower_pos = class_limits(stats, limits)
    if not upper_neg < lower_pos:
        raise NoGapError(
            f"class intervals overlap: negative upper limit {upper_neg:.4g} >= positive lower limit {lower_pos:.4g}")
    midpoint = 0.5 * (upper_neg + lower_pos)
    threshold = round_up_to_grid(midpoint, grid) if grid else midpoint
    if not (stats.negative.mean < threshold < stats.positive.mean and 0 < threshold < 1):
        threshold = midpoint
    return ThresholdModel(sets, stats.order, threshold, midpoint, stats, **extra)


def classify(report: Sequence[str], model: ThresholdModel) -> bool:
    """Positive iff the report's fraction is strictly above the threshold."""
    return model.fraction(report) > model.threshold


def fit_baseline(reports: Sequence[Sequence[str]], is_positive: Sequence[bool], terms: Iterable[str],
                 rules: NgramRules = NgramRules(), order: int | str = 3, limits: str = "std",
                 distinct: bool = False) -> ThresholdModel:
    """Build n-gram sets from the positive reports and fit the threshold.

    ``order="auto"`` picks whichever of bigrams/trigrams leaves the wider gap.
    """
    flags = np.asarray(is_positive, dtype=bool)
    positives = [r for r, f in zip(reports, flags) if f]
    terms = frozenset(terms)
    sets = build_ngram_sets(positives, terms, rules)
    by_order = {o: compute_stats(reports, flags, sets, o, distinct) for o in (2, 3)}
    if order == "auto":
        def gap(o):
            lo, hi = class_limits(by_order[o], limits)
            return hi - lo
        order = max((3, 2), key=gap)
    if order not in (2, 3):
        raise ValueError(f"order must be 2, 3 or 'auto', got {order!r}")
    other = 2 if order == 3 else 3
    return fit_threshold(by_order[order], sets, limits, terms=terms, rules=rules,
                         extra_stats=(by_order[other],), distinct=distinct)
