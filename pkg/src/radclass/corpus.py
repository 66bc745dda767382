"""Report collections: loading, label schemas, stratified splits, synthesis."""

from __future__ import annotations

import csv
import json
import math
import warnings
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from types import MappingProxyType
from typing import Iterable, Mapping, Sequence

import numpy as np

OTHER = "other"


class CorpusError(ValueError):
    """Raised for malformed manifests and invalid corpus operations."""


@dataclass(frozen=True)
class Report:
    id: str
    text: str
    source: str | None = None

    def __post_init__(self):
        if not self.id:
            raise CorpusError("report id must be nonempty")


@dataclass(frozen=True)
class LabelSchema:
    kind: str
    classes: tuple[str, ...]
    positive_class: str | None = None

    def __post_init__(self):
        object.__setattr__(self, "classes", tuple(self.classes))
        if len(set(self.classes)) != len(self.classes):
            raise CorpusError(f"duplicate class names in schema: {self.classes}")
        if self.kind == "binary":
            if len(self.classes) != 2:
                raise CorpusError("binary schema needs exactly 2 classes")
            if self.positive_class not in self.classes:
                raise CorpusError(f"positive class {self.positive_class!r} not in schema")
        elif self.kind == "multiclass":
            if len(self.classes) < 2:
                raise CorpusError("multiclass schema needs at least 2 classes")
            if OTHER not in self.classes:
                raise CorpusError(f"multiclass schema must contain the fallback class {OTHER!r}")
        else:
            raise CorpusError(f"unknown schema kind {self.kind!r}")

    @classmethod
    def binary(cls, positive: str, negative: str | None = None) -> "LabelSchema":
        return cls("binary", (positive, negative or f"non-{positive}"), positive)

    @classmethod
    def multiclass(cls, classes: Iterable[str]) -> "LabelSchema":
        """Build a multiclass schema; ``"other"`` is appended when missing."""
        classes = list(classes)
        if OTHER not in classes:
            classes.append(OTHER)
        return cls("multiclass", tuple(classes))

    @property
    def negative_class(self) -> str:
        if self.kind != "binary":
            raise CorpusError("negative_class is only defined for binary schemas")
        return next(c for c in self.classes if c != self.positive_class)

    def index(self, label: str) -> int:
        return self.classes.index(label)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "classes": list(self.classes),
                "positive_class": self.positive_class}

    @classmethod
    def from_dict(cls, d: Mapping) -> "LabelSchema":
        return cls(d["kind"], tuple(d["classes"]), d.get("positive_class"))


@dataclass(frozen=True)
class LabeledCorpus:
    reports: tuple[Report, ...]
    labels: Mapping[str, str]
    schema: LabelSchema
    _index: Mapping[str, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        reports = tuple(self.reports)
        object.__setattr__(self, "reports", reports)
        index: dict[str, int] = {}
        for i, r in enumerate(reports):
            if r.id in index:
                raise CorpusError(f"duplicate report id {r.id!r}")
            index[r.id] = i
        object.__setattr__(self, "_index", MappingProxyType(index))
        labels = dict(self.labels)
        for rid, lab in labels.items():
            if rid not in index:
                raise CorpusError(f"label given for unknown report id {rid!r}")
            if lab not in self.schema.classes:
                raise CorpusError(f"report {rid!r}: label {lab!r} not in schema {list(self.schema.classes)}")
        object.__setattr__(self, "labels", MappingProxyType(labels))

    def __len__(self) -> int:
        return len(self.reports)

    def __iter__(self):
        return iter(self.reports)

    def __getitem__(self, report_id: str) -> Report:
        return self.reports[self._index[report_id]]

    @property
    def texts(self) -> list[str]:
        return [r.text for r in self.reports]

    @property
    def ids(self) -> list[str]:
        return [r.id for r in self.reports]

    @property
    def unlabeled_count(self) -> int:
        return len(self.reports) - len(self.labels)

    def label_list(self) -> list[str]:
        """Labels in report order; raises if any report is unlabeled."""
        missing = [r.id for r in self.reports if r.id not in self.labels]
        if missing:
            raise CorpusError(f"{len(missing)} unlabeled report(s), first: {missing[0]!r}")
        return [self.labels[r.id] for r in self.reports]

    def label_indices(self) -> np.ndarray:
        lookup = {c: i for i, c in enumerate(self.schema.classes)}
        return np.array([lookup[lab] for lab in self.label_list()], dtype=np.int64)

    def class_counts(self) -> dict[str, int]:
        counts = Counter(self.labels.values())
        return {c: counts.get(c, 0) for c in self.schema.classes}

    def subset(self, ids: Iterable[str]) -> "LabeledCorpus":
        """Sub-corpus holding ``ids`` in their original corpus order."""
        keep = sorted(self._index[i] for i in ids)
        reports = [self.reports[i] for i in keep]
        labels = {r.id: self.labels[r.id] for r in reports if r.id in self.labels}
        return LabeledCorpus(tuple(reports), labels, self.schema)


# ---------------------------------------------------------------------------
# ingestion


def load_corpus(manifest_path, schema: LabelSchema, allow_empty_text: bool = True) -> LabeledCorpus:
    """Read a JSONL manifest of ``{id, text, label?, source?}`` records.

    Errors carry the 1-based line number of the offending record.
    """
    path = Path(manifest_path)
    reports: list[Report] = []
    labels: dict[str, str] = {}
    seen: set[str] = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            if not isinstance(rec, dict) or "id" not in rec or "text" not in rec:
                raise CorpusError(f"{path}:{lineno}: record needs 'id' and 'text' fields")
            rid, text = str(rec["id"]), rec["text"]
            if not isinstance(text, str):
                raise CorpusError(f"{path}:{lineno}: 'text' must be a string")
            if not rid:
                raise CorpusError(f"{path}:{lineno}: empty id")
            if not text and not allow_empty_text:
                raise CorpusError(f"{path}:{lineno}: empty text for id {rid!r}")
            if rid in seen:
                raise CorpusError(f"{path}:{lineno}: duplicate id {rid!r}")
            seen.add(rid)
            label = rec.get("label")
            if label is not None:
                if label not in schema.classes:
                    raise CorpusError(
                        f"{path}:{lineno}: id {rid!r} has label {label!r} not in schema")
                labels[rid] = label
            reports.append(Report(rid, text, rec.get("source")))
    return LabeledCorpus(tuple(reports), labels, schema)


def read_manifest_labels(manifest_path) -> list[str]:
    """Distinct labels present in a manifest, sorted."""
    path = Path(manifest_path)
    found = set()
    with path.open(encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                rec = json.loads(line)
            except json.JSONDecodeError as exc:
                raise CorpusError(f"{path}:{lineno}: malformed JSON ({exc.msg})") from None
            lab = rec.get("label") if isinstance(rec, dict) else None
            if lab is not None:
                found.add(lab)
    return sorted(found)


def load_text_dir(directory, schema: LabelSchema, label_csv=None) -> LabeledCorpus:
    """Ingest a directory of ``.txt`` files; ids are the file stems.

    ``label_csv`` has ``id,label`` columns.
    """
    directory = Path(directory)
    reports = [Report(p.stem, p.read_text(encoding="utf-8"))
               for p in sorted(directory.glob("*.txt"))]
    labels: dict[str, str] = {}
    if label_csv is not None:
        with Path(label_csv).open(newline="", encoding="utf-8") as fh:
            for lineno, row in enumerate(csv.DictReader(fh), 2):
                if "id" not in row or "label" not in row:
                    raise CorpusError(f"{label_csv}:{lineno}: expected columns id,label")
                if row["label"] not in schema.classes:
                    raise CorpusError(
                        f"{label_csv}:{lineno}: id {row['id']!r} has label {row['label']!r} not in schema")
                labels[row["id"]] = row["label"]
    return LabeledCorpus(tuple(reports), labels, schema)


def write_manifest(corpus: LabeledCorpus, path) -> None:
    with Path(path).open("w", encoding="utf-8") as fh:
        for r in corpus.reports:
            rec = {"id": r.id, "text": r.text}
            if r.id in corpus.labels:
                rec["label"] = corpus.labels[r.id]
            if r.source is not None:
                rec["source"] = r.source
            fh.write(json.dumps(rec, ensure_ascii=False) + "\n")


# ---------------------------------------------------------------------------
# statistics and relabeling


def class_distribution(corpus: LabeledCorpus) -> dict[str, float]:
    """Fraction of labeled reports in each class. Unlabeled reports are skipped."""
    if len(corpus) == 0:
        raise CorpusError("empty corpus")
    counts = corpus.class_counts()
    total = sum(counts.values())
    if total == 0:
        raise CorpusError("corpus has no labeled reports")
    return {c: n / total for c, n in counts.items()}


def corpus_stats(corpus: LabeledCorpus) -> dict:
    return {
        "per_class_counts": corpus.class_counts(),
        "fractions": class_distribution(corpus),
        "unlabeled_count": corpus.unlabeled_count,
    }


def to_binary(corpus: LabeledCorpus, positive_class: str) -> LabeledCorpus:
    """Collapse every class other than ``positive_class`` into its complement."""
    schema = corpus.schema
    if schema.kind == "binary" and positive_class == schema.positive_class:
        return corpus
    if positive_class not in schema.classes:
        raise CorpusError(f"unknown positive class {positive_class!r}")
    new_schema = LabelSchema.binary(positive_class)
    neg = new_schema.negative_class
    labels = {rid: (positive_class if lab == positive_class else neg)
              for rid, lab in corpus.labels.items()}
    if positive_class not in labels.values():
        warnings.warn(f"positive class {positive_class!r} absent from data; all reports negative",
                      stacklevel=2)
    return LabeledCorpus(corpus.reports, labels, new_schema)


# ---------------------------------------------------------------------------
# splitting


@dataclass(frozen=True)
class SplitSpec:
    train_fraction: Fraction | float | str = Fraction(7, 10)
    seed: int = 0
    stratified: bool = True

    def __post_init__(self):
        frac = Fraction(str(self.train_fraction)) if not isinstance(self.train_fraction, Fraction) \
            else self.train_fraction
        if not 0 < frac < 1:
            raise CorpusError(f"train_fraction must lie in (0, 1), got {self.train_fraction}")
        object.__setattr__(self, "train_fraction", frac)
        if not 0 <= int(self.seed) < 2 ** 64:
            raise CorpusError("seed must be a 64-bit unsigned integer")


def _allocate(sizes: Sequence[int], frac: Fraction) -> list[int]:
    """Largest-remainder allocation of ceil(frac * total) train slots over groups."""
    target = math.ceil(frac * sum(sizes))
    exact = [frac * n for n in sizes]
    alloc = [math.floor(e) for e in exact]
    order = sorted(range(len(sizes)), key=lambda i: (-(exact[i] - alloc[i]), i))
    for i in order[: target - sum(alloc)]:
        alloc[i] += 1
    # keep both sides of every splittable group nonempty
    return [min(max(a, 1), n - 1) if n >= 2 else a for a, n in zip(alloc, sizes)]


def split(corpus: LabeledCorpus, spec: SplitSpec = SplitSpec()) -> tuple[LabeledCorpus, LabeledCorpus]:
    """Seeded train/test partition. Extra reports from rounding go to train."""
    labels = corpus.label_list()
    rng = np.random.default_rng(spec.seed)
    ids = corpus.ids
    if spec.stratified:
        groups: dict[str, list[str]] = {c: [] for c in corpus.schema.classes}
        for rid, lab in zip(ids, labels):
            groups[lab].append(rid)
        present = [c for c in corpus.schema.classes if groups[c]]
        small = [c for c in present if len(groups[c]) < 2]
        if small:
            raise CorpusError(f"stratified split needs >=2 reports per class; too few in {small}")
        alloc = _allocate([len(groups[c]) for c in present], spec.train_fraction)
        train_ids: list[str] = []
        for c, n_train in zip(present, alloc):
            members = groups[c]
            perm = rng.permutation(len(members))
            train_ids.extend(members[i] for i in perm[:n_train])
    else:
        (n_train,) = _allocate([len(ids)], spec.train_fraction) if len(ids) >= 2 else [len(ids)]
        perm = rng.permutation(len(ids))
        train_ids = [ids[i] for i in perm[:n_train]]
    train_set = set(train_ids)
    test_ids = [i for i in ids if i not in train_set]
    return corpus.subset(train_set), corpus.subset(test_ids)


# ---------------------------------------------------------------------------
# synthetic corpora

_LETTERS = np.array(list("abcdefghijklmnopqrstuvwxyz"))


def _pseudo_words(rng: np.random.Generator, n: int, taken: set[str]) -> list[str]:
    words = []
    while len(words) < n:
        length = int(rng.integers(4, 10))
        w = "".join(rng.choice(_LETTERS, size=length))
        if w not in taken:
            taken.add(w)
            words.append(w)
    return words


def synthesize_corpus(n_classes: int, docs_per_class: int | Sequence[int], vocab_per_class: int,
                      overlap_fraction: float = 0.0, seed: int = 0, doc_length: tuple[int, int] = (20, 60),
                      class_names: Sequence[str] | None = None) -> LabeledCorpus:
    """Generate a labeled corpus of pseudo-word documents.

    Each class owns ``vocab_per_class`` tokens, of which a fraction
    ``overlap_fraction`` is drawn from a pool shared by all classes and the
    rest is exclusive to the class. With zero overlap every token identifies
    its class, so the classes are linearly separable.

    ``docs_per_class`` may be a per-class sequence to build imbalanced corpora.
    The last class is named ``"other"`` unless ``class_names`` is given.
    """
    if n_classes < 2:
        raise CorpusError("n_classes must be >= 2")
    sizes = [docs_per_class] * n_classes if isinstance(docs_per_class, (int, np.integer)) \
        else list(docs_per_class)
    if len(sizes) != n_classes or min(sizes) < 1:
        raise CorpusError("docs_per_class must be >= 1 for each class")
    if vocab_per_class < 1:
        raise CorpusError("vocab_per_class must be >= 1")
    if not 0.0 <= overlap_fraction < 1.0:
        raise CorpusError("overlap_fraction must lie in [0, 1)")
    lo, hi = doc_length
    if not 1 <= lo <= hi:
        raise CorpusError("invalid doc_length range")

    if class_names is None:
        width = len(str(n_classes - 1))
        class_names = [f"class{i:0{width}d}" for i in range(n_classes - 1)] + [OTHER]
    if len(class_names) != n_classes:
        raise CorpusError("class_names length must equal n_classes")

    rng = np.random.default_rng(seed)
    n_shared = int(round(overlap_fraction * vocab_per_class))
    n_shared = min(n_shared, vocab_per_class - 1)
    taken: set[str] = set()
    pool = _pseudo_words(rng, vocab_per_class, taken) if n_shared else []
    vocabularies = []
    for _ in range(n_classes):
        shared = [pool[i] for i in sorted(rng.choice(len(pool), n_shared, replace=False))] if n_shared else []
        vocabularies.append(shared + _pseudo_words(rng, vocab_per_class - n_shared, taken))

    reports: list[Report] = []
    labels: dict[str, str] = {}
    total = sum(sizes)
    width = len(str(total))
    k = 0
    for c, (name, vocab) in enumerate(zip(class_names, vocabularies)):
        for _ in range(sizes[c]):
            length = int(rng.integers(lo, hi + 1))
            tokens = rng.choice(len(vocab), size=length)
            rid = f"doc{k:0{width}d}"
            reports.append(Report(rid, " ".join(vocab[t] for t in tokens) + "."))
            labels[rid] = name
            k += 1
    if OTHER in class_names:
        schema = LabelSchema.multiclass(class_names)
    elif n_classes == 2:
        schema = LabelSchema("binary", tuple(class_names), class_names[0])
    else:
        schema = LabelSchema.multiclass(class_names)
    return LabeledCorpus(tuple(reports), labels, schema)
