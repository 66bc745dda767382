"""End-to-end text classifier: cleaning, featurization, model, and the model file."""

from __future__ import annotations

import json
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

import numpy as np

from .corpus import CorpusError, LabeledCorpus, LabelSchema, Report
from .features import DocTermMatrix, TfidfModel, apply_tfidf, count_vectorize, fit_tfidf
from .models import (DecisionTreeModel, LinearSvmModel, LogRegModel, OvoModel, OvrModel, top_coefficients,
                     train_binary, train_ovo, train_ovr, train_tree)
from .models.multiclass import MODEL_TYPES
from .preprocess import CleanConfig, Vocabulary, build_vocabulary, preprocess

SCHEMA_VERSION = 1
STRATEGIES = ("ovr", "ovo", "native")


class ModelFileError(ValueError):
    pass


@dataclass(frozen=True)
class TextClassifier:
    schema: LabelSchema
    clean_config: CleanConfig
    vocabulary: Vocabulary
    weighting: str
    tfidf: TfidfModel | None
    family: str
    strategy: str
    classes: tuple[str, ...]
    model: object

    # -- training ----------------------------------------------------------

    @classmethod
    def fit(cls, corpus: LabeledCorpus, family: str = "logreg", features: str = "count", C: float = 1.0,
            strategy: str = "ovr", class_weight=None, clean_config: CleanConfig = CleanConfig(),
            n_jobs: int = 1) -> "TextClassifier":
        """Train on every report of ``corpus``; all reports must be labeled.

        Binary schemas train one positive-vs-negative model. Multiclass
        schemas use ``strategy`` ("native" grows one multiclass tree) over
        the classes that occur in the training data.
        """
        if features not in ("count", "tfidf"):
            raise ValueError(f"unknown features {features!r}")
        if family not in MODEL_TYPES:
            raise ValueError(f"unknown model family {family!r}")
        if strategy not in STRATEGIES:
            raise ValueError(f"unknown strategy {strategy!r}")
        if features == "tfidf" and family == "tree":
            warnings.warn("decision trees are normally trained on word counts, not tfidf", stacklevel=2)
        labels = corpus.label_list()
        if not labels:
            raise CorpusError("empty training corpus")
        streams = [preprocess(t, clean_config) for t in corpus.texts]
        vocab = build_vocabulary(streams)
        X = count_vectorize(streams, vocab)
        tfidf = None
        if features == "tfidf":
            tfidf = fit_tfidf(X)
            X = apply_tfidf(tfidf, X)
        params = {} if family == "tree" else {"C": C, "class_weight": class_weight}
        schema = corpus.schema
        if schema.kind == "binary":
            y01 = np.array([lab == schema.positive_class for lab in labels], dtype=np.int64)
            model = train_binary(family, X, y01, params)
            return cls(schema, clean_config, vocab, features, tfidf, family, "binary",
                       (schema.negative_class, schema.positive_class), model)

        present = [c for c in schema.classes if c in set(labels)]
        absent = [c for c in schema.classes if c not in present]
        if absent:
            warnings.warn(f"classes without training examples are never predicted: {absent}", stacklevel=2)
        index = {c: i for i, c in enumerate(present)}
        y = np.array([index[lab] for lab in labels], dtype=np.int64)
        if strategy == "native":
            if family != "tree":
                raise ValueError("strategy 'native' is only available for trees")
            model = train_tree(X, y, n_classes=len(present))
        elif strategy == "ovr":
            model = train_ovr(X, y, family, params, len(present), n_jobs=n_jobs)
        else:
            model = train_ovo(X, y, family, params, len(present), n_jobs=n_jobs)
        return cls(schema, clean_config, vocab, features, tfidf, family, strategy, tuple(present), model)

    # -- inference ---------------------------------------------------------

    def transform(self, texts: Sequence[str]) -> DocTermMatrix:
        X = count_vectorize([preprocess(t, self.clean_config) for t in texts], self.vocabulary)
        if self.tfidf is not None:
            X = apply_tfidf(self.tfidf, X)
        return X

    def decision_scores(self, texts: Sequence[str]) -> tuple[np.ndarray, np.ndarray, np.ndarray | None]:
        """(label indices into ``classes``, score matrix, probability matrix or None)."""
        X = self.transform(texts)
        m = self.model
        if self.strategy == "binary":
            if self.family == "tree":
                proba = m.predict_proba(X)
                return m.predict(X), proba, proba
            d = m.decision_function(X)
            scores = np.column_stack([-d, d])
            proba = None
            if self.family == "logreg":
                p = m.predict_proba(X)
                proba = np.column_stack([1.0 - p, p])
            return m.predict(X), scores, proba
        if isinstance(m, DecisionTreeModel):
            proba = m.predict_proba(X)
            return m.predict(X), proba, proba
        scores = m.decision_function(X)
        proba = m.predict_proba(X) if isinstance(m, OvrModel) else None
        return m.predict(X), scores, proba

    def predict(self, texts: Sequence[str]) -> list[str]:
        idx, _, _ = self.decision_scores(texts)
        return [self.classes[i] for i in idx]

    def predict_labels(self, reports: Sequence[Report]) -> list[str]:
        return self.predict([r.text for r in reports])

    def predict_records(self, reports: Sequence[Report]) -> list[dict]:
        """One ``{id, label, scores[, probabilities]}`` record per report."""
        idx, scores, proba = self.decision_scores([r.text for r in reports])
        out = []
        for n, r in enumerate(reports):
            rec = {"id": r.id, "label": self.classes[idx[n]],
                   "scores": {c: float(s) for c, s in zip(self.classes, scores[n])}}
            if proba is not None:
                rec["probabilities"] = {c: float(p) for c, p in zip(self.classes, proba[n])}
            out.append(rec)
        return out

    def positive_scores(self, texts: Sequence[str]) -> np.ndarray:
        """Score of the positive class, for ROC analysis of binary tasks."""
        if self.strategy != "binary":
            raise ValueError("positive_scores is defined for binary tasks only")
        _, scores, proba = self.decision_scores(texts)
        return (proba if proba is not None else scores)[:, 1]

    def coefficients(self, n: int, class_name: str | None = None) -> tuple[list[str], list[str]]:
        m = self.model
        if self.strategy == "binary":
            linear = m
        elif isinstance(m, OvrModel):
            if class_name is None:
                raise ValueError("multiclass coefficient listing needs a class name")
            linear = m.members[self.classes.index(class_name)]
        else:
            raise ValueError("coefficients are available for binary and one-vs-rest linear models")
        if not isinstance(linear, (LogRegModel, LinearSvmModel)):
            raise ValueError("coefficients are defined for logistic regression and linear SVM only")
        return top_coefficients(linear, self.vocabulary, n)

    # -- serialization -----------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "schema_version": SCHEMA_VERSION,
            "task": self.schema.kind,
            "family": self.family,
            "strategy": self.strategy,
            "label_schema": self.schema.to_dict(),
            "classes": list(self.classes),
            "clean_config": self.clean_config.to_dict(),
            "vocabulary": list(self.vocabulary.tokens),
            "feature_weighting": self.weighting,
            "idf": None if self.tfidf is None else self.tfidf.idf.tolist(),
            "idf_document_count": None if self.tfidf is None else self.tfidf.document_count,
            "parameters": self.model.to_params(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TextClassifier":
        if d.get("schema_version") != SCHEMA_VERSION:
            raise ModelFileError(f"unsupported model file version {d.get('schema_version')!r} "
                                 f"(expected {SCHEMA_VERSION})")
        family, strategy = d["family"], d["strategy"]
        tokens = d["vocabulary"]
        params = d["parameters"]
        if strategy in ("binary", "native"):
            model = MODEL_TYPES[family].from_params(params)
        elif strategy == "ovr":
            model = OvrModel.from_params(family, params)
        elif strategy == "ovo":
            model = OvoModel.from_params(family, params)
        else:
            raise ModelFileError(f"unknown strategy {strategy!r}")
        if model.n_features != len(tokens):
            raise ModelFileError("model parameters do not match the stored vocabulary size")
        tfidf = None
        if d["feature_weighting"] == "tfidf":
            tfidf = TfidfModel(np.asarray(d["idf"], dtype=np.float64), d["idf_document_count"])
        return cls(LabelSchema.from_dict(d["label_schema"]), CleanConfig.from_dict(d["clean_config"]),
                   Vocabulary(tuple(tokens)), d["feature_weighting"], tfidf, family, strategy,
                   tuple(d["classes"]), model)

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_dict(), sort_keys=True) + "\n", encoding="utf-8")

    @classmethod
    def load(cls, path) -> "TextClassifier":
        try:
            d = json.loads(Path(path).read_text(encoding="utf-8"))
        except json.JSONDecodeError as exc:
            raise ModelFileError(f"{path}: not a model file ({exc.msg})") from None
        return cls.from_dict(d)
