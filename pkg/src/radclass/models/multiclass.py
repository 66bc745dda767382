"""One-vs-rest and one-vs-one wrappers around the binary families."""

from __future__ import annotations

from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ..features import as_csr
from .base import Prediction, check_class_labels, check_dimension
from .logreg import LogRegModel, train_logreg
from .svm import LinearSvmModel, train_linear_svm
from .tree import DecisionTreeModel, train_tree

FAMILIES = ("logreg", "svm", "tree")

MODEL_TYPES = {"logreg": LogRegModel, "svm": LinearSvmModel, "tree": DecisionTreeModel}


def train_binary(family: str, X, y01, params: dict | None = None):
    """Train one binary member of ``family`` on 0/1 labels."""
    params = dict(params or {})
    if family == "logreg":
        return train_logreg(X, y01, **params)
    if family == "svm":
        return train_linear_svm(X, y01, **params)
    if family == "tree":
        params.pop("C", None)
        params.pop("class_weight", None)
        return train_tree(X, np.asarray(y01, dtype=np.int64), n_classes=2, **params)
    raise ValueError(f"unknown model family {family!r}")


def member_scores(member, X) -> np.ndarray:
    """Per-row member score: log-odds, SVM margin, or tree leaf P(class 1)."""
    return member.decision_function(X)


def _centered(member, scores: np.ndarray) -> np.ndarray:
    # trees score in [0, 1]; shift so that 0 is the decision boundary
    return scores - 0.5 if member.family == "tree" else scores


def _map(fn, items, n_jobs: int):
    if n_jobs == 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=n_jobs) as pool:
        return list(pool.map(fn, items))


@dataclass(frozen=True)
class OvrModel:
    family: str
    members: tuple
    n_features: int

    strategy = "ovr"

    @property
    def n_classes(self) -> int:
        return len(self.members)

    def decision_function(self, X) -> np.ndarray:
        X = as_csr(X)
        check_dimension(X, self.n_features)
        return np.column_stack([member_scores(m, X) for m in self.members])

    def predict_proba(self, X) -> np.ndarray | None:
        """Normalized member probabilities; None for the uncalibrated SVM."""
        if self.family == "svm":
            return None
        X = as_csr(X)
        check_dimension(X, self.n_features)
        if self.family == "logreg":
            p = np.column_stack([m.predict_proba(X) for m in self.members])
        else:
            p = np.column_stack([m.predict_proba(X)[:, 1] for m in self.members])
        s = p.sum(axis=1, keepdims=True)
        uniform = np.full_like(p, 1.0 / p.shape[1])
        return np.where(s > 0, p / np.where(s > 0, s, 1.0), uniform)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.decision_function(X), axis=1)

    def to_params(self) -> dict:
        return {"members": [m.to_params() for m in self.members], "n_features": self.n_features}

    @classmethod
    def from_params(cls, family: str, d: dict) -> "OvrModel":
        t = MODEL_TYPES[family]
        return cls(family, tuple(t.from_params(m) for m in d["members"]), d["n_features"])


def train_ovr(X, y, family: str = "logreg", params: dict | None = None, n_classes: int | None = None,
              n_jobs: int = 1) -> OvrModel:
    """One binary member per class, each trained on the full matrix."""
    X = as_csr(X)
    y, k = check_class_labels(y, X.shape[0], n_classes)
    if k < 2:
        raise ValueError("one-vs-rest needs at least 2 classes")
    counts = np.bincount(y, minlength=k)
    if (counts == 0).any():
        raise ValueError(f"class index(es) {np.flatnonzero(counts == 0).tolist()} have no training examples")
    members = _map(lambda c: train_binary(family, X, (y == c).astype(np.int64), params), range(k), n_jobs)
    return OvrModel(family, tuple(members), X.shape[1])


def predict_ovr(model: OvrModel, x) -> Prediction:
    x = as_csr(x)
    scores = model.decision_function(x)[0]
    proba = model.predict_proba(x)
    return Prediction(int(np.argmax(scores)), scores, None if proba is None else proba[0])


@dataclass(frozen=True)
class OvoModel:
    """Pairwise members; member for pair (i, j), i < j, scores class i as positive."""

    family: str
    pairs: tuple[tuple[int, int], ...]
    members: tuple
    n_classes: int
    n_features: int

    strategy = "ovo"

    def votes(self, X) -> tuple[np.ndarray, np.ndarray]:
        """Vote counts and summed centered decision values, both (n, k)."""
        X = as_csr(X)
        check_dimension(X, self.n_features)
        n = X.shape[0]
        votes = np.zeros((n, self.n_classes))
        conf = np.zeros((n, self.n_classes))
        for (i, j), m in zip(self.pairs, self.members):
            d = _centered(m, member_scores(m, X))
            win_i = d >= 0
            votes[:, i] += win_i
            votes[:, j] += ~win_i
            conf[:, i] += d
            conf[:, j] -= d
        return votes, conf

    def decision_function(self, X) -> np.ndarray:
        """Votes with confidence folded in below vote resolution.

        The confidence term is squashed into (-1/3, 1/3) so it only breaks
        vote ties and never overturns a vote difference.
        """
        votes, conf = self.votes(X)
        return votes + conf / (3.0 * (np.abs(conf) + 1.0))

    def predict(self, X) -> np.ndarray:
        votes, conf = self.votes(X)
        n = votes.shape[0]
        out = np.empty(n, dtype=np.int64)
        for r in range(n):
            top = np.flatnonzero(votes[r] == votes[r].max())
            if top.size > 1:
                c = conf[r, top]
                top = top[c == c.max()]
            out[r] = top[0]
        return out

    def to_params(self) -> dict:
        return {"pairs": [list(p) for p in self.pairs], "members": [m.to_params() for m in self.members],
                "n_classes": self.n_classes, "n_features": self.n_features}

    @classmethod
    def from_params(cls, family: str, d: dict) -> "OvoModel":
        t = MODEL_TYPES[family]
        return cls(family, tuple(tuple(p) for p in d["pairs"]),
                   tuple(t.from_params(m) for m in d["members"]), d["n_classes"], d["n_features"])


def train_ovo(X, y, family: str = "logreg", params: dict | None = None, n_classes: int | None = None,
              n_jobs: int = 1) -> OvoModel:
    X = as_csr(X)
    y, k = check_class_labels(y, X.shape[0], n_classes)
    if k < 2:
        raise ValueError("one-vs-one needs at least 2 classes")
    counts = np.bincount(y, minlength=k)
    if (counts == 0).any():
        raise ValueError(f"class index(es) {np.flatnonzero(counts == 0).tolist()} have no training examples")
    pairs = tuple(combinations(range(k), 2))

    def fit(pair):
        i, j = pair
        rows = np.flatnonzero((y == i) | (y == j))
        return train_binary(family, X[rows], (y[rows] == i).astype(np.int64), params)

    members = _map(fit, pairs, n_jobs)
    return OvoModel(family, pairs, tuple(members), k, X.shape[1])


def predict_ovo(model: OvoModel, x) -> Prediction:
    x = as_csr(x)
    label = int(model.predict(x)[0])
    return Prediction(label, model.decision_function(x)[0])
