"""CART-style classification tree grown until every leaf is pure."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..features import as_csr
from .base import Prediction, check_class_labels, check_dimension

LEAF = -1
# upper bound on rows * features * classes held at once during split search
_CHUNK_BUDGET = 4_000_000
_TIE_EPS = 1e-12


@dataclass(frozen=True)
class DecisionTreeModel:
    """Flat node arrays. ``feature[i] == -1`` marks a leaf.

    ``value[i]`` holds the training class counts that reached node ``i``.
    """

    feature: np.ndarray
    threshold: np.ndarray
    left: np.ndarray
    right: np.ndarray
    value: np.ndarray
    n_features: int

    family = "tree"

    @property
    def n_classes(self) -> int:
        return self.value.shape[1]

    @property
    def node_count(self) -> int:
        return self.feature.shape[0]

    @property
    def depth(self) -> int:
        depth = np.zeros(self.node_count, dtype=np.int64)
        for i in range(self.node_count):
            if self.feature[i] != LEAF:
                depth[self.left[i]] = depth[self.right[i]] = depth[i] + 1
        return int(depth.max())

    def apply(self, X) -> np.ndarray:
        """Leaf index reached by each row."""
        X = as_csr(X)
        check_dimension(X, self.n_features)
        n = X.shape[0]
        node = np.zeros(n, dtype=np.int64)
        active = np.flatnonzero(self.feature[node] != LEAF)
        while active.size:
            f = self.feature[node[active]]
            vals = np.asarray(X[active, f]).ravel()
            go_left = vals <= self.threshold[node[active]]
            node[active] = np.where(go_left, self.left[node[active]], self.right[node[active]])
            active = active[self.feature[node[active]] != LEAF]
        return node

    def predict_proba(self, X) -> np.ndarray:
        counts = self.value[self.apply(X)].astype(np.float64)
        return counts / counts.sum(axis=1, keepdims=True)

    def predict(self, X) -> np.ndarray:
        return np.argmax(self.value[self.apply(X)], axis=1)

    def decision_function(self, X) -> np.ndarray:
        """Leaf probability of class 1, for use as a binary member score."""
        return self.predict_proba(X)[:, 1]

    def to_params(self) -> dict:
        return {"feature": self.feature.tolist(), "threshold": self.threshold.tolist(),
                "left": self.left.tolist(), "right": self.right.tolist(),
                "value": self.value.tolist(), "n_features": self.n_features}

    @classmethod
    def from_params(cls, d: dict) -> "DecisionTreeModel":
        return cls(np.asarray(d["feature"], dtype=np.int64), np.asarray(d["threshold"], dtype=np.float64),
                   np.asarray(d["left"], dtype=np.int64), np.asarray(d["right"], dtype=np.int64),
                   np.asarray(d["value"], dtype=np.int64).reshape(len(d["feature"]), -1),
                   int(d["n_features"]))


def gini(counts: np.ndarray) -> float:
    n = counts.sum()
    if n == 0:
        return 0.0
    p = counts / n
    return float(1.0 - p @ p)


def _best_split(Xn: sp.csc_matrix, yn: np.ndarray, k: int):
    """Return (feature, threshold, impurity) of the best valid split or None.

    Impurity is the size-weighted Gini of the two children. Ties go to the
    lowest feature index, then the lowest threshold.
    """
    m = Xn.shape[0]
    nnz_cols = np.flatnonzero(np.diff(Xn.indptr))
    if nnz_cols.size == 0:
        return None
    onehot = np.zeros((m, k))
    onehot[np.arange(m), yn] = 1.0
    total = onehot.sum(axis=0)
    chunk = max(1, _CHUNK_BUDGET // max(1, m * k))
    best = None  # (impurity, feature, threshold)
    for start in range(0, nnz_cols.size, chunk):
        cols = nnz_cols[start:start + chunk]
        block = Xn[:, cols].toarray()
        order = np.argsort(block, axis=0, kind="stable")
        sorted_vals = np.take_along_axis(block, order, axis=0)
        valid = sorted_vals[1:] > sorted_vals[:-1]  # split between position p and p+1
        if not valid.any():
            continue
        left = np.cumsum(onehot[order], axis=0)[:-1]  # (m-1, F, k)
        n_left = np.arange(1, m, dtype=np.float64)[:, None]
        n_right = m - n_left
        right = total - left
        score = (left * left).sum(axis=2) / n_left + (right * right).sum(axis=2) / n_right
        impurity = np.where(valid, 1.0 - score / m, np.inf)
        col_best = impurity.min(axis=0)
        f_local = int(np.flatnonzero(col_best <= col_best.min() + _TIE_EPS)[0])
        imp = col_best[f_local]
        pos = int(np.flatnonzero(impurity[:, f_local] <= imp + _TIE_EPS)[0])
        thr = 0.5 * (sorted_vals[pos, f_local] + sorted_vals[pos + 1, f_local])
        if best is None or imp < best[0] - _TIE_EPS:
            best = (imp, int(cols[f_local]), float(thr))
    if best is None:
        return None
    return best[1], best[2], best[0]


def train_tree(X, y, n_classes: int | None = None) -> DecisionTreeModel:
    """Grow a tree on integer class labels without any depth limit.

    A node becomes a leaf only when it is pure or when all of its rows are
    identical (conflicting duplicates). Leaves predict the majority class,
    lowest index on ties.
    """
    X = as_csr(X)
    n, V = X.shape
    y, k = check_class_labels(y, n, n_classes)
    Xc = X.tocsc()

    feature, threshold, left, right, value = [], [], [], [], []

    def new_node(rows):
        feature.append(LEAF)
        threshold.append(0.0)
        left.append(LEAF)
        right.append(LEAF)
        value.append(np.bincount(y[rows], minlength=k))
        return len(feature) - 1

    stack = [(new_node(np.arange(n)), np.arange(n))]
    while stack:
        node, rows = stack.pop()
        if np.count_nonzero(value[node]) <= 1:
            continue
        split = _best_split(Xc[rows], y[rows], k)
        if split is None:
            continue
        f, thr, _ = split
        vals = np.asarray(Xc[rows, f].todense()).ravel()
        go_left = vals <= thr
        l_rows, r_rows = rows[go_left], rows[~go_left]
        feature[node], threshold[node] = f, thr
        left[node] = new_node(l_rows)
        right[node] = new_node(r_rows)
        # right pushed first so the left subtree is numbered first
        stack.append((right[node], r_rows))
        stack.append((left[node], l_rows))

    return DecisionTreeModel(np.asarray(feature, dtype=np.int64), np.asarray(threshold),
                             np.asarray(left, dtype=np.int64), np.asarray(right, dtype=np.int64),
                             np.vstack(value).astype(np.int64), V)


def predict_tree(model: DecisionTreeModel, x) -> Prediction:
    x = as_csr(x)
    if x.shape[0] != 1:
        raise ValueError("predict_tree expects a single feature vector")
    p = model.predict_proba(x)[0]
    return Prediction(int(np.argmax(p)), p, p)
