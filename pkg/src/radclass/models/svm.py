"""Linear-kernel soft-margin SVM.

The primal problem::

    min_{w,b}  ||w||^2 / 2 + C * sum_i c_i * max(0, 1 - y_i (x_i . w + b))

is solved through its dual with sequential minimal optimization using
second-order working-set selection. A kernel ``x . y + c`` only shifts the
Gram matrix by a constant, which the unpenalized intercept absorbs, so
the plain inner product is used. After the dual converges the intercept
is re-optimized exactly on the primal with ``w`` fixed.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass

import numpy as np
import scipy.sparse as sp

from ..features import as_csr
from .base import ConvergenceWarning, Prediction, check_binary_labels, check_dimension, class_weight_vector

_TAU = 1e-12
# Gram matrices above this many rows are computed row by row on demand
_DENSE_GRAM_LIMIT = 5000


@dataclass(frozen=True)
class LinearSvmModel:
    weights: np.ndarray
    bias: float
    C: float = 1.0
    class_weights: tuple[float, float] = (1.0, 1.0)
    n_iter: int = 0

    family = "svm"

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def decision_function(self, X) -> np.ndarray:
        X = as_csr(X)
        check_dimension(X, self.n_features)
        return X @ self.weights + self.bias

    def predict(self, X) -> np.ndarray:
        return (self.decision_function(X) >= 0).astype(np.int64)

    def to_params(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": float(self.bias), "C": self.C,
                "class_weights": list(self.class_weights)}

    @classmethod
    def from_params(cls, d: dict) -> "LinearSvmModel":
        return cls(np.asarray(d["weights"], dtype=np.float64), float(d["bias"]), d["C"],
                   tuple(d["class_weights"]))


def svm_objective(w: np.ndarray, b: float, X, y_pm: np.ndarray, C: float,
                  sample_weight: np.ndarray | None = None) -> float:
    X = as_csr(X)
    c = np.ones(X.shape[0]) if sample_weight is None else sample_weight
    hinge = np.maximum(0.0, 1.0 - y_pm * (X @ w + b))
    return 0.5 * float(w @ w) + C * float(c @ hinge)


class _Gram:
    def __init__(self, X: sp.csr_matrix):
        self.X = X
        n = X.shape[0]
        self.diag = np.asarray(X.multiply(X).sum(axis=1)).ravel()
        self.dense = (X @ X.T).toarray() if n <= _DENSE_GRAM_LIMIT else None
        self._cache: dict[int, np.ndarray] = {}

    def row(self, i: int) -> np.ndarray:
        if self.dense is not None:
            return self.dense[i]
        r = self._cache.get(i)
        if r is None:
            if len(self._cache) > 2000:
                self._cache.clear()
            r = np.asarray((self.X @ self.X[i].T).todense()).ravel()
            self._cache[i] = r
        return r


def _optimal_bias(s: np.ndarray, y_pm: np.ndarray, ub: np.ndarray, b0: float) -> float:
    """Minimize sum_i ub_i * max(0, 1 - y_i (s_i + b)) over b; the point of the
    minimizing interval closest to ``b0`` is returned."""
    # positives contribute ub*max(0, t - b), negatives ub*max(0, b - u)
    pos = y_pm > 0
    t = np.sort(1.0 - s[pos])
    wt = ub[pos][np.argsort(1.0 - s[pos], kind="stable")]
    u = np.sort(-1.0 - s[~pos])
    wu = ub[~pos][np.argsort(-1.0 - s[~pos], kind="stable")]
    cands = np.unique(np.concatenate([t, u]))
    # f(b) = sum_{t_i > b} w_i (t_i - b) + sum_{u_j < b} w_j (b - u_j)
    ct_w = np.concatenate([[0.0], np.cumsum(wt)])
    ct_wt = np.concatenate([[0.0], np.cumsum(wt * t)])
    cu_w = np.concatenate([[0.0], np.cumsum(wu)])
    cu_wu = np.concatenate([[0.0], np.cumsum(wu * u)])
    kt = np.searchsorted(t, cands, side="right")  # t_i <= b excluded
    ku = np.searchsorted(u, cands, side="left")   # u_j < b included
    f = (ct_wt[-1] - ct_wt[kt]) - cands * (ct_w[-1] - ct_w[kt]) + cands * cu_w[ku] - cu_wu[ku]
    fmin = f.min()
    near = cands[f <= fmin + 1e-12 * max(1.0, abs(fmin))]
    return float(np.clip(b0, near.min(), near.max()))


def train_linear_svm(X, y, C: float = 1.0, class_weight=None, eps: float = 1e-5,
                     max_iter: int | None = None) -> LinearSvmModel:
    """Fit a linear SVM on 0/1 labels (1 = positive).

    ``eps`` bounds the maximal KKT violation at which SMO stops.
    """
    if not C > 0:
        raise ValueError("C must be positive")
    X = as_csr(X)
    y01 = check_binary_labels(y, X.shape[0])
    if not np.all(np.isfinite(X.data)):
        raise ValueError("non-finite feature values")
    n = X.shape[0]
    cw = class_weight_vector(y01, class_weight)
    ub = C * np.where(y01 == 1, cw[1], cw[0])
    y_pm = 2.0 * y01 - 1.0
    gram = _Gram(X)
    QD = gram.diag
    if max_iter is None:
        max_iter = max(10_000_000, 100 * n)

    alpha = np.zeros(n)
    G = -np.ones(n)  # gradient of 0.5 a'Qa - e'a
    it = 0
    converged = False
    while it < max_iter:
        up = ((y_pm > 0) & (alpha < ub)) | ((y_pm < 0) & (alpha > 0))
        low = ((y_pm > 0) & (alpha > 0)) | ((y_pm < 0) & (alpha < ub))
        ymg = -y_pm * G
        if not up.any() or not low.any():
            converged = True
            break
        cand_up = np.where(up, ymg, -np.inf)
        i = int(np.argmax(cand_up))
        gmax = cand_up[i]
        gmin = np.where(low, ymg, np.inf).min()
        if gmax - gmin < eps:
            converged = True
            break
        Ki = gram.row(i)
        grad_diff = gmax - ymg
        quad = QD[i] + QD - 2.0 * Ki
        quad = np.where(quad > 0, quad, _TAU)
        obj = np.where(low & (grad_diff > 0), -(grad_diff * grad_diff) / quad, np.inf)
        j = int(np.argmin(obj))
        Kj = gram.row(j)

        ai_old, aj_old = alpha[i], alpha[j]
        Ci, Cj = ub[i], ub[j]
        Qij = y_pm[i] * y_pm[j] * Ki[j]
        if y_pm[i] != y_pm[j]:
            q = QD[i] + QD[j] + 2.0 * Qij
            if q <= 0:
                q = _TAU
            delta = (-G[i] - G[j]) / q
            diff = ai_old - aj_old
            ai, aj = ai_old + delta, aj_old + delta
            if diff > 0:
                if aj < 0:
                    aj, ai = 0.0, diff
            elif ai < 0:
                ai, aj = 0.0, -diff
            if diff > Ci - Cj:
                if ai > Ci:
                    ai, aj = Ci, Ci - diff
            elif aj > Cj:
                aj, ai = Cj, Cj + diff
        else:
            q = QD[i] + QD[j] - 2.0 * Qij
            if q <= 0:
                q = _TAU
            delta = (G[i] - G[j]) / q
            total = ai_old + aj_old
            ai, aj = ai_old - delta, aj_old + delta
            if total > Ci:
                if ai > Ci:
                    ai, aj = Ci, total - Ci
            elif aj < 0:
                aj, ai = 0.0, total
            if total > Cj:
                if aj > Cj:
                    aj, ai = Cj, total - Cj
            elif ai < 0:
                ai, aj = 0.0, total
        alpha[i], alpha[j] = ai, aj
        dai, daj = ai - ai_old, aj - aj_old
        # Q_it = y_i y_t K_it
        G += y_pm * (y_pm[i] * dai * Ki + y_pm[j] * daj * Kj)
        it += 1
    if not converged:
        warnings.warn(f"SMO stopped after {it} iterations without reaching eps={eps}",
                      ConvergenceWarning, stacklevel=2)

    w = np.asarray(X.T @ (alpha * y_pm)).ravel()
    free = (alpha > 0) & (alpha < ub)
    ymg = -y_pm * G
    if free.any():
        b0 = float(ymg[free].mean())
    else:
        up = ((y_pm > 0) & (alpha < ub)) | ((y_pm < 0) & (alpha > 0))
        low = ((y_pm > 0) & (alpha > 0)) | ((y_pm < 0) & (alpha < ub))
        hi = ymg[up].max() if up.any() else 0.0
        lo = ymg[low].min() if low.any() else 0.0
        b0 = 0.5 * (hi + lo)
    b = _optimal_bias(X @ w, y_pm, ub, b0)
    return LinearSvmModel(w, b, float(C), (float(cw[0]), float(cw[1])), it)


def predict_svm(model: LinearSvmModel, x) -> Prediction:
    x = as_csr(x)
    if x.shape[0] != 1:
        raise ValueError("predict_svm expects a single feature vector")
    m = float(model.decision_function(x)[0])
    return Prediction(int(m >= 0), np.array([-m, m]))
