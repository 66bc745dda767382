"""L2-regularized binary logistic regression.

Objective, with labels mapped to -1/+1 and an unpenalized intercept::

    f(w, b) = ||w||^2 / (2C) + sum_i c_i * log(1 + exp(-y_i (x_i . w + b)))

minimized by a truncated Newton method (conjugate gradient on
Hessian-vector products, Armijo backtracking). Every accepted step
decreases ``f``, so the loss history is monotone.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

from ..features import as_csr
from .base import ConvergenceWarning, Prediction, check_binary_labels, check_dimension, class_weight_vector


@dataclass(frozen=True)
class LogRegModel:
    weights: np.ndarray
    bias: float
    C: float = 1.0
    class_weights: tuple[float, float] = (1.0, 1.0)
    n_iter: int = 0
    loss_history: tuple[float, ...] = field(default=(), compare=False, repr=False)

    family = "logreg"

    @property
    def n_features(self) -> int:
        return self.weights.shape[0]

    def decision_function(self, X) -> np.ndarray:
        X = as_csr(X)
        check_dimension(X, self.n_features)
        return X @ self.weights + self.bias

    def predict_proba(self, X) -> np.ndarray:
        """P(positive) for every row."""
        return expit(self.decision_function(X))

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)

    def to_params(self) -> dict:
        return {"weights": self.weights.tolist(), "bias": float(self.bias), "C": self.C,
                "class_weights": list(self.class_weights)}

    @classmethod
    def from_params(cls, d: dict) -> "LogRegModel":
        return cls(np.asarray(d["weights"], dtype=np.float64), float(d["bias"]), d["C"],
                   tuple(d["class_weights"]))


def _value(theta, X, y_pm, c, C):
    V = X.shape[1]
    z = X @ theta[:V] + theta[V]
    return 0.5 / C * float(theta[:V] @ theta[:V]) + float(c @ np.logaddexp(0.0, -y_pm * z)), z


def _grad(theta, z, Xt, y_pm, c, C):
    V = Xt.shape[0]
    r = -c * y_pm * expit(-y_pm * z)
    return np.concatenate([theta[:V] / C + Xt @ r, [r.sum()]])


def logistic_objective(w: np.ndarray, b: float, X, y_pm: np.ndarray, C: float,
                       sample_weight: np.ndarray | None = None) -> float:
    """Value of the regularized negative log-likelihood; ``y_pm`` in {-1, +1}."""
    X = as_csr(X)
    c = np.ones(X.shape[0]) if sample_weight is None else sample_weight
    return _value(np.append(w, b), X, y_pm, c, C)[0]


def logistic_gradient(w: np.ndarray, b: float, X, y_pm: np.ndarray, C: float,
                      sample_weight: np.ndarray | None = None) -> tuple[np.ndarray, float]:
    """Gradient of :func:`logistic_objective` as ``(dw, db)``."""
    X = as_csr(X)
    c = np.ones(X.shape[0]) if sample_weight is None else sample_weight
    theta = np.append(w, b)
    _, z = _value(theta, X, y_pm, c, C)
    g = _grad(theta, z, X.T.tocsr(), y_pm, c, C)
    return g[:-1], float(g[-1])


def _cg(hess_vec, g: np.ndarray, tol: float, max_iter: int) -> np.ndarray:
    """Approximately solve H p = -g."""
    p = np.zeros_like(g)
    r = -g.copy()
    d = r.copy()
    rr = r @ r
    for _ in range(max_iter):
        if np.sqrt(rr) <= tol:
            break
        Hd = hess_vec(d)
        dHd = d @ Hd
        if dHd <= 0:
            break
        alpha = rr / dHd
        p += alpha * d
        r -= alpha * Hd
        rr_new = r @ r
        d = r + (rr_new / rr) * d
        rr = rr_new
    return p


def train_logreg(X, y, C: float = 1.0, class_weight: str | None = None, tol: float = 1e-6,
                 max_iter: int = 1000) -> LogRegModel:
    """Fit a binary logistic regression. ``y`` holds 0/1 (or bool), 1 = positive.

    ``class_weight="balanced"`` weights each class inversely to its frequency;
    the default gives both classes weight 1. Training stops once the gradient
    norm drops to ``tol``.
    """
    if not C > 0:
        raise ValueError("C must be positive")
    X = as_csr(X)
    y01 = check_binary_labels(y, X.shape[0])
    if not np.all(np.isfinite(X.data)):
        raise ValueError("non-finite feature values")
    cw = class_weight_vector(y01, class_weight)
    c = np.where(y01 == 1, cw[1], cw[0])
    y_pm = 2.0 * y01 - 1.0
    n, V = X.shape
    Xt = X.T.tocsr()

    # theta = [w, b]
    theta = np.zeros(V + 1)

    f, z = _value(theta, X, y_pm, c, C)
    history = [f]
    it = 0
    converged = False
    while it < max_iter:
        g = _grad(theta, z, Xt, y_pm, c, C)
        gnorm = np.linalg.norm(g)
        if gnorm <= tol:
            converged = True
            break
        s = expit(z)
        D = c * s * (1.0 - s)

        def hess_vec(v, D=D):
            u = D * (X @ v[:V] + v[V])
            return np.concatenate([v[:V] / C + Xt @ u, [u.sum()]])

        step = _cg(hess_vec, g, tol=min(0.5, np.sqrt(gnorm)) * gnorm, max_iter=max(50, min(V + 1, 250)))
        slope = g @ step
        if slope >= 0:
            step, slope = -g, -(g @ g)
        t = 1.0
        while True:
            cand = theta + t * step
            f_new, z_new = _value(cand, X, y_pm, c, C)
            if f_new <= f + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-12:
                break
        if t < 1e-12:
            # no further decrease representable in floating point
            converged = gnorm <= max(tol, 1e-8 * max(1.0, abs(f)))
            break
        theta, f, z = cand, f_new, z_new
        history.append(f)
        it += 1
    if not converged:
        warnings.warn(f"logistic regression stopped after {it} iterations without reaching tol={tol}",
                      ConvergenceWarning, stacklevel=2)
    return LogRegModel(theta[:V].copy(), float(theta[V]), float(C), (float(cw[0]), float(cw[1])), it,
                       tuple(history))


def predict_logreg(model: LogRegModel, x) -> Prediction:
    """Single-row prediction; the positive class wins at p = 0.5."""
    x = as_csr(x)
    if x.shape[0] != 1:
        raise ValueError("predict_logreg expects a single feature vector")
    p = float(model.predict_proba(x)[0])
    probs = np.array([1.0 - p, p])
    return Prediction(int(p >= 0.5), probs, probs)
