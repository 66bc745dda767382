"""Slow, obviously-correct reference implementations used by the tests.

Nothing here imports from radclass so the checks stay independent.
"""

import math

import numpy as np


# -- convex objectives ------------------------------------------------------

def logistic_loss(w, b, X, y_pm, C, c=None):
    X = np.asarray(X, dtype=float)
    c = np.ones(len(y_pm)) if c is None else c
    total = 0.0
    for i in range(X.shape[0]):
        m = y_pm[i] * (X[i] @ w + b)
        total += c[i] * (np.logaddexp(0.0, -m))
    return 0.5 / C * (w @ w) + total


def hinge_loss(w, b, X, y_pm, C, c=None):
    X = np.asarray(X, dtype=float)
    c = np.ones(len(y_pm)) if c is None else c
    return 0.5 * (w @ w) + C * float(np.sum(c * np.maximum(0.0, 1.0 - y_pm * (X @ w + b))))


def logreg_by_gradient_descent(X, y_pm, C, c=None, tol=1e-11, max_iter=500_000):
    """Nesterov-accelerated gradient descent with the fixed step 1/L."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    c = np.ones(n) if c is None else c
    A = np.hstack([X, np.ones((n, 1))])
    L = 0.25 * np.linalg.norm(A * np.sqrt(c)[:, None], 2) ** 2 + 1.0 / C
    reg = np.r_[np.full(d, 1.0 / C), 0.0]

    def grad(t):
        m = y_pm * (A @ t)
        s = 0.5 * (1.0 - np.tanh(0.5 * m))   # = 1 / (1 + exp(m))
        return reg * t - A.T @ (c * y_pm * s)

    t = np.zeros(d + 1)
    v = t.copy()
    k = 0.0
    for _ in range(max_iter):
        g = grad(v)
        t_new = v - g / L
        k_new = 0.5 * (1 + math.sqrt(1 + 4 * k * k))
        v = t_new + (k - 1) / k_new * (t_new - t)
        t, k = t_new, k_new
        if np.linalg.norm(grad(t)) < tol:
            break
    return t[:d], float(t[d])


def svm_by_qp(X, y_pm, C, c=None):
    """Primal soft-margin QP over (w, b, xi), solved by cvxopt when present."""
    X = np.asarray(X, dtype=float)
    n, d = X.shape
    c = np.ones(n) if c is None else c
    try:
        import cvxopt
        from cvxopt import solvers
    except ImportError:
        return _svm_by_slsqp(X, y_pm, C, c)
    nv = d + 1 + n
    P = np.zeros((nv, nv))
    P[:d, :d] = np.eye(d)
    q = np.r_[np.zeros(d + 1), C * c]
    G = np.zeros((2 * n, nv))
    G[:n, :d] = -y_pm[:, None] * X
    G[:n, d] = -y_pm
    G[:n, d + 1:] = -np.eye(n)
    G[n:, d + 1:] = -np.eye(n)
    h = np.r_[-np.ones(n), np.zeros(n)]
    args = [cvxopt.matrix(a) for a in (P, q, G, h)]
    # very tight tolerances can push the interior point off the cone; back off
    for tol in (1e-10, 1e-9, 1e-8):
        opts = {"show_progress": False, "abstol": tol, "reltol": tol, "feastol": tol, "maxiters": 200}
        try:
            sol = solvers.qp(*args, options=opts)
        except ValueError:
            continue
        z = np.asarray(sol["x"]).ravel()
        return z[:d], float(z[d])
    return _svm_by_slsqp(X, y_pm, C, c)


def _svm_by_slsqp(X, y_pm, C, c):
    from scipy.optimize import minimize
    n, d = X.shape
    cons = [{"type": "ineq", "fun": lambda z: y_pm * (X @ z[:d] + z[d]) - 1 + z[d + 1:]},
            {"type": "ineq", "fun": lambda z: z[d + 1:]}]
    res = minimize(lambda z: 0.5 * z[:d] @ z[:d] + C * c @ z[d + 1:], np.r_[np.zeros(d + 1), np.ones(n)],
                   constraints=cons, method="SLSQP", options={"ftol": 1e-14, "maxiter": 2000})
    return res.x[:d], float(res.x[d])


# -- metrics ----------------------------------------------------------------

def brute_confusion(truth, preds, classes):
    k = len(classes)
    out = [[0] * k for _ in range(k)]
    for t, p in zip(truth, preds):
        out[classes.index(t)][classes.index(p)] += 1
    return out


def brute_prf(truth, preds, positive):
    tp = sum(1 for t, p in zip(truth, preds) if t == positive and p == positive)
    fp = sum(1 for t, p in zip(truth, preds) if t != positive and p == positive)
    fn = sum(1 for t, p in zip(truth, preds) if t == positive and p != positive)
    prec = tp / (tp + fp) if tp + fp else 0.0
    rec = tp / (tp + fn) if tp + fn else 0.0
    f1 = 2 * tp / (2 * tp + fp + fn) if tp + fp + fn else 0.0
    return prec, rec, f1


def pair_counting_auc(scores, truth):
    pos = [s for s, t in zip(scores, truth) if t]
    neg = [s for s, t in zip(scores, truth) if not t]
    wins = 0.0
    for a in pos:
        for b in neg:
            wins += 1.0 if a > b else 0.5 if a == b else 0.0
    return wins / (len(pos) * len(neg))


# -- trees ------------------------------------------------------------------

def walk_tree(params, row):
    """Follow stored node arrays for one dense row; return the leaf index."""
    node = 0
    while params["feature"][node] != -1:
        f = params["feature"][node]
        node = params["left"][node] if row[f] <= params["threshold"][node] else params["right"][node]
    return node


# -- t distribution ---------------------------------------------------------

def t_two_sided_by_quadrature(t, df):
    """2 * integral of the Student t density from |t| to infinity."""
    from scipy.integrate import quad
    logc = math.lgamma((df + 1) / 2) - math.lgamma(df / 2) - 0.5 * math.log(df * math.pi)

    def pdf(x):
        return math.exp(logc - (df + 1) / 2 * math.log1p(x * x / df))

    val, _ = quad(pdf, abs(t), math.inf, epsabs=0, epsrel=1e-13, limit=500)
    return 2 * val
