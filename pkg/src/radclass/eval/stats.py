"""Student t distribution and the Welch two-sample t-test."""

from __future__ import annotations

import math
from dataclasses import dataclass

_EPS = 1e-16
_TINY = 1e-300
_MAX_TERMS = 10_000


def _betacf(a: float, b: float, x: float) -> float:
    """Continued fraction for I_x(a, b), modified Lentz evaluation."""
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _TINY:
        d = _TINY
    d = 1.0 / d
    h = d
    for m in range(1, _MAX_TERMS + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _TINY:
            d = _TINY
        c = 1.0 + aa / c
        if abs(c) < _TINY:
            c = _TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _EPS:
            return h
    raise ArithmeticError(f"incomplete beta continued fraction did not converge (a={a}, b={b}, x={x})")


def betainc(a: float, b: float, x: float) -> float:
    """Regularized incomplete beta function I_x(a, b)."""
    if a <= 0 or b <= 0:
        raise ValueError("a and b must be positive")
    if not 0.0 <= x <= 1.0:
        raise ValueError("x must lie in [0, 1]")
    if x == 0.0 or x == 1.0:
        return x
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    # the fraction converges fast for x < (a+1)/(a+b+2); use symmetry otherwise
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _betacf(a, b, x) / a
    return 1.0 - math.exp(log_front) * _betacf(b, a, 1.0 - x) / b


def t_sf_two_sided(t: float, df: float) -> float:
    """P(|T| >= |t|) for Student's t with ``df`` degrees of freedom."""
    if df <= 0:
        raise ValueError("degrees of freedom must be positive")
    if math.isinf(t):
        return 0.0
    if t == 0:
        return 1.0
    return betainc(0.5 * df, 0.5, df / (df + t * t))


def t_cdf(t: float, df: float) -> float:
    half = 0.5 * t_sf_two_sided(t, df)
    return 1.0 - half if t > 0 else half


@dataclass(frozen=True)
class TTestResult:
    t_statistic: float
    degrees_of_freedom: float
    p_value_two_tailed: float
    degenerate: bool = False

    def rejects(self, alpha: float = 0.05) -> bool:
        return self.p_value_two_tailed < alpha


def welch_ttest(mean1: float, std1: float, n1: int, mean2: float, std2: float, n2: int) -> TTestResult:
    """Two-sample t-test without the equal-variance assumption, from summary stats.

    Both standard deviations zero is reported as degenerate: infinite t and
    p = 0 when the means differ, t = 0 and p = 1 when they coincide.
    """
    if n1 < 2 or n2 < 2:
        raise ValueError("each sample needs at least 2 observations")
    if std1 < 0 or std2 < 0:
        raise ValueError("standard deviations must be non-negative")
    v1, v2 = std1 * std1 / n1, std2 * std2 / n2
    diff = mean1 - mean2
    if v1 + v2 == 0:
        df = float(n1 + n2 - 2)
        if diff == 0:
            return TTestResult(0.0, df, 1.0, degenerate=True)
        return TTestResult(math.copysign(math.inf, diff), df, 0.0, degenerate=True)
    t = diff / math.sqrt(v1 + v2)
    df = (v1 + v2) ** 2 / (v1 * v1 / (n1 - 1) + v2 * v2 / (n2 - 1))
    return TTestResult(t, df, t_sf_two_sided(t, df))
