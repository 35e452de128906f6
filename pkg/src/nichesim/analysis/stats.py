"""Cluster validity and two-sample testing."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.spatial.distance import cdist

_CF_EPS = 1e-16
_CF_TINY = 1e-300
_CF_MAX_ITER = 500


def silhouette_score(points, labels):
    """Mean silhouette width with Euclidean distance.

    Points in singleton clusters score 0, as do points whose intra- and
    nearest-cluster mean distances are both zero.
    """
    x = np.asarray(points, dtype=np.float64)
    labels = np.asarray(labels)
    if x.ndim != 2 or len(x) != len(labels):
        raise ValueError("points must be a 2-d array with one label per row")
    classes = list(dict.fromkeys(labels.tolist()))
    if len(classes) < 2:
        raise ValueError("silhouette score needs at least two distinct labels")
    if len(x) < 3:
        raise ValueError("silhouette score needs at least three points")
    d = cdist(x, x)
    masks = [labels == c for c in classes]
    # mean distance from every point to each cluster, self excluded
    sums = np.stack([d[:, m].sum(axis=1) for m in masks], axis=1)
    sizes = np.array([m.sum() for m in masks], dtype=np.float64)
    own = np.array([classes.index(v) for v in labels.tolist()])
    rows = np.arange(len(x))
    own_size = sizes[own]
    a = np.where(own_size > 1, sums[rows, own] / np.maximum(own_size - 1, 1), 0.0)
    means = sums / sizes[None, :]
    means[rows, own] = np.inf
    b = means.min(axis=1)
    denom = np.maximum(a, b)
    with np.errstate(invalid="ignore", divide="ignore"):
        s = np.where(denom > 0, (b - a) / denom, 0.0)
    s[own_size == 1] = 0.0
    return float(s.mean())


def regularized_incomplete_beta(x, a, b):
    """I_x(a, b) by Lentz's continued fraction."""
    if x <= 0.0:
        return 0.0
    if x >= 1.0:
        return 1.0
    log_front = (math.lgamma(a + b) - math.lgamma(a) - math.lgamma(b)
                 + a * math.log(x) + b * math.log1p(-x))
    if x < (a + 1.0) / (a + b + 2.0):
        return math.exp(log_front) * _beta_cf(x, a, b) / a
    return 1.0 - math.exp(log_front) * _beta_cf(1.0 - x, b, a) / b


def _beta_cf(x, a, b):
    qab, qap, qam = a + b, a + 1.0, a - 1.0
    c = 1.0
    d = 1.0 - qab * x / qap
    if abs(d) < _CF_TINY:
        d = _CF_TINY
    d = 1.0 / d
    h = d
    for m in range(1, _CF_MAX_ITER + 1):
        m2 = 2 * m
        aa = m * (b - m) * x / ((qam + m2) * (a + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        h *= d * c
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2))
        d = 1.0 + aa * d
        if abs(d) < _CF_TINY:
            d = _CF_TINY
        c = 1.0 + aa / c
        if abs(c) < _CF_TINY:
            c = _CF_TINY
        d = 1.0 / d
        delta = d * c
        h *= delta
        if abs(delta - 1.0) < _CF_EPS:
            break
    return h


def student_t_cdf(t, df):
    if df <= 0:
        raise ValueError(f"degrees of freedom must be positive, got {df}")
    if math.isinf(t):
        return 1.0 if t > 0 else 0.0
    tail = 0.5 * regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5)
    return 1.0 - tail if t > 0 else tail


@dataclass(frozen=True)
class WelchResult:
    t: float
    df: float
    p: float
    degenerate: bool = False


def welch_t_test(a, b):
    """Two-sided Welch's t-test for unequal variances."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    na, nb = len(a), len(b)
    if na < 2 or nb < 2:
        raise ValueError("each sample needs at least two values")
    if not (np.all(np.isfinite(a)) and np.all(np.isfinite(b))):
        raise ValueError("samples must be finite")
    ma, mb = float(a.mean()), float(b.mean())
    va, vb = float(a.var(ddof=1)), float(b.var(ddof=1))
    qa, qb = va / na, vb / nb
    se2 = qa + qb
    if se2 == 0.0:
        df = float(na + nb - 2)
        if ma == mb:
            return WelchResult(0.0, df, 1.0, degenerate=True)
        return WelchResult(math.copysign(math.inf, ma - mb), df, 0.0, degenerate=True)
    t = (ma - mb) / math.sqrt(se2)
    # normalised form avoids underflow when both variances are tiny
    ra, rb = qa / se2, qb / se2
    df = 1.0 / (ra * ra / (na - 1) + rb * rb / (nb - 1))
    tail = 0.5 * regularized_incomplete_beta(df / (df + t * t), df / 2.0, 0.5)
    p = min(1.0, max(0.0, 2.0 * tail))
    return WelchResult(t, df, p)
