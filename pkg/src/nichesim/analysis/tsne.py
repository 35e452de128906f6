"""Exact t-SNE (no Barnes-Hut), sized for a few hundred to a few thousand points."""

from __future__ import annotations

import numpy as np
from scipy.spatial.distance import pdist, squareform

from ..rng import stream

PERPLEXITY_TOL = 1e-5
BISECTION_STEPS = 50
MOMENTUM_SWITCH = 250
_FLOOR = 1e-12


def conditional_affinities(sq_dist, perplexity, tol=PERPLEXITY_TOL, steps=BISECTION_STEPS):
    """Row-wise Gaussian affinities with bandwidths bisected to hit ``perplexity``.

    Returns (P, beta) where P[i] is the conditional distribution p(j|i) and
    beta[i] = 1 / (2 sigma_i^2). All rows are searched simultaneously.
    """
    n = sq_dist.shape[0]
    target = np.log(perplexity)
    d = sq_dist.astype(np.float64).copy()
    np.fill_diagonal(d, np.inf)
    d -= d.min(axis=1, keepdims=True)
    beta = np.ones(n)
    lo = np.full(n, -np.inf)
    hi = np.full(n, np.inf)
    active = np.ones(n, dtype=bool)
    for _ in range(steps):
        p = np.exp(-d * beta[:, None])
        total = p.sum(axis=1)
        finite = np.where(np.isfinite(d), d, 0.0)
        entropy = np.log(total) + beta * (finite * p).sum(axis=1) / total
        diff = entropy - target
        active &= np.abs(diff) >= tol
        if not active.any():
            break
        up = active & (diff > 0)
        down = active & (diff <= 0)
        lo[up] = beta[up]
        beta[up] = np.where(np.isinf(hi[up]), beta[up] * 2.0, (beta[up] + hi[up]) / 2.0)
        hi[down] = beta[down]
        beta[down] = np.where(np.isinf(lo[down]), beta[down] / 2.0, (beta[down] + lo[down]) / 2.0)
    p = np.exp(-d * beta[:, None])
    p /= p.sum(axis=1, keepdims=True)
    return p, beta


def joint_affinities(points, perplexity):
    x = np.asarray(points, dtype=np.float64)
    sq = squareform(pdist(x, "sqeuclidean"))
    cond, _ = conditional_affinities(sq, perplexity)
    p = (cond + cond.T) / (2.0 * len(x))
    return np.maximum(p, _FLOOR)


def kl_divergence(p, y):
    q = _student_q(y)[0]
    mask = p > _FLOOR
    return float(np.sum(p[mask] * np.log(p[mask] / q[mask])))


def _student_q(y):
    sq = squareform(pdist(y, "sqeuclidean"))
    num = 1.0 / (1.0 + sq)
    np.fill_diagonal(num, 0.0)
    q = np.maximum(num / num.sum(), _FLOOR)
    return q, num


def tsne(points, perplexity=30.0, iterations=1000, seed=0, learning_rate=200.0,
         exaggeration=12.0, exaggeration_iterations=MOMENTUM_SWITCH, kl_every=50):
    """Embed ``points`` in 2-d. Returns (embedding, {iteration: KL divergence}).

    KL values are computed against the un-exaggerated affinities after the
    given number of completed updates.
    """
    x = np.asarray(points, dtype=np.float64)
    n = len(x)
    if perplexity <= 1:
        raise ValueError("perplexity must exceed 1")
    if n <= 3 * perplexity:
        raise ValueError(f"need more than {3 * perplexity:g} points for perplexity {perplexity:g}")
    rng = stream(seed, "tsne")
    y = rng.normal(0.0, 1e-4, size=(n, 2))
    if np.all(x == x[0]):
        return y, {}

    p = joint_affinities(x, perplexity)
    update = np.zeros_like(y)
    gains = np.ones_like(y)
    history = {}
    for it in range(1, iterations + 1):
        exaggerated = it <= exaggeration_iterations
        p_eff = p * exaggeration if exaggerated else p
        momentum = 0.5 if it <= MOMENTUM_SWITCH else 0.8
        q, num = _student_q(y)
        w = (p_eff - q) * num
        grad = 4.0 * (w.sum(axis=1)[:, None] * y - w @ y)
        same_sign = (grad > 0) == (update > 0)
        gains = np.where(same_sign, gains * 0.8, gains + 0.2)
        np.maximum(gains, 0.01, out=gains)
        update = momentum * update - learning_rate * gains * grad
        y = y + update
        y -= y.mean(axis=0)
        if it % kl_every == 0 or it == iterations:
            history[it] = kl_divergence(p, y)
    return y, history


def tsne_embed(points, perplexity=30.0, iterations=1000, seed=0, **kwargs):
    return tsne(points, perplexity, iterations, seed, **kwargs)[0]
