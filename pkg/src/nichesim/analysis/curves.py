"""Per-generation series extracted from run logs, and cross-run statistics."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from ..soundscape import N_BANDS, N_MESSAGES, SPECIES
from .stats import silhouette_score, welch_t_test

RATES = ("species_id_rate", "bit_rate", "msg_rate")


def moving_average(values, window=1):
    """Trailing mean; the first ``window - 1`` entries average what is available."""
    x = np.asarray(values, dtype=np.float64)
    if window <= 1 or len(x) == 0:
        return x.copy()
    c = np.cumsum(np.insert(x, 0, 0.0))
    out = np.empty_like(x)
    for i in range(len(x)):
        lo = max(0, i + 1 - window)
        out[i] = (c[i + 1] - c[lo]) / (i + 1 - lo)
    return out


def score_curves(run, window=1, species=None):
    """Species-ID, bit and message rates per generation.

    With ``species=None`` the two species are averaged. Species-ID rates are
    NaN for H0 runs, where receivers never classify.
    """
    chosen = SPECIES if species is None else (species,)
    out = {}
    for rate in RATES:
        series = []
        for gen in run.generations:
            vals = [getattr(gen, rate)[sp] for sp in chosen]
            series.append(np.nan if any(v is None for v in vals) else float(np.mean(vals)))
        out[rate] = moving_average(series, window)
    return out


@dataclass
class SpectrogramMatrix:
    species: str
    counts: np.ndarray  # (9, generations)
    per_band_max: int

    @property
    def rates(self):
        return self.counts / self.per_band_max


def spectrogram(run):
    cap = run.population_size * N_MESSAGES
    out = {}
    for sp in SPECIES:
        counts = np.array([gen.band_usage[sp] for gen in run.generations], dtype=int).T
        out[sp] = SpectrogramMatrix(sp, counts.reshape(N_BANDS, -1), cap)
    return out


def generation_silhouette(gen):
    if gen.silhouette is not None:
        return gen.silhouette
    if gen.signals is None:
        raise ValueError(f"generation {gen.generation} has neither a silhouette nor raw signals")
    points, labels = signal_points(gen)
    return silhouette_score(points, labels)


def signal_points(gen):
    points, labels = [], []
    for sp in SPECIES:
        points.extend(gen.signals[sp])
        labels.extend([sp] * len(gen.signals[sp]))
    return np.asarray(points, dtype=np.float64), np.asarray(labels)


def silhouette_series(run):
    return np.array([generation_silhouette(g) for g in run.generations])


def band_totals(run, last=50):
    """Summed band usage per species over the final ``last`` generations."""
    gens = run.generations[-last:]
    return {sp: np.sum([g.band_usage[sp] for g in gens], axis=0) for sp in SPECIES}


def top_bands(totals, k=3):
    order = sorted(range(len(totals)), key=lambda i: (-totals[i], i))
    return tuple(sorted(order[:k]))


def top_share(totals, k=3):
    total = float(np.sum(totals))
    if total == 0:
        return 0.0
    return float(sum(totals[i] for i in top_bands(totals, k)) / total)


def top_band_overlap(run, last=50, k=3):
    totals = band_totals(run, last)
    return len(set(top_bands(totals["A"], k)) & set(top_bands(totals["B"], k)))


def experiment_from_runs(h1_runs, h0_runs, seed_base=0):
    from ..logs import ExperimentLog

    if len(h1_runs) != len(h0_runs):
        raise ValueError("conditions must have equal run counts")
    sil = {}
    for cond, runs in (("H1", h1_runs), ("H0", h0_runs)):
        mat = np.stack([silhouette_series(r) for r in runs])
        sil[cond] = {"mean": mat.mean(axis=0).tolist(), "std": mat.std(axis=0, ddof=1).tolist(),
                     "runs": mat.tolist()}
    n_gen = len(sil["H1"]["mean"])
    welch = [welch_t_test([row[g] for row in sil["H1"]["runs"]],
                          [row[g] for row in sil["H0"]["runs"]]) for g in range(n_gen)]
    return ExperimentLog(list(h1_runs), list(h0_runs), sil, welch, seed_base)


def first_sustained_significance(pvalues, alpha=0.01):
    """First generation from which every later p-value is below ``alpha``; None if never."""
    first = None
    for g in range(len(pvalues) - 1, -1, -1):
        if pvalues[g] < alpha:
            first = g
        else:
            break
    return first


def significance_report(exp, alpha=0.01, window_start=50):
    p = [w.p for w in exp.welch]
    first = first_sustained_significance(p, alpha)
    h1 = np.asarray(exp.silhouette["H1"]["mean"])
    h0 = np.asarray(exp.silhouette["H0"]["mean"])
    lines = [
        f"runs per condition: {len(exp.h1)}",
        f"generations: {len(p)}",
        f"first generation with sustained p < {alpha}: {first if first is not None else 'never'}",
    ]
    if first is not None and first + 1 < len(p):
        lines.append(f"mean p after generation {first}: {np.mean(p[first + 1:]):.3g}")
    if len(p) > window_start:
        tail = p[window_start:]
        frac = float(np.mean(np.asarray(tail) < 0.05))
        lines.append(f"fraction of generations {window_start}..{len(p) - 1} with p < 0.05: {frac:.3f}")
        lines.append(f"mean silhouette H1 over that range: {h1[window_start:].mean():.4f}")
        lines.append(f"mean silhouette H0 over that range: {h0[window_start:].mean():.4f}")
    return "\n".join(lines) + "\n"
