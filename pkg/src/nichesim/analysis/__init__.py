from .stats import (
    WelchResult, regularized_incomplete_beta, silhouette_score, student_t_cdf, welch_t_test,
)
from .tsne import tsne, tsne_embed
from .curves import (
    SpectrogramMatrix, band_totals, experiment_from_runs, first_sustained_significance,
    score_curves, significance_report, silhouette_series, spectrogram, top_band_overlap,
    top_bands, top_share,
)
from ..logs import read_experiment_csv, read_experiment_log, read_run_log

__all__ = [
    "WelchResult", "regularized_incomplete_beta", "silhouette_score", "student_t_cdf",
    "welch_t_test", "tsne", "tsne_embed", "SpectrogramMatrix", "band_totals",
    "experiment_from_runs", "first_sustained_significance", "score_curves",
    "significance_report", "silhouette_series", "spectrogram", "top_band_overlap",
    "top_bands", "top_share", "read_run_log", "read_experiment_log", "read_experiment_csv",
]
