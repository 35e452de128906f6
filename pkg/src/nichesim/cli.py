"""Command-line entry point: ``nichesim {run,experiment,analyze,plot}``.

Exit codes: 0 on success, 1 for usage and configuration errors, 2 when a
run or analysis fails at runtime.
"""

from __future__ import annotations

import argparse
import csv
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import svg
from .analysis.curves import (
    RATES, score_curves, significance_report, signal_points, silhouette_series, spectrogram,
)
from .analysis.tsne import tsne_embed
from .config import ConfigError, SimulationConfig, load_config, valid_keys
from .logs import (
    LogError, RunLog, read_experiment_log, read_run_log, write_csv, write_experiment_log,
    write_run_log,
)
from .simulation import run_experiment, run_simulation
from .soundscape import N_BANDS, SPECIES

OUTPUT_ENV = "NICHESIM_OUTPUT_DIR"
FIGURES = ("spectrogram", "silhouette", "clusters", "scores")
CLUSTER_GENERATIONS = (0, 12, 175, 299)

EXIT_OK, EXIT_USAGE, EXIT_RUNTIME = 0, 1, 2


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _output_dir(args):
    chosen = args.output or os.environ.get(OUTPUT_ENV) or "out"
    path = Path(chosen)
    path.mkdir(parents=True, exist_ok=True)
    return path


def _config(args):
    overrides = list(args.set or [])
    if getattr(args, "seed", None) is not None:
        overrides.append(f"seed={args.seed}")
    return load_config(args.config, overrides)


# -- run ---------------------------------------------------------------------

def cmd_run(cfg: SimulationConfig, out: Path, stream=None):
    run = run_simulation(cfg)
    log_path, csv_path = write_run_log(run, out / f"run_{cfg.seed}.log")
    last = run.generations[-1]
    print(f"wrote {log_path} and {csv_path}", file=stream)
    print(f"mode {cfg.mode.value}, seed {cfg.seed}, generation {last.generation}", file=stream)
    for sp in SPECIES:
        sid = last.species_id_rate[sp]
        sid_text = "n/a" if sid is None else f"{sid:.4f}"
        print(f"  species {sp}: species-id {sid_text}  bits {last.bit_rate[sp]:.4f}  "
              f"messages {last.msg_rate[sp]:.4f}", file=stream)
    print(f"  silhouette {last.silhouette:.4f}", file=stream)
    return run


def cmd_experiment(cfg: SimulationConfig, n_runs: int, seed_base: int, out: Path,
                   workers: int = 1, stream=None):
    if n_runs < 2:
        raise UsageError("--n-runs must be at least 2")
    exp = run_experiment(cfg, n_runs, seed_base, workers)
    write_experiment_log(exp, out)
    print(significance_report(exp), end="", file=stream)
    print(f"wrote {2 * n_runs} run logs, {out / 'experiment.csv'}, "
          f"{out / 'significance.txt'}", file=stream)
    return exp


# -- analyze -----------------------------------------------------------------

def _load_inputs(path: Path, seed):
    """Returns (example run, experiment or None)."""
    if path.is_dir():
        exp = read_experiment_log(path)
        runs = exp.h1
        if seed is not None:
            runs = [r for r in exp.h1 if r.seed == seed]
            if not runs:
                raise UsageError(f"no H1 run with seed {seed} under {path}")
        return runs[0], exp
    if not path.exists():
        raise UsageError(f"input not found: {path}")
    return read_run_log(path), None


def write_spectrogram_csv(matrix, path):
    n_gen = matrix.counts.shape[1]
    rows = [[band, *(float(v) for v in matrix.rates[band])] for band in range(N_BANDS)]
    write_csv(path, ["band", *range(n_gen)], rows)


def write_scores_csv(run: RunLog, path, window=1):
    curves = score_curves(run, window)
    rows = []
    for g in range(len(run.generations)):
        rows.append([g, *(None if np.isnan(curves[r][g]) else float(curves[r][g]) for r in RATES)])
    write_csv(path, ["generation", *RATES], rows)


def embedding_rows(run: RunLog, generations):
    acfg = SimulationConfig.from_dict(run.config).analysis
    rows = []
    for gen in run.generations:
        if gen.generation not in generations or gen.signals is None:
            continue
        points, labels = signal_points(gen)
        y = tsne_embed(points, acfg.perplexity, acfg.tsne_iterations, seed=run.seed,
                       learning_rate=acfg.learning_rate, exaggeration=acfg.exaggeration,
                       exaggeration_iterations=acfg.exaggeration_iterations)
        for i, (lab, (x0, x1)) in enumerate(zip(labels, y)):
            rows.append([i, str(lab), float(x0), float(x1), gen.generation])
    return rows


def cmd_analyze(path: Path, out: Path, seed=None, generations=CLUSTER_GENERATIONS,
                stream=None):
    run, exp = _load_inputs(path, seed)
    written = []
    for sp, matrix in spectrogram(run).items():
        write_spectrogram_csv(matrix, out / f"spectrogram_{sp}.csv")
        written.append(f"spectrogram_{sp}.csv")
    window = SimulationConfig.from_dict(run.config).analysis.smoothing_window
    write_scores_csv(run, out / "scores.csv", window)
    written.append("scores.csv")
    sil = silhouette_series(run)
    write_csv(out / "silhouette_run.csv", ["generation", "silhouette"],
              [[g, float(v)] for g, v in enumerate(sil)])
    written.append("silhouette_run.csv")
    if exp is not None:
        for cond in ("H1", "H0"):
            s = exp.silhouette[cond]
            write_csv(out / f"silhouette_{cond}.csv", ["generation", "mean", "std"],
                      [[g, m, d] for g, (m, d) in enumerate(zip(s["mean"], s["std"]))])
            written.append(f"silhouette_{cond}.csv")
    rows = embedding_rows(run, set(generations))
    if rows:
        write_csv(out / "embeddings.csv", ["point_index", "species", "x", "y", "generation"], rows)
        written.append("embeddings.csv")
    else:
        print("no stored signals for the requested generations; embeddings skipped "
              "(run with log_detail=full-signals)", file=stream)
    print("wrote " + ", ".join(written) + f" to {out}", file=stream)
    return written


# -- plot --------------------------------------------------------------------

def _read_table(path: Path, required):
    if not path.exists():
        raise UsageError(f"missing analysis output {path}")
    with open(path, encoding="utf-8", newline="") as fh:
        reader = csv.DictReader(fh)
        fields = reader.fieldnames or []
        for col in required:
            if col not in fields:
                raise UsageError(f"{path}: missing column {col!r}")
        return fields, list(reader)


def _num(text):
    return float("nan") if text == "" else float(text)


def plot_spectrogram(inp: Path):
    matrices = {}
    for sp in SPECIES:
        fields, rows = _read_table(inp / f"spectrogram_{sp}.csv", ["band"])
        if len(rows) != N_BANDS:
            raise UsageError(f"spectrogram_{sp}.csv: expected {N_BANDS} band rows, got {len(rows)}")
        cols = fields[1:]
        matrices[sp] = [[_num(r[c]) for c in cols] for r in rows]
    return svg.spectrogram_svg(matrices)


def plot_silhouette(inp: Path):
    series = {}
    for cond in ("H1", "H0"):
        path = inp / f"silhouette_{cond}.csv"
        if path.exists():
            _, rows = _read_table(path, ["generation", "mean", "std"])
            series[cond] = ([_num(r["mean"]) for r in rows], [_num(r["std"]) for r in rows])
    single = None
    run_path = inp / "silhouette_run.csv"
    if run_path.exists():
        _, rows = _read_table(run_path, ["generation", "silhouette"])
        single = [_num(r["silhouette"]) for r in rows]
    if not series:
        if single is None:
            raise UsageError(f"no silhouette CSVs found in {inp}")
        series["run"] = (single, [0.0] * len(single))
        single = None
    return svg.silhouette_svg(series, single, marks=CLUSTER_GENERATIONS)


def plot_clusters(inp: Path):
    _, rows = _read_table(inp / "embeddings.csv",
                          ["point_index", "species", "x", "y", "generation"])
    panels = {}
    for r in rows:
        panels.setdefault(int(r["generation"]), []).append(
            (r["species"], float(r["x"]), float(r["y"])))
    return svg.clusters_svg(sorted(panels.items()))


def plot_scores(inp: Path):
    _, rows = _read_table(inp / "scores.csv", ["generation", *RATES])
    return svg.scores_svg({r: [_num(row[r]) for row in rows] for r in RATES})


_PLOTTERS = {"spectrogram": plot_spectrogram, "silhouette": plot_silhouette,
             "clusters": plot_clusters, "scores": plot_scores}


def cmd_plot(inp: Path, figures, out: Path, stream=None, skip_missing=False):
    """Render each figure to ``out/<figure>.svg``.

    With ``skip_missing`` a figure whose input file is absent is reported
    and skipped instead of aborting the whole command.
    """
    written = []
    for fig in figures:
        path = out / f"{fig}.svg"
        try:
            text = _PLOTTERS[fig](inp)
        except UsageError as exc:
            if skip_missing and str(exc).startswith("missing analysis output"):
                print(f"skipped {fig}: {exc}", file=stream)
                continue
            raise
        path.write_text(text, encoding="utf-8")
        written.append(path)
        print(f"wrote {path}", file=stream)
    return written


# -- argument parsing --------------------------------------------------------

def build_parser():
    p = _Parser(prog="nichesim", description="Acoustic niche co-evolution simulator.",
                epilog="Valid --set keys: " + ", ".join(valid_keys()))
    p.add_argument("-v", "--verbose", action="store_true", help="log progress to stderr")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(sp):
        sp.add_argument("--config", type=Path, help="sectioned key=value config file")
        sp.add_argument("--set", action="append", metavar="KEY=VALUE",
                        help="override a config value (repeatable)")
        sp.add_argument("-o", "--output", type=Path,
                        help=f"output directory (default ${OUTPUT_ENV} or ./out)")

    r = sub.add_parser("run", help="run one simulation")
    common(r)
    r.add_argument("--seed", type=int)

    e = sub.add_parser("experiment", help="seed-paired H1/H0 runs with significance tests")
    common(e)
    e.add_argument("--n-runs", type=int, default=20)
    e.add_argument("--seed-base", type=int, default=0)
    e.add_argument("--workers", type=int, default=os.cpu_count() or 1,
                   help="concurrent runs; does not change results")

    a = sub.add_parser("analyze", help="derive CSV matrices from a run log or experiment directory")
    a.add_argument("input", type=Path, help="run_*.log file or experiment directory")
    a.add_argument("-o", "--output", type=Path)
    a.add_argument("--seed", type=int, help="which H1 run of an experiment to detail")
    a.add_argument("--generations", type=int, nargs="+", default=list(CLUSTER_GENERATIONS),
                   help="generations to embed with t-SNE")

    pl = sub.add_parser("plot", help="render SVG figures from analysis outputs")
    pl.add_argument("input", type=Path, help="directory written by analyze")
    pl.add_argument("-o", "--output", type=Path)
    pl.add_argument("--figure", choices=FIGURES + ("all",), default="all")
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        if args.command in ("run", "experiment"):
            cfg = _config(args)
            out = _output_dir(args)
            if args.command == "run":
                cmd_run(cfg, out)
            else:
                cmd_experiment(cfg, args.n_runs, args.seed_base, out, max(1, args.workers))
        elif args.command == "analyze":
            cmd_analyze(args.input, _output_dir(args), args.seed, args.generations)
        else:
            every = args.figure == "all"
            figures = FIGURES if every else (args.figure,)
            cmd_plot(args.input, figures, _output_dir(args), skip_missing=every)
    except (ConfigError, UsageError) as exc:
        print(f"nichesim: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (LogError, OSError, ValueError, RuntimeError) as exc:
        print(f"nichesim: failed: {exc}", file=sys.stderr)
        return EXIT_RUNTIME
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
