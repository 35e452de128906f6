"""Run and experiment logs: in-memory records and their on-disk formats.

A run log is UTF-8 JSON lines: one header object (config echo, seed,
timing) followed by one object per generation. The summary CSV next to it
has one row per generation and species.
"""

from __future__ import annotations

import csv
import json
import os
from dataclasses import dataclass, field
from pathlib import Path

from .soundscape import N_BANDS, SPECIES

POPULATIONS = ("sender_A", "receiver_A", "sender_B", "receiver_B")

RUN_CSV_HEADER = (["generation", "species"] + [f"band{i}" for i in range(N_BANDS)]
                  + ["species_id_rate", "bit_rate", "msg_rate", "max_fitness", "mean_fitness"])
EXPERIMENT_CSV_HEADER = ["generation", "h1_sil_mean", "h1_sil_std", "h0_sil_mean",
                         "h0_sil_std", "welch_t", "welch_df", "welch_p"]


class LogError(IOError):
    pass


@dataclass
class GenerationLog:
    generation: int
    band_usage: dict
    species_id_rate: dict
    bit_rate: dict
    msg_rate: dict
    # population name -> {"max": float, "mean": float}
    fitness: dict
    silhouette: float | None = None
    # species -> list of raw 9-channel vectors, present only with full-signals detail
    signals: dict | None = None

    def to_dict(self):
        return {
            "generation": self.generation,
            "band_usage": self.band_usage,
            "species_id_rate": self.species_id_rate,
            "bit_rate": self.bit_rate,
            "msg_rate": self.msg_rate,
            "fitness": self.fitness,
            "silhouette": self.silhouette,
            "signals": self.signals,
        }

    @classmethod
    def from_dict(cls, d):
        return cls(**{k: d.get(k) for k in cls.__dataclass_fields__})


@dataclass
class RunLog:
    config: dict
    seed: int
    generations: list = field(default_factory=list)
    elapsed_seconds: float = field(default=0.0, compare=False)

    @property
    def population_size(self):
        return int(self.config["neat"]["population_size"])

    @property
    def mode(self):
        return self.config["mode"]


@dataclass
class ExperimentLog:
    h1: list
    h0: list
    silhouette: dict
    welch: list
    seed_base: int = 0

    def summary_rows(self):
        rows = []
        for g, w in enumerate(self.welch):
            s = self.silhouette
            rows.append([g, s["H1"]["mean"][g], s["H1"]["std"][g], s["H0"]["mean"][g],
                         s["H0"]["std"][g], w.t, w.df, w.p])
        return rows


def _fmt(value):
    if value is None:
        return ""
    if isinstance(value, float):
        return repr(value)
    return str(value)


def _open(path, mode):
    try:
        return open(path, mode, encoding="utf-8", newline="" if "w" in mode else None)
    except OSError as exc:
        raise LogError(f"cannot open {path}: {exc.strerror}") from None


def run_summary_rows(log):
    rows = []
    for gen in log.generations:
        for sp in SPECIES:
            fit = gen.fitness[f"receiver_{sp}"]
            rows.append([gen.generation, sp, *gen.band_usage[sp], gen.species_id_rate[sp],
                         gen.bit_rate[sp], gen.msg_rate[sp], fit["max"], fit["mean"]])
    return rows


def write_csv(path, header, rows):
    with _open(path, "w") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([_fmt(v) for v in row])


def write_run_log(log, path, csv_path=None):
    """Write ``log`` as JSON lines to ``path`` and its summary CSV beside it."""
    path = Path(path)
    csv_path = Path(csv_path) if csv_path else path.with_suffix(".csv")
    with _open(path, "w") as fh:
        header = {"type": "header", "seed": log.seed, "config": log.config,
                  "elapsed_seconds": log.elapsed_seconds}
        fh.write(json.dumps(header, sort_keys=True) + "\n")
        for gen in log.generations:
            record = {"type": "generation", **gen.to_dict()}
            fh.write(json.dumps(record, sort_keys=True) + "\n")
    write_csv(csv_path, RUN_CSV_HEADER, run_summary_rows(log))
    return path, csv_path


def read_run_log(path):
    path = Path(path)
    header = None
    gens = []
    with _open(path, "r") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                obj = json.loads(line)
            except json.JSONDecodeError as exc:
                raise LogError(f"{path}:{lineno}: malformed record: {exc.msg}") from None
            kind = obj.pop("type", None)
            if kind == "header":
                header = obj
            elif kind == "generation":
                gens.append(GenerationLog.from_dict(obj))
            else:
                raise LogError(f"{path}:{lineno}: unknown record type {kind!r}")
    if header is None:
        raise LogError(f"{path}: missing header record")
    return RunLog(header["config"], header["seed"], gens, header.get("elapsed_seconds", 0.0))


def _run_name(log):
    return f"run_{log.seed}"


def write_experiment_log(log, directory):
    """Write per-run logs under h1/ and h0/, the summary CSV and a significance report."""
    from .analysis.curves import significance_report

    directory = Path(directory)
    for cond, runs in (("h1", log.h1), ("h0", log.h0)):
        sub = directory / cond
        try:
            os.makedirs(sub, exist_ok=True)
        except OSError as exc:
            raise LogError(f"cannot create {sub}: {exc.strerror}") from None
        for run in runs:
            write_run_log(run, sub / f"{_run_name(run)}.log")
    write_csv(directory / "experiment.csv", EXPERIMENT_CSV_HEADER, log.summary_rows())
    with _open(directory / "significance.txt", "w") as fh:
        fh.write(significance_report(log))
    return directory


def read_experiment_csv(path):
    with _open(path, "r") as fh:
        reader = csv.DictReader(fh)
        missing = [c for c in EXPERIMENT_CSV_HEADER if c not in (reader.fieldnames or [])]
        if missing:
            raise LogError(f"{path}: missing column {missing[0]!r}")
        rows = list(reader)
    return {c: [int(r[c]) if c == "generation" else float(r[c]) for r in rows]
            for c in EXPERIMENT_CSV_HEADER}


def read_experiment_log(directory):
    from .analysis.curves import experiment_from_runs

    directory = Path(directory)
    runs = {}
    for cond in ("h1", "h0"):
        files = sorted((directory / cond).glob("run_*.log"),
                       key=lambda p: int(p.stem.split("_", 1)[1]))
        if not files:
            raise LogError(f"{directory / cond}: no run logs found")
        runs[cond] = [read_run_log(f) for f in files]
    seed_base = min(r.seed for r in runs["h1"])
    return experiment_from_runs(runs["h1"], runs["h0"], seed_base)


__all__ = [
    "GenerationLog", "RunLog", "ExperimentLog", "LogError", "POPULATIONS",
    "write_run_log", "read_run_log", "write_experiment_log", "read_experiment_log",
    "read_experiment_csv", "run_summary_rows", "write_csv",
]
