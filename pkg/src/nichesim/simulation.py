"""Four-population co-evolution loop and the multi-run experiment harness."""

from __future__ import annotations

import logging
import time
from concurrent.futures import ProcessPoolExecutor

import numpy as np

from .analysis.curves import experiment_from_runs
from .analysis.stats import silhouette_score
from .config import SimulationConfig
from .fitness import FitnessMode, evaluate_generation
from .logs import GenerationLog, RunLog
from .neat import Population
from .network import build_network
from .rng import stream
from .soundscape import N_BANDS, N_BITS, SPECIES

log = logging.getLogger(__name__)

# (name, inputs, outputs) in the fixed reproduction order
POPULATION_SHAPES = (
    ("sender_A", N_BITS, N_BANDS),
    ("receiver_A", N_BANDS, N_BITS + 1),
    ("sender_B", N_BITS, N_BANDS),
    ("receiver_B", N_BANDS, N_BITS + 1),
)


def _generation_log(g, ev, cfg, store_signals):
    tables = ev.tables
    usage = ev.band_usage()
    fitness = {}
    for role in ("sender", "receiver"):
        for sp in SPECIES:
            values = tables.fitness[(role, sp)]
            fitness[f"{role}_{sp}"] = {"max": float(values.max()), "mean": float(values.mean())}
    points = np.concatenate([ev.channels[sp].reshape(-1, N_BANDS) for sp in SPECIES])
    labels = np.repeat(SPECIES, [ev.channels[sp].shape[0] * ev.channels[sp].shape[1]
                                 for sp in SPECIES])
    signals = None
    if store_signals:
        signals = {sp: ev.channels[sp].reshape(-1, N_BANDS).tolist() for sp in SPECIES}
    return GenerationLog(
        generation=g,
        band_usage={sp: usage[sp].tolist() for sp in SPECIES},
        species_id_rate=dict(tables.species_id_rate),
        bit_rate=dict(tables.bit_rate),
        msg_rate=dict(tables.msg_rate),
        fitness=fitness,
        silhouette=silhouette_score(points, labels),
        signals=signals,
    )


def run_simulation(cfg: SimulationConfig) -> RunLog:
    start = time.perf_counter()
    neat_cfg = cfg.neat
    pops = {}
    rngs = {}
    for name, n_in, n_out in POPULATION_SHAPES:
        pops[name] = Population.create(n_in, n_out, neat_cfg, stream(cfg.seed, "init", name))
        rngs[name] = stream(cfg.seed, "reproduce", name)

    run = RunLog(config=cfg.to_dict(), seed=int(cfg.seed))
    for g in range(cfg.generations):
        nets = {name: [build_network(x, cfg.activation_slope) for x in pops[name].genomes]
                for name in pops}
        ev = evaluate_generation(nets["sender_A"], nets["receiver_A"], nets["sender_B"],
                                 nets["receiver_B"], cfg.mode, cfg.transmission)
        for sp in SPECIES:
            for role in ("sender", "receiver"):
                pops[f"{role}_{sp}"].assign_fitness(ev.tables.fitness[(role, sp)])
        store = cfg.log_detail == "full-signals" and g % cfg.signal_stride == 0
        run.generations.append(_generation_log(g, ev, cfg, store))
        if g + 1 < cfg.generations:
            for name, _, _ in POPULATION_SHAPES:
                pops[name].advance(neat_cfg, rngs[name])
    run.elapsed_seconds = time.perf_counter() - start
    log.info("seed %s (%s) finished %d generations in %.1fs", cfg.seed, cfg.mode.value,
             cfg.generations, run.elapsed_seconds)
    return run


def _run_condition(args):
    base, mode, seed = args
    return run_simulation(base.replace(mode=FitnessMode(mode), seed=seed))


def run_experiment(base_cfg: SimulationConfig, n_runs: int, seed_base: int = 0, workers: int = 1):
    """Seed-paired H1/H0 runs (seed ``seed_base + k`` for both) plus per-generation statistics.

    ``workers`` only changes how many runs execute concurrently; results do
    not depend on it.
    """
    if n_runs < 2:
        raise ValueError("an experiment needs at least two runs per condition")
    jobs = [(base_cfg, mode, seed_base + k) for mode in ("H1", "H0") for k in range(n_runs)]
    if workers > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_condition, jobs))
    else:
        results = [_run_condition(j) for j in jobs]
    h1, h0 = results[:n_runs], results[n_runs:]
    return experiment_from_runs(h1, h0, seed_base)
