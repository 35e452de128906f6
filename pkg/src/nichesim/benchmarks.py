"""XOR: the customary check that the neuroevolution machinery can grow structure."""

from __future__ import annotations

import numpy as np

from .neat import NeatConfig, Population
from .network import activate_batch, build_network
from .rng import stream

XOR_INPUTS = np.array([[0.0, 0.0], [0.0, 1.0], [1.0, 0.0], [1.0, 1.0]])
XOR_TARGETS = np.array([0.0, 1.0, 1.0, 0.0])


def xor_outputs(genome):
    return activate_batch(build_network(genome), XOR_INPUTS)[:, 0]


def xor_fitness(genome):
    return 4.0 - float(np.sum((xor_outputs(genome) - XOR_TARGETS) ** 2))


def xor_solved(genome):
    return bool(np.all(np.abs(xor_outputs(genome) - XOR_TARGETS) < 0.5))


def solve_xor(seed, cfg=None, max_generations=300):
    """Evolve until some genome solves XOR. Returns (generation or None, best genome)."""
    cfg = cfg or NeatConfig()
    pop = Population.create(2, 1, cfg, stream(seed, "xor", "init"))
    rng = stream(seed, "xor", "reproduce")
    best = None
    for gen in range(max_generations):
        scores = [xor_fitness(g) for g in pop.genomes]
        pop.assign_fitness(scores)
        best = pop.genomes[int(np.argmax(scores))]
        for g in pop.genomes:
            if xor_solved(g):
                return gen, g
        pop.advance(cfg, rng)
    return None, best
