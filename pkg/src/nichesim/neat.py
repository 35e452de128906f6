"""NEAT genotypes and the evolutionary machinery shared by all populations.

Genomes are treated as values: every operator returns a fresh genome and
leaves its arguments untouched. Node ids are laid out as inputs first, then a
single bias node, then outputs; hidden nodes get ids from the registry.
"""

from __future__ import annotations

import bisect
import math
from dataclasses import dataclass, field, fields

import numpy as np

INPUT, BIAS, HIDDEN, OUTPUT = "input", "bias", "hidden", "output"

# candidate draws before add-connection gives up
MAX_CONNECTION_ATTEMPTS = 32


@dataclass
class NeatConfig:
    population_size: int = 50
    c1: float = 1.0
    c2: float = 1.0
    c3: float = 0.4
    compatibility_threshold: float = 3.0
    weight_mutate_rate: float = 0.8
    weight_perturb_stddev: float = 0.5
    weight_replace_rate: float = 0.1
    add_connection_rate: float = 0.05
    add_node_rate: float = 0.03
    survival_fraction: float = 0.2
    elitism_threshold: int = 5
    stagnation_limit: int = 15

    def __post_init__(self):
        self.validate()

    def validate(self):
        if self.population_size < 2:
            raise ValueError(f"population_size must be >= 2, got {self.population_size}")
        for name in ("weight_mutate_rate", "weight_replace_rate", "add_connection_rate",
                     "add_node_rate", "survival_fraction"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must be in [0, 1], got {value}")
        for name in ("c1", "c2", "c3", "compatibility_threshold", "weight_perturb_stddev"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative")
        if self.elitism_threshold < 0 or self.stagnation_limit < 0:
            raise ValueError("elitism_threshold and stagnation_limit must be non-negative")

    @classmethod
    def field_names(cls):
        return [f.name for f in fields(cls)]


@dataclass(slots=True)
class NodeGene:
    id: int
    kind: str


@dataclass(slots=True)
class ConnectionGene:
    innovation: int
    from_node: int
    to_node: int
    weight: float
    enabled: bool = True

    def copy(self):
        return ConnectionGene(self.innovation, self.from_node, self.to_node,
                              self.weight, self.enabled)


@dataclass
class Genome:
    nodes: list
    connections: list
    fitness: float = 0.0

    def copy(self):
        # node genes are never mutated in place, so sharing them is safe
        return Genome(list(self.nodes), [c.copy() for c in self.connections], self.fitness)

    @property
    def n_inputs(self):
        return sum(1 for n in self.nodes if n.kind == INPUT)

    @property
    def n_outputs(self):
        return sum(1 for n in self.nodes if n.kind == OUTPUT)

    @property
    def hidden_ids(self):
        return [n.id for n in self.nodes if n.kind == HIDDEN]

    def node_ids(self, kind):
        return [n.id for n in self.nodes if n.kind == kind]

    def enabled_connections(self):
        return [c for c in self.connections if c.enabled]

    def innovations(self):
        return [c.innovation for c in self.connections]


@dataclass
class InnovationRegistry:
    """Hands out innovation numbers and hidden-node ids for one population.

    ``seen`` caches structural mutations made during the current generation,
    so identical mutations in different genomes share their numbers.
    """

    next_innovation: int
    next_node_id: int
    seen: dict = field(default_factory=dict)

    @classmethod
    def for_shape(cls, n_inputs, n_outputs):
        return cls(next_innovation=(n_inputs + 1) * n_outputs,
                   next_node_id=n_inputs + 1 + n_outputs)

    def new_generation(self):
        self.seen.clear()

    def connection(self, from_node, to_node):
        key = ("conn", from_node, to_node)
        if key not in self.seen:
            self.seen[key] = self.next_innovation
            self.next_innovation += 1
        return self.seen[key]

    def split(self, innovation):
        """Return (node_id, innovation_in, innovation_out) for splitting a connection."""
        key = ("split", innovation)
        if key not in self.seen:
            self.seen[key] = (self.next_node_id, self.next_innovation, self.next_innovation + 1)
            self.next_node_id += 1
            self.next_innovation += 2
        return self.seen[key]


def initial_genome(n_inputs, n_outputs, rng):
    """Fully connected input+bias -> output genome with U(-1, 1) weights."""
    if n_inputs < 1 or n_outputs < 1:
        raise ValueError("need at least one input and one output")
    nodes = [NodeGene(i, INPUT) for i in range(n_inputs)]
    nodes.append(NodeGene(n_inputs, BIAS))
    nodes.extend(NodeGene(n_inputs + 1 + j, OUTPUT) for j in range(n_outputs))
    weights = rng.uniform(-1.0, 1.0, size=(n_inputs + 1) * n_outputs)
    connections = []
    for src in range(n_inputs + 1):
        for j in range(n_outputs):
            innov = src * n_outputs + j
            connections.append(ConnectionGene(innov, src, n_inputs + 1 + j, float(weights[innov])))
    return Genome(nodes, connections)


def validate_genome(g):
    """Raise ValueError if ``g`` breaks a structural invariant."""
    ids = [n.id for n in g.nodes]
    if len(set(ids)) != len(ids):
        raise ValueError("duplicate node ids")
    if not any(n.kind == OUTPUT for n in g.nodes) or not any(n.kind == INPUT for n in g.nodes):
        raise ValueError("genome lacks input or output nodes")
    if sum(1 for n in g.nodes if n.kind == BIAS) != 1:
        raise ValueError("genome must have exactly one bias node")
    innovs = g.innovations()
    if innovs != sorted(innovs) or len(set(innovs)) != len(innovs):
        raise ValueError("connection innovations must be strictly increasing")
    known = set(ids)
    pairs = set()
    for c in g.connections:
        if c.from_node not in known or c.to_node not in known:
            raise ValueError(f"connection {c.innovation} references a missing node")
        if (c.from_node, c.to_node) in pairs:
            raise ValueError(f"duplicate connection {c.from_node}->{c.to_node}")
        pairs.add((c.from_node, c.to_node))
    if _has_cycle(g.connections):
        raise ValueError("connection graph is cyclic")


def _has_cycle(connections):
    adj = {}
    indeg = {}
    for c in connections:
        adj.setdefault(c.from_node, []).append(c.to_node)
        indeg[c.to_node] = indeg.get(c.to_node, 0) + 1
        indeg.setdefault(c.from_node, 0)
    frontier = [n for n, d in indeg.items() if d == 0]
    seen = 0
    while frontier:
        n = frontier.pop()
        seen += 1
        for m in adj.get(n, ()):
            indeg[m] -= 1
            if indeg[m] == 0:
                frontier.append(m)
    return seen != len(indeg)


def _reaches(connections, start, goal):
    """True if ``goal`` is reachable from ``start`` along any connection."""
    adj = {}
    for c in connections:
        adj.setdefault(c.from_node, []).append(c.to_node)
    stack, visited = [start], {start}
    while stack:
        n = stack.pop()
        if n == goal:
            return True
        for m in adj.get(n, ()):
            if m not in visited:
                visited.add(m)
                stack.append(m)
    return False


def _insert_sorted(connections, gene):
    keys = [c.innovation for c in connections]
    connections.insert(bisect.bisect_left(keys, gene.innovation), gene)


def mutate_weights(g, cfg, rng):
    child = g.copy()
    n = len(child.connections)
    if n == 0 or cfg.weight_mutate_rate == 0.0:
        return child
    mutate = rng.random(n) < cfg.weight_mutate_rate
    replace = rng.random(n) < cfg.weight_replace_rate
    deltas = rng.normal(0.0, cfg.weight_perturb_stddev, size=n)
    fresh = rng.uniform(-1.0, 1.0, size=n)
    for i, c in enumerate(child.connections):
        if not mutate[i]:
            continue
        if replace[i]:
            c.weight = float(fresh[i])
        else:
            c.weight = c.weight + float(deltas[i])
    return child


def legal_new_connections(g):
    """All (from, to) pairs that add-connection may create in ``g``."""
    sources = [n.id for n in g.nodes if n.kind != OUTPUT]
    targets = [n.id for n in g.nodes if n.kind in (HIDDEN, OUTPUT)]
    existing = {(c.from_node, c.to_node) for c in g.connections}
    legal = []
    for a in sources:
        for b in targets:
            if a == b or (a, b) in existing:
                continue
            if _reaches(g.connections, b, a):
                continue
            legal.append((a, b))
    return legal


def mutate_add_connection(g, reg, rng, attempts=MAX_CONNECTION_ATTEMPTS):
    child = g.copy()
    sources = [n.id for n in child.nodes if n.kind != OUTPUT]
    targets = [n.id for n in child.nodes if n.kind in (HIDDEN, OUTPUT)]
    existing = {(c.from_node, c.to_node) for c in child.connections}
    for _ in range(attempts):
        a = sources[int(rng.integers(len(sources)))]
        b = targets[int(rng.integers(len(targets)))]
        if a == b or (a, b) in existing:
            continue
        # cycles are checked over all genes so that re-enabling a gene later is always safe
        if _reaches(child.connections, b, a):
            continue
        weight = float(rng.uniform(-1.0, 1.0))
        _insert_sorted(child.connections, ConnectionGene(reg.connection(a, b), a, b, weight))
        return child
    return child


def mutate_add_node(g, reg, rng):
    child = g.copy()
    enabled = [i for i, c in enumerate(child.connections) if c.enabled]
    if not enabled:
        return child
    old = child.connections[enabled[int(rng.integers(len(enabled)))]]
    node_id, innov_in, innov_out = reg.split(old.innovation)
    old.enabled = False
    child.nodes.append(NodeGene(node_id, HIDDEN))
    _insert_sorted(child.connections, ConnectionGene(innov_in, old.from_node, node_id, 1.0))
    _insert_sorted(child.connections, ConnectionGene(innov_out, node_id, old.to_node, old.weight))
    return child


def mutate(g, cfg, reg, rng):
    """Weight mutation followed by the two structural mutations at their rates."""
    child = mutate_weights(g, cfg, rng)
    if rng.random() < cfg.add_node_rate:
        child = mutate_add_node(child, reg, rng)
    if rng.random() < cfg.add_connection_rate:
        child = mutate_add_connection(child, reg, rng)
    return child


def compatibility_distance(a, b, cfg):
    genes_a = {c.innovation: c.weight for c in a.connections}
    genes_b = {c.innovation: c.weight for c in b.connections}
    if not genes_a and not genes_b:
        return 0.0
    max_a = max(genes_a, default=-1)
    max_b = max(genes_b, default=-1)
    cutoff = min(max_a, max_b)
    excess = disjoint = 0
    weight_diff = 0.0
    matching = 0
    for innov in genes_a.keys() | genes_b.keys():
        if innov in genes_a and innov in genes_b:
            matching += 1
            weight_diff += abs(genes_a[innov] - genes_b[innov])
        elif innov > cutoff:
            excess += 1
        else:
            disjoint += 1
    big = max(len(genes_a), len(genes_b))
    n = 1 if big < 20 else big
    mean_w = weight_diff / matching if matching else 0.0
    return cfg.c1 * excess / n + cfg.c2 * disjoint / n + cfg.c3 * mean_w


def crossover(parent_a, parent_b, rng):
    """Child with the fitter parent's gene set; ties go to ``parent_a``."""
    if parent_a.fitness >= parent_b.fitness:
        fitter, other = parent_a, parent_b
    else:
        fitter, other = parent_b, parent_a
    other_genes = {c.innovation: c for c in other.connections}
    a_genes = {c.innovation: c for c in parent_a.connections}
    b_genes = {c.innovation: c for c in parent_b.connections}
    n = len(fitter.connections)
    pick_a = rng.random(n) < 0.5
    stay_disabled = rng.random(n) < 0.75
    children = []
    for i, gene in enumerate(fitter.connections):
        partner = other_genes.get(gene.innovation)
        if partner is not None:
            src = a_genes[gene.innovation] if pick_a[i] else b_genes[gene.innovation]
            disabled = not gene.enabled or not partner.enabled
        else:
            src = gene
            disabled = not gene.enabled
        child_gene = src.copy()
        child_gene.enabled = not (disabled and stay_disabled[i])
        children.append(child_gene)
    return Genome(list(fitter.nodes), children)


@dataclass
class SpeciesCluster:
    representative: Genome
    members: list
    best_fitness_ever: float = -math.inf
    generations_since_improvement: int = 0


def speciate(population, previous, cfg):
    """Partition ``population`` into clusters seeded by last generation's representatives.

    Each returned cluster's representative is then replaced by its member
    closest to the old representative, so the next call compares against a
    genome from this generation.
    """
    clusters = [SpeciesCluster(c.representative, [], c.best_fitness_ever,
                               c.generations_since_improvement) for c in previous]
    dists = [[] for _ in clusters]
    for idx, g in enumerate(population):
        for k, cl in enumerate(clusters):
            d = compatibility_distance(g, cl.representative, cfg)
            if d <= cfg.compatibility_threshold:
                cl.members.append(idx)
                dists[k].append(d)
                break
        else:
            clusters.append(SpeciesCluster(g, [idx]))
            dists.append([0.0])
    kept = []
    for cl, ds in zip(clusters, dists):
        if not cl.members:
            continue
        cl.representative = population[cl.members[int(np.argmin(ds))]]
        kept.append(cl)
    return kept


def apportion(scores, total):
    """Largest-remainder apportionment of ``total`` seats by ``scores``."""
    scores = [max(0.0, float(s)) for s in scores]
    if not scores:
        return []
    s = sum(scores)
    if s <= 0.0:
        scores = [1.0] * len(scores)
        s = float(len(scores))
    raw = [x / s * total for x in scores]
    seats = [int(math.floor(r)) for r in raw]
    left = total - sum(seats)
    order = sorted(range(len(raw)), key=lambda i: (-(raw[i] - seats[i]), i))
    for i in order[:left]:
        seats[i] += 1
    return seats


def _eligible_count(size, fraction):
    return max(1, int(math.ceil(fraction * size)))


def reproduce(clusters, population, cfg, reg, rng):
    """Produce the next generation of ``cfg.population_size`` genomes.

    Updates the clusters' stagnation counters in place. Every genome in
    ``population`` must already carry its fitness.
    """
    reg.new_generation()
    champion_idx = max(range(len(population)), key=lambda i: (population[i].fitness, -i))

    for cl in clusters:
        best = max(population[i].fitness for i in cl.members)
        if best > cl.best_fitness_ever:
            cl.best_fitness_ever = best
            cl.generations_since_improvement = 0
        else:
            cl.generations_since_improvement += 1

    alive = [cl for cl in clusters
             if cl.generations_since_improvement <= cfg.stagnation_limit
             or champion_idx in cl.members]
    if not alive:
        alive = [max(clusters, key=lambda cl: cl.best_fitness_ever)]

    # cluster score = sum of shared fitness (fitness / size) = mean member fitness
    scores = [sum(population[i].fitness for i in cl.members) / len(cl.members) for cl in alive]
    quotas = apportion(scores, cfg.population_size)
    for k, cl in enumerate(alive):
        if champion_idx in cl.members and quotas[k] == 0:
            donor = max(range(len(quotas)), key=lambda j: (quotas[j], -j))
            quotas[donor] -= 1
            quotas[k] = 1

    offspring = []
    for cl, quota in zip(alive, quotas):
        if quota == 0:
            continue
        ranked = sorted(cl.members, key=lambda i: (-population[i].fitness, i))
        parents = [population[i] for i in ranked[:_eligible_count(len(ranked), cfg.survival_fraction)]]
        made = 0
        if len(cl.members) > cfg.elitism_threshold or champion_idx in cl.members:
            elite = population[ranked[0]].copy()
            elite.fitness = 0.0
            offspring.append(elite)
            made = 1
        while made < quota:
            if len(parents) == 1:
                child = parents[0].copy()
            else:
                i, j = rng.integers(len(parents), size=2)
                if i == j:
                    child = parents[int(i)].copy()
                else:
                    child = crossover(parents[int(i)], parents[int(j)], rng)
            child = mutate(child, cfg, reg, rng)
            child.fitness = 0.0
            offspring.append(child)
            made += 1
    return offspring


@dataclass
class Population:
    """One evolving population: genomes plus its speciation state and registry."""

    genomes: list
    clusters: list
    registry: InnovationRegistry
    n_inputs: int
    n_outputs: int

    @classmethod
    def create(cls, n_inputs, n_outputs, cfg, rng):
        genomes = [initial_genome(n_inputs, n_outputs, rng) for _ in range(cfg.population_size)]
        clusters = speciate(genomes, [], cfg)
        return cls(genomes, clusters, InnovationRegistry.for_shape(n_inputs, n_outputs),
                   n_inputs, n_outputs)

    def assign_fitness(self, values):
        for g, f in zip(self.genomes, values):
            g.fitness = float(f)

    def advance(self, cfg, rng):
        """Reproduce and re-speciate in place."""
        self.genomes = reproduce(self.clusters, self.genomes, cfg, self.registry, rng)
        self.clusters = speciate(self.genomes, self.clusters, cfg)
