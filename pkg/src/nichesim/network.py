"""Compile genomes into feedforward networks and evaluate them."""

from __future__ import annotations

import heapq
from dataclasses import dataclass

import numpy as np
from scipy.special import expit

from .neat import BIAS, INPUT, OUTPUT

DEFAULT_SLOPE = 4.9

# saturated activations are pulled back inside the open interval (0, 1)
_LO = np.finfo(np.float64).tiny
_HI = 1.0 - np.finfo(np.float64).epsneg


@dataclass(frozen=True)
class FeedforwardNetwork:
    n_nodes: int
    input_index: tuple
    bias_index: int
    output_index: tuple
    # (node index, source indices, weights) in evaluation order
    evaluation_order: tuple
    slope: float = DEFAULT_SLOPE

    @property
    def n_inputs(self):
        return len(self.input_index)

    @property
    def n_outputs(self):
        return len(self.output_index)

    @property
    def n_edges(self):
        return sum(len(src) for _, src, _ in self.evaluation_order)


def sigmoid(x, slope=DEFAULT_SLOPE):
    return np.clip(expit(slope * np.asarray(x, dtype=np.float64)), _LO, _HI)


def topological_order(node_ids, edges):
    """Kahn's algorithm with smallest-id-first tie breaking.

    ``edges`` is an iterable of (from, to) pairs. Raises ValueError on a cycle.
    """
    indeg = {n: 0 for n in node_ids}
    adj = {n: [] for n in node_ids}
    for a, b in edges:
        adj[a].append(b)
        indeg[b] += 1
    ready = [n for n, d in indeg.items() if d == 0]
    heapq.heapify(ready)
    order = []
    while ready:
        n = heapq.heappop(ready)
        order.append(n)
        for m in adj[n]:
            indeg[m] -= 1
            if indeg[m] == 0:
                heapq.heappush(ready, m)
    if len(order) != len(indeg):
        raise ValueError("enabled connections contain a cycle")
    return order


def build_network(genome, slope=DEFAULT_SLOPE):
    ids = [n.id for n in genome.nodes]
    index = {nid: i for i, nid in enumerate(ids)}
    enabled = [c for c in genome.connections if c.enabled]
    order = topological_order(ids, [(c.from_node, c.to_node) for c in enabled])
    incoming = {nid: ([], []) for nid in ids}
    for c in enabled:
        incoming[c.to_node][0].append(index[c.from_node])
        incoming[c.to_node][1].append(c.weight)
    kinds = {n.id: n.kind for n in genome.nodes}
    steps = []
    for nid in order:
        if kinds[nid] in (INPUT, BIAS):
            continue
        src, w = incoming[nid]
        steps.append((index[nid], np.array(src, dtype=np.intp), np.array(w, dtype=np.float64)))
    return FeedforwardNetwork(
        n_nodes=len(ids),
        input_index=tuple(index[n.id] for n in genome.nodes if n.kind == INPUT),
        bias_index=next(index[n.id] for n in genome.nodes if n.kind == BIAS),
        output_index=tuple(index[n.id] for n in genome.nodes if n.kind == OUTPUT),
        evaluation_order=tuple(steps),
        slope=slope,
    )


def activate_batch(net, inputs):
    """Evaluate ``net`` on each row of ``inputs`` (shape (batch, n_inputs))."""
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != net.n_inputs:
        raise ValueError(f"expected inputs of shape (batch, {net.n_inputs}), got {x.shape}")
    values = np.zeros((net.n_nodes, x.shape[0]))
    values[list(net.input_index)] = x.T
    values[net.bias_index] = 1.0
    for node, src, w in net.evaluation_order:
        total = w @ values[src] if len(src) else 0.0
        values[node] = sigmoid(total, net.slope)
    return values[list(net.output_index)].T.copy()


def activate(net, inputs):
    x = np.asarray(inputs, dtype=np.float64)
    if x.ndim != 1 or x.shape[0] != net.n_inputs:
        raise ValueError(f"expected {net.n_inputs} inputs, got shape {x.shape}")
    return activate_batch(net, x[None, :])[0]
