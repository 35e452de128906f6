import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from nichesim.neat import (
    BIAS, INPUT, OUTPUT, ConnectionGene, Genome, InnovationRegistry, NeatConfig, NodeGene,
    initial_genome, mutate,
)
from nichesim.network import activate, activate_batch, build_network, sigmoid, topological_order
from nichesim.rng import stream


def single_link(w):
    nodes = [NodeGene(0, INPUT), NodeGene(1, BIAS), NodeGene(2, OUTPUT)]
    return Genome(nodes, [ConnectionGene(0, 0, 2, w)])


def grown_genome(seed, steps=40):
    """A random genome after many structural mutations."""
    rng = stream(seed, "grow")
    cfg = NeatConfig(add_node_rate=0.3, add_connection_rate=0.5)
    g = initial_genome(3, 9, rng)
    reg = InnovationRegistry.for_shape(3, 9)
    for _ in range(steps):
        mutate(g, cfg, reg, rng)
    return g


def recursive_eval(genome, x, slope=4.9):
    """Pull-based evaluation straight from the genome: an independent reference."""
    kinds = {n.id: n.kind for n in genome.nodes}
    inputs = [n.id for n in genome.nodes if n.kind == INPUT]
    incoming = {}
    for c in genome.connections:
        if c.enabled:
            incoming.setdefault(c.to_node, []).append((c.from_node, c.weight))
    memo = {}

    def value(nid):
        if nid in memo:
            return memo[nid]
        if kinds[nid] == INPUT:
            v = x[inputs.index(nid)]
        elif kinds[nid] == BIAS:
            v = 1.0
        else:
            s = sum(w * value(src) for src, w in incoming.get(nid, []))
            v = 1.0 / (1.0 + math.exp(-slope * s))
        memo[nid] = v
        return v

    return [value(n.id) for n in genome.nodes if n.kind == OUTPUT]


def test_initial_sender_has_36_edges():
    net = build_network(initial_genome(3, 9, stream(0, "t")))
    assert net.n_edges == 36 and net.n_inputs == 3 and net.n_outputs == 9


def test_disabled_connection_not_an_edge():
    g = initial_genome(3, 9, stream(1, "t"))
    g.connections[5].enabled = False
    assert build_network(g).n_edges == 35


def test_build_referentially_transparent():
    g = grown_genome(3)
    x = stream(3, "x").random((100, 3))
    assert np.array_equal(activate_batch(build_network(g), x), activate_batch(build_network(g), x))


def test_zero_weights_give_half():
    g = initial_genome(9, 4, stream(0, "t"))
    for c in g.connections:
        c.weight = 0.0
    out = activate(build_network(g), np.arange(9.0))
    assert np.all(out == 0.5)


def test_single_link_matches_high_precision_sigmoid():
    out = activate(build_network(single_link(1.0)), [1.0])[0]
    assert out == pytest.approx(float(oracles.sigmoid(1.0)), abs=1e-15)
    assert out == pytest.approx(0.99260, abs=1e-5)  # 0.992608...


@given(st.floats(-1, 1), st.floats(-1, 1))
def test_single_link_monotone(a, b):
    if a == b:
        return
    lo, hi = sorted((a, b))
    net = build_network(single_link(0.8))
    assert activate(net, [lo])[0] <= activate(net, [hi])[0]


def test_single_link_strictly_increasing_on_grid():
    net = build_network(single_link(0.8))
    ys = activate_batch(net, np.linspace(-1, 1, 201)[:, None])[:, 0]
    assert np.all(np.diff(ys) > 0)


@settings(max_examples=30, deadline=None)
@given(st.integers(0, 10_000))
def test_grown_networks_match_reference_evaluation(seed):
    g = grown_genome(seed)
    net = build_network(g)
    x = stream(seed, "x").uniform(-2, 2, (5, 3))
    got = activate_batch(net, x)
    for row, out in zip(x, got):
        assert out == pytest.approx(recursive_eval(g, row), abs=1e-12)


@given(st.lists(st.floats(-1e6, 1e6), min_size=1, max_size=20))
def test_outputs_strictly_inside_unit_interval(xs):
    y = sigmoid(np.array(xs))
    assert np.all(y > 0) and np.all(y < 1)


def test_activate_is_pure():
    net = build_network(grown_genome(5))
    x = np.array([0.3, 0.9, 0.1])
    first = activate(net, x)
    activate(net, np.array([1.0, 1.0, 1.0]))
    assert np.array_equal(first, activate(net, x))


def test_topological_order_and_cycle():
    assert topological_order([0, 1, 2, 3], [(2, 1), (0, 2), (1, 3)]) == [0, 2, 1, 3]
    with pytest.raises(ValueError):
        topological_order([0, 1], [(0, 1), (1, 0)])


def test_wrong_input_width_rejected():
    with pytest.raises(ValueError):
        activate(build_network(single_link(1.0)), [1.0, 2.0])
