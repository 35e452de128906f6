import numpy as np
import pytest

from nichesim.analysis.stats import silhouette_score
from nichesim.analysis.tsne import conditional_affinities, joint_affinities, tsne, tsne_embed
from nichesim.rng import stream


def blobs(seed=0, n=60):
    rng = stream(seed, "blobs")
    centre = np.zeros(9)
    centre[0] = 10.0
    x = np.concatenate([rng.normal(0, 0.1, (n, 9)), centre + rng.normal(0, 0.1, (n, 9))])
    return x, np.repeat([0, 1], n)


@pytest.fixture(scope="module")
def blob_run():
    x, labels = blobs()
    y, kl = tsne(x, perplexity=30, iterations=1000, seed=3)
    return x, labels, y, kl


def test_shape_and_determinism(blob_run):
    x, _, y, _ = blob_run
    assert y.shape == (len(x), 2)
    again = tsne_embed(x[:100], perplexity=20, iterations=300, seed=3)
    assert np.array_equal(again, tsne_embed(x[:100], perplexity=20, iterations=300, seed=3))
    assert not np.array_equal(again, tsne_embed(x[:100], perplexity=20, iterations=300, seed=4))


def test_kl_does_not_increase_after_exaggeration(blob_run):
    kl = blob_run[3]
    assert kl[1000] <= kl[300]


def test_two_blobs_separate(blob_run):
    _, labels, y, _ = blob_run
    assert silhouette_score(y, labels) > 0.9


def test_perplexity_matched_by_bisection():
    x = stream(1, "p").normal(size=(80, 9))
    d = ((x[:, None] - x[None]) ** 2).sum(-1)
    p, _ = conditional_affinities(d, 15.0)
    assert np.allclose(p.sum(axis=1), 1.0)
    assert np.all(np.diag(p) == 0)
    safe = np.where(p > 0, p, 1.0)
    h = -np.sum(p * np.log(safe), axis=1)
    assert np.allclose(h, np.log(15.0), atol=1e-4)


def test_translation_invariance():
    # dyadic coordinates keep the shift exact in floating point
    x = stream(2, "dy").integers(-64, 64, (70, 9)) / 8.0
    shift = np.full(9, 16.0)
    assert np.array_equal(joint_affinities(x, 10.0), joint_affinities(x + shift, 10.0))
    a = tsne_embed(x, perplexity=10, iterations=200, seed=1)
    assert np.array_equal(a, tsne_embed(x + shift, perplexity=10, iterations=200, seed=1))


def test_degenerate_input_returns_initialisation():
    x = np.ones((40, 9))
    y = tsne_embed(x, perplexity=5, iterations=50, seed=7)
    init = tsne_embed(x, perplexity=5, iterations=1, seed=7)
    assert np.array_equal(y, init)
    assert np.abs(y).max() < 1e-3


def test_too_few_points_rejected():
    with pytest.raises(ValueError):
        tsne_embed(np.zeros((30, 9)), perplexity=10)
