import math

import mpmath
import numpy as np
import pytest
import scipy.stats
from hypothesis import given, settings, strategies as st

import oracles
from nichesim.analysis.stats import (
    regularized_incomplete_beta, silhouette_score, student_t_cdf, welch_t_test,
)
from nichesim.rng import stream

samples = st.lists(st.floats(-100, 100), min_size=2, max_size=15)


class TestSilhouette:
    def test_separated_duplicates_score_one(self):
        v = [6.0, 8.0, 0, 0, 0, 0, 0, 0, 0]
        pts = [[0.0] * 9, [0.0] * 9, v, v]
        assert silhouette_score(pts, list("AABB")) == 1.0

    def test_identical_points_score_zero(self):
        assert silhouette_score(np.ones((6, 9)), list("AAABBB")) == 0.0

    def test_forty_points_against_brute_force(self):
        rng = stream(0, "sil40")
        pts = rng.normal(size=(40, 9))
        labels = rng.integers(0, 2, 40)
        assert silhouette_score(pts, labels) == pytest.approx(
            oracles.silhouette(pts.tolist(), labels.tolist()), abs=1e-12)

    def test_hundred_random_sets_against_brute_force(self):
        rng = stream(1, "sil100")
        for _ in range(100):
            n = int(rng.integers(3, 30))
            k = int(rng.integers(2, 5))
            labels = rng.integers(0, k, n)
            labels[:2] = [0, 1]
            pts = rng.normal(size=(n, int(rng.integers(1, 10))))
            assert silhouette_score(pts, labels) == pytest.approx(
                oracles.silhouette(pts.tolist(), labels.tolist()), abs=1e-12)

    def test_singleton_cluster_scores_zero(self):
        pts = [[0.0], [0.1], [5.0]]
        # the singleton contributes 0, the pair scores near 1
        expected = oracles.silhouette(pts, [0, 0, 1])
        assert silhouette_score(pts, [0, 0, 1]) == pytest.approx(expected, abs=1e-12)

    def test_permutation_and_label_swap_invariance(self):
        rng = stream(2, "perm")
        pts = rng.normal(size=(25, 4))
        labels = rng.integers(0, 2, 25)
        base = silhouette_score(pts, labels)
        order = rng.permutation(25)
        assert silhouette_score(pts[order], labels[order]) == pytest.approx(base, abs=1e-12)
        assert silhouette_score(pts, 1 - labels) == pytest.approx(base, abs=1e-12)

    def test_single_label_rejected(self):
        with pytest.raises(ValueError):
            silhouette_score(np.zeros((4, 2)), [0, 0, 0, 0])


class TestStudentT:
    def test_zero_is_half(self):
        for df in (0.5, 1, 3, 30, 1e4):
            assert student_t_cdf(0.0, df) == 0.5

    def test_cauchy_closed_form(self):
        for t in np.linspace(-20, 20, 81):
            assert student_t_cdf(t, 1) == pytest.approx(0.5 + math.atan(t) / math.pi, abs=1e-10)
        assert student_t_cdf(1.0, 1) == pytest.approx(0.75, abs=1e-10)

    def test_table_value(self):
        assert student_t_cdf(2.042, 30) == pytest.approx(0.975, abs=5e-4)

    @given(st.floats(-50, 50), st.floats(0.2, 500))
    def test_symmetry(self, t, df):
        assert student_t_cdf(t, df) + student_t_cdf(-t, df) == pytest.approx(1.0, abs=1e-10)

    @given(st.floats(-30, 30), st.floats(0, 5), st.floats(0.5, 200))
    def test_monotone(self, t, dt, df):
        assert student_t_cdf(t, df) <= student_t_cdf(t + dt, df) + 1e-15

    def test_against_mpmath_incomplete_beta(self):
        rng = stream(3, "beta")
        for _ in range(200):
            x, a, b = rng.random(), rng.uniform(0.1, 40), rng.uniform(0.1, 40)
            ref = float(mpmath.betainc(a, b, 0, x, regularized=True))
            assert regularized_incomplete_beta(x, a, b) == pytest.approx(ref, abs=1e-10)

    def test_cross_check_scipy(self):
        for t, df in [(-3.1, 2.5), (0.7, 7), (4.2, 13.3), (1.0, 300)]:
            assert student_t_cdf(t, df) == pytest.approx(scipy.stats.t.cdf(t, df), abs=1e-10)


class TestWelch:
    def test_analytic_example(self):
        r = welch_t_test([1, 2, 3, 4, 5], [2, 3, 4, 5, 6])
        assert r.t == -1.0 and r.df == 8.0
        assert r.p == pytest.approx(0.3466, abs=1e-4)
        ref = scipy.stats.ttest_ind([1, 2, 3, 4, 5], [2, 3, 4, 5, 6], equal_var=False)
        assert r.p == pytest.approx(ref.pvalue, abs=1e-10)

    def test_identical_samples(self):
        r = welch_t_test([1.0, 2.0, 4.0], [1.0, 2.0, 4.0])
        assert r.t == 0.0 and r.p == pytest.approx(1.0)

    def test_equal_variance_equal_size_df(self):
        r = welch_t_test([0.0, 1.0, 2.0, 3.0], [10.0, 11.0, 12.0, 13.0])
        assert r.df == pytest.approx(6.0, abs=1e-12)

    def test_degenerate_cases(self):
        same = welch_t_test([2.0, 2.0], [2.0, 2.0, 2.0])
        assert (same.t, same.p, same.degenerate) == (0.0, 1.0, True)
        diff = welch_t_test([1.0, 1.0], [3.0, 3.0])
        assert diff.p == 0.0 and diff.degenerate and diff.t == -math.inf

    @settings(max_examples=200)
    @given(samples, samples)
    def test_antisymmetry_and_bounds(self, a, b):
        r, s = welch_t_test(a, b), welch_t_test(b, a)
        assert 0.0 <= r.p <= 1.0 and r.df > 0
        assert s.t == -r.t
        assert s.p == pytest.approx(r.p, abs=1e-12)

    def test_random_against_scipy(self):
        rng = stream(4, "welch")
        for _ in range(100):
            a = rng.normal(0, rng.uniform(0.1, 3), int(rng.integers(2, 25)))
            b = rng.normal(rng.uniform(-2, 2), rng.uniform(0.1, 3), int(rng.integers(2, 25)))
            ref = scipy.stats.ttest_ind(a, b, equal_var=False)
            r = welch_t_test(a, b)
            assert r.t == pytest.approx(ref.statistic, rel=1e-10)
            assert r.p == pytest.approx(ref.pvalue, abs=1e-9)

    def test_tiny_variance_does_not_underflow(self):
        r = welch_t_test([0.0, 9.178420937091863e-116], [0.0, 0.0])
        assert r.df == pytest.approx(1.0) and r.t == pytest.approx(1.0)
        assert r.p == pytest.approx(0.5)

    def test_too_small_rejected(self):
        with pytest.raises(ValueError):
            welch_t_test([1.0], [1.0, 2.0])
