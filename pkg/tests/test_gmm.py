import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from spoofkit.errors import DimensionMismatch, InsufficientData, InvalidParams
from spoofkit.models import GmmModel, GmmPairScorer, gmm_fit, gmm_loglik, llr_score


def naive_loglik(model, x):
    """Mean log of the mixture density summed term by term, no log-sum-exp."""
    total = 0.0
    for frame in x:
        density = 0.0
        for w, mu, var in zip(model.weights, model.means, model.variances):
            p = w
            for xd, md, vd in zip(frame, mu, var):
                p *= math.exp(-(xd - md) ** 2 / (2 * vd)) / math.sqrt(2 * math.pi * vd)
            density += p
        total += math.log(density)
    return total / len(x)


def two_clusters(seed, n=400):
    rng = np.random.default_rng(seed)
    truth = np.array([[-3.0, 0.0], [3.0, 1.0]])
    x = np.vstack([rng.normal(truth[0], 0.5, (n // 2, 2)), rng.normal(truth[1], 0.5, (n // 2, 2))])
    return rng.permutation(x), truth


def random_model(rng, k=3, d=2):
    w = rng.uniform(0.2, 1.0, k)
    return GmmModel(w / w.sum(), rng.normal(0, 1, (k, d)), rng.uniform(0.3, 2.0, (k, d)))


class TestFit:
    def test_single_component_closed_form(self, rng):
        x = rng.normal([1.0, -2.0, 0.5], [1.0, 0.3, 2.0], (500, 3))
        m = gmm_fit(x, n_components=1, seed=0)
        assert m.weights == pytest.approx([1.0], abs=1e-12)
        np.testing.assert_allclose(m.means[0], x.mean(axis=0), atol=1e-8)
        np.testing.assert_allclose(m.variances[0], x.var(axis=0), atol=1e-8)

    @pytest.mark.parametrize("seed", range(5))
    def test_two_cluster_recovery(self, seed):
        x, truth = two_clusters(seed)
        m = gmm_fit(x, n_components=2, seed=seed)
        means = m.means[np.argsort(m.means[:, 0])]
        np.testing.assert_allclose(means, truth, atol=0.1)
        np.testing.assert_allclose(m.weights, [0.5, 0.5], atol=0.05)

    @pytest.mark.parametrize("seed", range(3))
    def test_em_loglik_monotone(self, seed):
        rng = np.random.default_rng(seed)
        x = np.vstack([rng.normal(0, 1, (300, 4)), rng.standard_t(3, (300, 4)) + 2])
        m = gmm_fit(x, n_components=6, seed=seed, tol=0.0, max_iters=40)
        h = np.array(m.history)
        assert len(h) >= 2
        assert np.all(np.diff(h) >= -1e-8)

    def test_stops_on_tolerance(self):
        x, _ = two_clusters(0)
        m = gmm_fit(x, n_components=2, seed=0, tol=1e-4, max_iters=100)
        assert len(m.history) < 100
        assert abs(m.history[-1] - m.history[-2]) < 1e-4

    def test_deterministic(self, rng):
        x = rng.normal(size=(300, 3))
        a = gmm_fit(x, n_components=4, seed=7)
        b = gmm_fit(x, n_components=4, seed=7)
        for name in ("weights", "means", "variances"):
            assert np.array_equal(getattr(a, name), getattr(b, name))

    def test_invariants(self, rng):
        m = gmm_fit(rng.normal(size=(200, 2)), n_components=5, seed=1)
        assert abs(m.weights.sum() - 1.0) < 1e-9
        assert np.all(m.variances > 0)

    def test_variance_floor_on_constant_dimension(self, rng):
        x = np.column_stack([rng.normal(size=100), np.full(100, 3.0)])
        m = gmm_fit(x, n_components=2, seed=0)
        assert np.all(m.variances > 0)
        assert np.isfinite(gmm_loglik(m, x))

    def test_insufficient_data(self):
        with pytest.raises(InsufficientData):
            gmm_fit(np.zeros((3, 2)), n_components=4)

    def test_trained_on_recorded(self, rng):
        assert gmm_fit(rng.normal(size=(20, 2)), 1, trained_on="spoof").trained_on == "spoof"

    def test_rejects_invalid_parameters(self):
        with pytest.raises(InvalidParams):
            GmmModel([0.5, 0.6], np.zeros((2, 1)), np.ones((2, 1)))
        with pytest.raises(InvalidParams):
            GmmModel([1.0], np.zeros((1, 1)), np.zeros((1, 1)))


class TestLoglik:
    def test_standard_normal_at_zero(self):
        m = GmmModel([1.0], [[0.0]], [[1.0]])
        assert gmm_loglik(m, np.zeros((1, 1))) == pytest.approx(-0.5 * math.log(2 * math.pi), abs=1e-15)
        assert gmm_loglik(m, np.zeros((1, 1))) == pytest.approx(-0.9189, abs=1e-4)

    def test_repeated_frame(self, rng):
        m = random_model(rng)
        x = rng.normal(size=(1, 2))
        assert gmm_loglik(m, np.repeat(x, 17, axis=0)) == pytest.approx(gmm_loglik(m, x), abs=1e-12)

    @pytest.mark.parametrize("seed", range(5))
    def test_matches_naive_density(self, seed):
        rng = np.random.default_rng(seed)
        m = random_model(rng, k=4, d=3)
        x = rng.normal(0, 1.5, (25, 3))
        assert gmm_loglik(m, x) == pytest.approx(naive_loglik(m, x), abs=1e-9)

    def test_frame_permutation(self, rng):
        m = random_model(rng)
        x = rng.normal(size=(40, 2))
        assert gmm_loglik(m, x[rng.permutation(40)]) == pytest.approx(gmm_loglik(m, x), abs=1e-12)

    def test_far_outlier_is_finite(self):
        m = GmmModel([0.5, 0.5], [[0.0], [1.0]], [[1e-3], [1e-3]])
        assert np.isfinite(gmm_loglik(m, np.array([[1e4]])))

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            gmm_loglik(random_model(rng, d=2), np.zeros((4, 3)))

    @settings(max_examples=30, deadline=None)
    @given(st.integers(0, 10_000), st.integers(1, 4), st.integers(1, 3))
    def test_property_matches_naive(self, seed, k, d):
        rng = np.random.default_rng(seed)
        m = random_model(rng, k, d)
        x = rng.normal(0, 2, (5, d))
        assert gmm_loglik(m, x) == pytest.approx(naive_loglik(m, x), abs=1e-9)


class TestLlr:
    def test_identical_models_score_zero(self, rng):
        m = random_model(rng)
        assert llr_score(GmmPairScorer(m, m), rng.normal(size=(30, 2))) == 0.0

    def test_swap_antisymmetry(self, rng):
        s = GmmPairScorer(random_model(rng), random_model(rng))
        x = rng.normal(size=(30, 2))
        assert llr_score(s.swapped(), x) == -llr_score(s, x)

    def test_favours_bonafide_distribution(self):
        rng = np.random.default_rng(0)
        bona = gmm_fit(rng.normal(0, 1, (500, 2)), 2, seed=0)
        spoof = gmm_fit(rng.normal(1.5, 1, (500, 2)), 2, seed=1)
        s = GmmPairScorer(bona, spoof)
        scores = [s.score(rng.normal(0, 1, (20, 2))) for _ in range(100)]
        assert np.mean(scores) > 0

    def test_dimension_mismatch(self, rng):
        with pytest.raises(DimensionMismatch):
            GmmPairScorer(random_model(rng, d=2), random_model(rng, d=3))
        s = GmmPairScorer(random_model(rng), random_model(rng))
        with pytest.raises(DimensionMismatch):
            s.score(np.zeros((3, 5)))
