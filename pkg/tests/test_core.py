import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqmckit.core import (
    ParticleDeathError,
    log_likelihood_estimate,
    normalize_weights,
    weighted_moments,
)


class TestNormalizeWeights:
    def test_uniform_logs(self):
        w, log_mean = normalize_weights(np.zeros(4))
        assert np.allclose(w, 0.25)
        assert log_mean == 0.0

    def test_one_dead_particle(self):
        c = 3.7
        w, log_mean = normalize_weights(np.array([c, -np.inf]))
        assert w.tolist() == [1.0, 0.0]
        assert log_mean == pytest.approx(c - np.log(2.0))

    def test_matches_naive_exponentiation(self):
        rng = np.random.default_rng(8)
        log_w = rng.normal(scale=3.0, size=200)
        w, log_mean = normalize_weights(log_w)
        naive = np.exp(log_w) / np.exp(log_w).sum()
        assert np.allclose(w, naive, atol=1e-12)
        assert log_mean == pytest.approx(np.log(np.exp(log_w).mean()))

    def test_sum_is_exactly_one(self):
        # exactness = the exactly-rounded sum equals 1 (summation-order
        # independent); the plain float sum must sit within 1e-12
        rng = np.random.default_rng(5)
        for _ in range(50):
            w, _ = normalize_weights(rng.normal(scale=10.0, size=333))
            assert math.fsum(w) == 1.0
            assert abs(w.sum() - 1.0) < 1e-12

    def test_particle_death_carries_time_index(self):
        with pytest.raises(ParticleDeathError) as exc:
            normalize_weights(np.full(7, -np.inf), t=13)
        assert exc.value.t == 13
        assert "t=13" in str(exc.value)

    def test_nan_rejected(self):
        with pytest.raises(ValueError):
            normalize_weights(np.array([0.0, np.nan]))

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=40, deadline=None)
    def test_softmax_property(self, seed):
        rng = np.random.default_rng(seed)
        log_w = rng.normal(scale=rng.uniform(0.1, 50), size=int(rng.integers(2, 100)))
        w, _ = normalize_weights(log_w)
        assert np.all(w >= 0)
        assert abs(w.sum() - 1.0) < 1e-12
        # ratios match exactly in log space
        i, j = 0, len(w) // 2
        if w[i] > 0 and w[j] > 0:
            assert np.log(w[i] / w[j]) == pytest.approx(log_w[i] - log_w[j], abs=1e-9)


class TestLogLikelihoodEstimate:
    def test_all_unit_potentials(self):
        assert log_likelihood_estimate(np.zeros(10)) == 0.0

    def test_single_constant_potential(self):
        c = 0.731
        _, log_mean = normalize_weights(np.full(64, np.log(c)))
        assert log_likelihood_estimate([log_mean]) == pytest.approx(np.log(c))

    def test_empty_rejected(self):
        with pytest.raises(ValueError):
            log_likelihood_estimate([])


class TestWeightedMoments:
    def test_default_first_component(self):
        states = np.array([[1.0, 5.0], [3.0, 7.0]])
        w = np.array([0.25, 0.75])
        m = weighted_moments(states, w, {"mean_x1": lambda x: x[:, 0]})
        assert m["mean_x1"] == pytest.approx(2.5)


class TestParticleSystem:
    def test_invariants_along_a_run(self):
        from sqmckit.core import ParticleSystem

        rng = np.random.default_rng(4)
        ps = ParticleSystem.initial(rng.normal(size=(50, 2)), rng.normal(size=50))
        for t in range(1, 4):
            anc = rng.integers(0, 50, size=50)
            ps.advance(rng.normal(size=(50, 2)), rng.normal(size=50), anc)
            assert ps.t == t
            softmax = np.exp(ps.log_weights - ps.log_weights.max())
            softmax = softmax / softmax.sum()
            assert np.abs(ps.norm_weights - softmax).max() < 1e-12
        # cumulative increments reconstruct the likelihood estimate
        assert ps.log_likelihood() == pytest.approx(np.sum(ps.log_lt_increments))
        assert len(ps.log_lt_increments) == ps.t + 1
