import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sqmckit.resampling import (
    inverse_cdf_ancestors,
    multinomial_ancestors,
    sorted_ancestors_by_state,
)


def searchsorted_oracle(u, w):
    """O(N log N) reference: first index where the cumsum exceeds u."""
    c = np.cumsum(w)
    c[-1] = max(c[-1], 1.0)
    return np.searchsorted(c, u, side="right").clip(max=len(w) - 1)


class TestInverseCdf:
    def test_two_even_weights(self):
        a = inverse_cdf_ancestors([0.25, 0.75], [0.5, 0.5])
        assert a.tolist() == [0, 1]

    def test_degenerate_weight(self):
        a = inverse_cdf_ancestors([0.1, 0.5, 0.9], [1.0, 0.0, 0.0])
        assert a.tolist() == [0, 0, 0]

    def test_cumsum_oracle_example(self):
        # cumsums (0.1, 0.3, 0.6, 1.0) against u = (0.05, 0.15, 0.45, 0.95)
        a = inverse_cdf_ancestors([0.05, 0.15, 0.45, 0.95], [0.1, 0.2, 0.3, 0.4])
        assert a.tolist() == [0, 1, 2, 3]

    def test_u_equal_one_is_nudged(self):
        # cumsum boundary is strict (> u), so u = 0.5 already selects label 1
        a = inverse_cdf_ancestors([0.5, 1.0], [0.5, 0.5])
        assert a.tolist() == [1, 1]

    def test_unsorted_u_rejected(self):
        with pytest.raises(ValueError):
            inverse_cdf_ancestors([0.5, 0.4], [0.5, 0.5])

    def test_zero_weights_rejected(self):
        with pytest.raises(ValueError):
            inverse_cdf_ancestors([0.5], [0.0, 0.0])

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            inverse_cdf_ancestors([0.5], [0.5, 0.2])

    def test_monotone_output(self):
        rng = np.random.default_rng(0)
        u = np.sort(rng.random(500))
        w = rng.dirichlet(np.ones(100))
        a = inverse_cdf_ancestors(u, w)
        assert np.all(np.diff(a) >= 0)

    @pytest.mark.parametrize("seed", range(100))
    def test_matches_searchsorted_oracle(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(1, 10_000))
        u = np.sort(rng.random(n))
        w = rng.dirichlet(np.full(int(rng.integers(2, 50)), 0.5))
        w = w / w.sum()
        assert np.array_equal(inverse_cdf_ancestors(u, w), searchsorted_oracle(u, w))

    @pytest.mark.parametrize("seed", range(20))
    def test_work_bound(self, seed):
        rng = np.random.default_rng(seed + 1000)
        n = 5000
        u = np.sort(rng.random(n))
        w = rng.dirichlet(np.ones(n))
        w = w / w.sum()
        _, advances = inverse_cdf_ancestors(u, w, return_advances=True)
        assert advances <= n

    @given(st.integers(min_value=0, max_value=10**6))
    @settings(max_examples=50, deadline=None)
    def test_oracle_property(self, seed):
        rng = np.random.default_rng(seed)
        u = np.sort(rng.random(int(rng.integers(1, 200))))
        w = rng.dirichlet(np.ones(int(rng.integers(1, 40))))
        w = w / w.sum()
        assert np.array_equal(inverse_cdf_ancestors(u, w), searchsorted_oracle(u, w))


class TestMultinomial:
    def test_point_mass(self):
        a = multinomial_ancestors([1.0, 0.0], 50, rng=3)
        assert np.all(a == 0)

    def test_law_of_large_numbers(self):
        w = np.full(4, 0.25)
        a = multinomial_ancestors(w, 100_000, rng=np.random.default_rng(9))
        freqs = np.bincount(a, minlength=4) / 100_000
        assert np.all(np.abs(freqs - 0.25) < 0.01)

    def test_deterministic_given_seed(self):
        w = np.array([0.2, 0.3, 0.5])
        a = multinomial_ancestors(w, 1000, rng=77)
        b = multinomial_ancestors(w, 1000, rng=77)
        assert np.array_equal(a, b)

    def test_counts_unbiased_chi_square(self):
        w = np.array([0.1, 0.2, 0.3, 0.4])
        n = 20_000
        a = multinomial_ancestors(w, n, rng=np.random.default_rng(123))
        counts = np.bincount(a, minlength=4)
        chi2 = np.sum((counts - n * w) ** 2 / (n * w))
        assert chi2 < 16.27  # chi2(3) at the 0.001 quantile


class TestSortedAncestorsByState:
    def test_identity_order_reduces_to_inverse_cdf(self):
        u = np.array([0.1, 0.4, 0.9])
        w = np.array([0.3, 0.3, 0.4])
        assert np.array_equal(
            sorted_ancestors_by_state(u, w, np.arange(3)), inverse_cdf_ancestors(u, w)
        )

    def test_hand_traced_permuted_case(self):
        # order (1,2,0): permuted w = (0.5,0.3,0.2), cumsums (0.5,0.8,1.0)
        # u = (0.1,0.6,0.9) -> positions (0,1,2) -> original labels (1,2,0)
        w = np.array([0.2, 0.5, 0.3])
        order = np.array([1, 2, 0])
        a = sorted_ancestors_by_state(np.array([0.1, 0.6, 0.9]), w, order)
        assert a.tolist() == [1, 2, 0]

    def test_equal_weights_stratified_picks(self):
        rng = np.random.default_rng(21)
        n = 64
        w = np.full(n, 1.0 / n)
        order = rng.permutation(n)
        u = np.sort(rng.random(n))
        a = sorted_ancestors_by_state(u, w, order)
        oracle = order[searchsorted_oracle(u, w[order])]
        assert np.array_equal(a, oracle)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            sorted_ancestors_by_state([0.5], [0.5, 0.5], [0, 1, 2])
