import numpy as np
import pytest
from scipy import stats

from cfsched.core import (
    DimensionError,
    DomainError,
    PowerConfig,
    RngStream,
    derive_trial_stream,
    sample_channel,
    sub_seed,
)


class TestPowerConfig:
    def test_accepts_positive(self):
        assert PowerConfig(10).P == 10.0

    @pytest.mark.parametrize("bad", [0, -1, float("inf"), float("nan")])
    def test_rejects_invalid(self, bad):
        with pytest.raises(DomainError):
            PowerConfig(bad)


class TestSampleChannel:
    def test_repeatable_for_same_seed(self):
        a = sample_channel(3, derive_trial_stream(11, 0))
        b = sample_channel(3, derive_trial_stream(11, 0))
        assert a.shape == (3,)
        np.testing.assert_array_equal(a, b)

    def test_single_entry_is_finite(self):
        h = sample_channel(1, derive_trial_stream(5, 2))
        assert h.shape == (1,) and np.isfinite(h[0])

    def test_zero_length_rejected(self):
        with pytest.raises(DimensionError):
            sample_channel(0, derive_trial_stream(1, 1))

    def test_advances_stream(self):
        s = derive_trial_stream(3, 3)
        assert not np.array_equal(sample_channel(4, s), sample_channel(4, s))

    def test_accepts_numpy_generator(self):
        assert sample_channel(5, np.random.default_rng(0)).shape == (5,)

    def test_pooled_moments(self):
        pooled = np.concatenate([sample_channel(10, derive_trial_stream(2024, t)) for t in range(10_000)])
        assert pooled.size == 100_000
        assert abs(pooled.mean()) < 0.02
        assert abs(pooled.var() - 1.0) < 0.03

    def test_normality_ks(self):
        pooled = np.concatenate([sample_channel(1, derive_trial_stream(77, t)) for t in range(10_000)])
        assert stats.kstest(pooled, "norm").pvalue > 0.01


class TestStreams:
    def test_distinct_indices_differ(self):
        a = derive_trial_stream(7, 0).standard_normal(8)
        b = derive_trial_stream(7, 1).standard_normal(8)
        assert not np.array_equal(a, b)

    def test_same_pair_identical(self):
        a = derive_trial_stream(7, 3).standard_normal(8)
        b = derive_trial_stream(7, 3).standard_normal(8)
        np.testing.assert_array_equal(a, b)

    def test_order_independent(self):
        forward = [derive_trial_stream(9, t).standard_normal(4) for t in range(20)]
        backward = [derive_trial_stream(9, t).standard_normal(4) for t in reversed(range(20))][::-1]
        for x, y in zip(forward, backward):
            np.testing.assert_array_equal(x, y)

    def test_seed_and_index_not_interchangeable(self):
        a = derive_trial_stream(1, 2).standard_normal(4)
        b = derive_trial_stream(2, 1).standard_normal(4)
        assert not np.array_equal(a, b)

    def test_identity_is_value(self):
        assert RngStream(4, 5) == RngStream(4, 5)
        assert RngStream(4, 5) != RngStream(4, 6)

    @pytest.mark.parametrize("seed", [-1, 2**64, 1.5, True])
    def test_rejects_out_of_range(self, seed):
        with pytest.raises(DomainError):
            RngStream(seed, 0)

    def test_streams_uncorrelated(self):
        x = np.array([derive_trial_stream(13, 2 * t).standard_normal(1)[0] for t in range(5000)])
        y = np.array([derive_trial_stream(13, 2 * t + 1).standard_normal(1)[0] for t in range(5000)])
        # |r| < 3/sqrt(n) under independence
        assert abs(np.corrcoef(x, y)[0, 1]) < 3 / np.sqrt(5000)

    def test_sub_seed_deterministic(self):
        assert sub_seed(1, 2, 3) == sub_seed(1, 2, 3)
        assert sub_seed(1, 2, 3) != sub_seed(1, 3, 2)
