import math

import numpy as np
import pytest

import orfade.lognormal as ln
from orfade.channel import (
    HopParams,
    SamplingMode,
    error_variance,
    sample_hop,
    sample_hop_arrays,
)

from conftest import db_lognormal_samples


def philox(seed):
    return np.random.Generator(np.random.Philox(seed))


class TestHopParams:
    @pytest.mark.parametrize("rho", [0.0, -0.1, 1.0001])
    def test_rho_range_enforced(self, rho):
        with pytest.raises(ValueError):
            HopParams(0.0, 4.0, rho)

    def test_negative_sigma_rejected(self):
        with pytest.raises(ValueError):
            HopParams(0.0, -1.0)


class TestErrorVariance:
    def test_perfect_estimation_is_zero(self):
        assert error_variance(HopParams(0.0, 6.0, 1.0)) == 0.0

    def test_deterministic_channel_is_zero(self):
        assert error_variance(HopParams(0.0, 0.0, 0.5)) == 0.0

    def test_against_sampling_oracle(self):
        hop = HopParams(0.0, 6.0, 0.9)
        rng = np.random.default_rng(17)
        draws = db_lognormal_samples(rng, 0.0, 6.0, 2_000_000)
        var_hat = draws.var()
        m4 = np.mean((draws - draws.mean()) ** 4)
        se_var = math.sqrt((m4 - var_hat ** 2) / draws.size)
        assert abs(error_variance(hop) - 0.1 * var_hat) <= 3 * 0.1 * se_var


class TestSampleHop:
    @pytest.mark.parametrize("mode", list(SamplingMode))
    def test_reconstruction_identity_bit_exact(self, mode):
        hop = HopParams(1.0, 4.0, 0.87)
        h_true, h_est, e = sample_hop_arrays(hop, mode, philox(5), 10_000)
        assert np.array_equal(h_true, hop.rho * h_est + e)

    @pytest.mark.parametrize("mode", list(SamplingMode))
    def test_perfect_estimation_collapses(self, mode):
        hop = HopParams(0.0, 5.0, 1.0)
        h_true, h_est, e = sample_hop_arrays(hop, mode, philox(1), 1000)
        assert np.array_equal(h_true, h_est)
        assert np.all(e == 0)

    def test_modes_identical_at_rho_one(self):
        hop = HopParams(1.0, 3.0, 1.0)
        a = sample_hop_arrays(hop, SamplingMode.EST_LOGNORMAL, philox(9), 1000)
        b = sample_hop_arrays(hop, SamplingMode.TRUE_LOGNORMAL, philox(9), 1000)
        for x, y in zip(a, b):
            assert np.array_equal(x, y)

    def test_est_mode_magnitude_squared_moments(self):
        # |h_est|^2 carries the doubled dB parameters: its linear mean matches
        # and its dB exponent has mean 2*mu and std 2*sigma (the linear sample
        # variance of an 8 dB spread is too heavy-tailed to compare directly)
        hop = HopParams(0.0, 4.0, 0.9)
        _, h_est, _ = sample_hop_arrays(hop, SamplingMode.EST_LOGNORMAL, philox(3), 1_000_000)
        h2 = np.abs(h_est) ** 2
        mean, _ = ln.moments(ln.square(ln.LogNormalDB(0.0, 4.0)))
        se_mean = h2.std() / math.sqrt(h2.size)
        assert abs(h2.mean() - mean) <= 3 * se_mean
        h2_db = 10.0 * np.log10(h2)
        n = h2_db.size
        assert abs(h2_db.mean() - 0.0) <= 3 * 8.0 / math.sqrt(n)
        assert abs(h2_db.std() - 8.0) <= 3 * 8.0 / math.sqrt(2 * n)

    def test_true_mode_correlation_matches_construction(self):
        # h_est = (h - e)/rho with independent zero-mean e gives complex
        # correlation sqrt(E|h|^2 / (E|h|^2 + var(e)))
        hop = HopParams(0.0, 4.0, 0.95)
        h_true, h_est, _ = sample_hop_arrays(hop, SamplingMode.TRUE_LOGNORMAL,
                                             philox(21), 1_000_000)
        eh2, _ = ln.moments(ln.square(ln.LogNormalDB(0.0, 4.0)))
        expected = math.sqrt(eh2 / (eh2 + error_variance(hop)))
        num = np.abs(np.mean(h_true * np.conj(h_est)))
        den = math.sqrt(np.mean(np.abs(h_true) ** 2) * np.mean(np.abs(h_est) ** 2))
        assert num / den == pytest.approx(expected, abs=3e-3)

    def test_scalar_wrapper_matches_arrays(self):
        hop = HopParams(0.5, 2.0, 0.9)
        draw = sample_hop(hop, SamplingMode.TRUE_LOGNORMAL, philox(4))
        h_true, h_est, e = sample_hop_arrays(hop, SamplingMode.TRUE_LOGNORMAL, philox(4), 1)
        assert draw.h_true == complex(h_true[0])
        assert draw.h_est == complex(h_est[0])
        assert draw.e == complex(e[0])
        assert draw.h_true == hop.rho * draw.h_est + draw.e

    def test_unknown_mode_rejected(self):
        with pytest.raises(ValueError):
            sample_hop_arrays(HopParams(0, 1), "not-a-mode", philox(0), 4)
