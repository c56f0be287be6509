import math

import numpy as np
import pytest

from uavsim.channel import (ChannelDomainError, ChannelModel, LinkGeometry,
                            SPEED_OF_LIGHT, SnrReference, doppler_shift,
                            free_space_path_loss, sample_rician_gain, snr_at,
                            spectral_efficiency, two_ray_breakpoint_distance,
                            two_ray_path_loss)

F5GHZ = 5e9
# Midpoint slant distance for R=1 km at H=100 m.
MID_SLANT = math.hypot(500.0, 100.0)


def geo(horizontal, tx_height=100.0, rx_height=0.0):
    return LinkGeometry(horizontal, tx_height, rx_height)


def fspl_oracle(d, f):
    # One-line Friis check, independent of the implementation.
    return 20.0 * math.log10(4.0 * math.pi * d * f / 2.998e8)


class TestFreeSpacePathLoss:
    def test_100m_at_5ghz(self):
        loss = free_space_path_loss(LinkGeometry(0.0, 100.0), F5GHZ)
        assert loss == pytest.approx(86.42, abs=0.01)
        assert loss == pytest.approx(fspl_oracle(100.0, F5GHZ), abs=1e-12)

    def test_midpoint_slant(self):
        loss = free_space_path_loss(geo(500.0), F5GHZ)
        assert loss == pytest.approx(100.57, abs=0.01)
        assert loss == pytest.approx(fspl_oracle(MID_SLANT, F5GHZ), abs=1e-12)

    def test_doubling_distance_adds_6db(self):
        l1 = free_space_path_loss(LinkGeometry(0.0, 200.0), F5GHZ)
        l2 = free_space_path_loss(LinkGeometry(0.0, 100.0), F5GHZ)
        assert l1 - l2 == pytest.approx(20.0 * math.log10(2.0), abs=1e-9)

    def test_distance_ratio_identity(self):
        # Loss difference equals 20*log10(d1/d2) at machine precision.
        for d1, d2 in [(123.0, 45.0), (1000.0, 7.0), (5.0, 4999.0)]:
            diff = (free_space_path_loss(LinkGeometry(0.0, d1), F5GHZ)
                    - free_space_path_loss(LinkGeometry(0.0, d2), F5GHZ))
            assert diff == pytest.approx(20.0 * math.log10(d1 / d2),
                                         abs=1e-10)

    def test_monotone_in_distance_and_frequency(self):
        assert (free_space_path_loss(geo(600.0), F5GHZ)
                > free_space_path_loss(geo(500.0), F5GHZ))
        assert (free_space_path_loss(geo(500.0), 6e9)
                > free_space_path_loss(geo(500.0), F5GHZ))

    def test_domain_errors(self):
        with pytest.raises(ChannelDomainError):
            free_space_path_loss(geo(100.0), 0.0)
        with pytest.raises(ChannelDomainError):
            LinkGeometry(100.0, 0.0)
        with pytest.raises(ChannelDomainError):
            # Zero slant distance: equal heights, zero separation.
            free_space_path_loss(LinkGeometry(0.0, 5.0, 5.0), F5GHZ)


class TestTwoRayPathLoss:
    def test_breakpoint_distance(self):
        wavelength = SPEED_OF_LIGHT / F5GHZ
        d_b = two_ray_breakpoint_distance(100.0, 1.5, F5GHZ)
        assert d_b == pytest.approx(4.0 * 100.0 * 1.5 / wavelength, rel=1e-12)
        assert d_b == pytest.approx(10_000.0, rel=1e-2)

    def test_zero_reflection_equals_free_space(self):
        for i in range(100):
            g = LinkGeometry(10.0 + 37.0 * i, 50.0 + i, 1.5)
            assert two_ray_path_loss(g, F5GHZ, 0.0) == pytest.approx(
                free_space_path_loss(g, F5GHZ), abs=1e-9)

    def test_far_field_asymptote(self):
        # Beyond the breakpoint the loss approaches 40log10(d) - 20log10(ht*hr).
        g = LinkGeometry(20_000.0, 100.0, 1.5)
        asymptote = (40.0 * math.log10(20_000.0)
                     - 20.0 * math.log10(100.0 * 1.5))
        assert two_ray_path_loss(g, F5GHZ, -1.0) == pytest.approx(asymptote,
                                                                  abs=1.0)

    def test_perfect_cancellation_returns_inf(self):
        # Receiver on the ground, perfect reflection: both rays identical
        # and opposite, infinite loss rather than an error.
        g = LinkGeometry(1000.0, 100.0, 0.0)
        assert two_ray_path_loss(g, F5GHZ, -1.0) == math.inf


class TestRicianFading:
    def test_pure_los_limit(self):
        rng = np.random.default_rng(1)
        g = sample_rician_gain(300.0, rng, size=1000)
        assert np.all(np.abs(np.abs(g) - 1.0) < 1e-6)

    def test_unit_mean_power_k15(self):
        rng = np.random.default_rng(2)
        g = sample_rician_gain(15.0, rng, size=1_000_000)
        assert 0.995 <= np.mean(np.abs(g) ** 2) <= 1.005

    @pytest.mark.parametrize("k_db", [0.0, 5.0, 15.0, 28.0])
    def test_unit_mean_power_across_k(self, k_db):
        rng = np.random.default_rng(3)
        g = sample_rician_gain(k_db, rng, size=100_000)
        assert np.mean(np.abs(g) ** 2) == pytest.approx(1.0, abs=0.01)

    def test_moment_based_k_estimate(self):
        # Standard moment estimator: with c = Var[P]/E[P]^2 for the power
        # P = |g|^2, K = (1 - c + sqrt(1 - c)) / c.
        rng = np.random.default_rng(4)
        p = np.abs(sample_rician_gain(15.0, rng, size=1_000_000)) ** 2
        c = np.var(p) / np.mean(p) ** 2
        k_est_db = 10.0 * math.log10((1.0 - c + math.sqrt(1.0 - c)) / c)
        assert k_est_db == pytest.approx(15.0, abs=0.5)

    def test_deterministic_given_stream(self):
        a = sample_rician_gain(15.0, np.random.default_rng(9), size=64)
        b = sample_rician_gain(15.0, np.random.default_rng(9), size=64)
        assert np.array_equal(a, b)


class TestSnrAt:
    channel = ChannelModel(carrier_frequency=F5GHZ)
    ref = SnrReference(reference_snr_db=10.0, reference_distance=MID_SLANT)

    def test_reference_distance_is_identity(self):
        assert snr_at(geo(500.0), self.channel, self.ref) == pytest.approx(
            10.0, abs=1e-9)

    def test_overhead_at_100m(self):
        # Inverse-square oracle: 10 dB * (509.90/100)^2 -> linear 260.
        snr = snr_at(LinkGeometry(0.0, 100.0), self.channel, self.ref)
        assert snr == pytest.approx(24.15, abs=0.005)
        assert 10.0 ** (snr / 10.0) == pytest.approx(
            10.0 * (MID_SLANT / 100.0) ** 2, rel=1e-9)

    def test_at_223m(self):
        g = LinkGeometry(math.sqrt(223.61 ** 2 - 100.0 ** 2), 100.0)
        snr = snr_at(g, self.channel, self.ref)
        assert snr == pytest.approx(17.16, abs=0.005)
        assert 10.0 ** (snr / 10.0) == pytest.approx(52.0, abs=0.01)

    def test_antitone_in_distance(self):
        snrs = [snr_at(geo(r), self.channel, self.ref)
                for r in range(0, 5000, 50)]
        assert all(a > b for a, b in zip(snrs, snrs[1:]))

    def test_rician_mean_snr_matches_base(self):
        rician = ChannelModel(carrier_frequency=F5GHZ, variant="rician",
                              k_factor_db=15.0)
        assert snr_at(geo(300.0), rician, self.ref) == pytest.approx(
            snr_at(geo(300.0), self.channel, self.ref), abs=1e-12)


class TestSpectralEfficiency:
    def test_10db(self):
        assert spectral_efficiency(10.0) == pytest.approx(math.log2(11.0),
                                                          abs=1e-12)
        assert spectral_efficiency(10.0) == pytest.approx(3.4594, abs=1e-4)

    def test_zero_snr(self):
        assert spectral_efficiency(-math.inf) == 0.0

    def test_24_15db(self):
        assert spectral_efficiency(24.15) == pytest.approx(8.028, abs=2e-3)

    def test_monotone_and_nonnegative(self):
        values = [spectral_efficiency(s) for s in range(-40, 61, 5)]
        assert all(v >= 0 for v in values)
        assert all(a < b for a, b in zip(values, values[1:]))

    def test_3db_step_below_one_bit(self):
        step = 10.0 * math.log10(2.0)
        for snr in np.linspace(-30.0, 60.0, 200):
            gain = spectral_efficiency(snr) - spectral_efficiency(snr - step)
            assert gain < 1.0
        # Approaches exactly one bit per 3 dB at high SNR.
        assert (spectral_efficiency(40.0) - spectral_efficiency(40.0 - step)
                == pytest.approx(1.0, abs=0.01))


class TestDopplerShift:
    def test_zero_speed(self):
        assert doppler_shift(0.0, F5GHZ) == 0.0

    def test_uav_ground_case(self):
        assert doppler_shift(100.0, F5GHZ) == pytest.approx(1667.8, abs=0.1)

    def test_mmwave_uav_uav_case(self):
        assert doppler_shift(200.0, 60e9) == pytest.approx(40_027.0, abs=1.0)

    def test_negative_speed_rejected(self):
        with pytest.raises(ChannelDomainError):
            doppler_shift(-1.0, F5GHZ)


class TestChannelModelValidation:
    def test_reflection_coefficient_range(self):
        with pytest.raises(ChannelDomainError):
            ChannelModel(carrier_frequency=F5GHZ, variant="two_ray",
                         reflection_coefficient=0.5)

    def test_k_factor_must_be_finite(self):
        with pytest.raises(ChannelDomainError):
            ChannelModel(carrier_frequency=F5GHZ, variant="rician",
                         k_factor_db=math.inf)

    def test_two_ray_variant_path_loss(self):
        model = ChannelModel(carrier_frequency=F5GHZ, variant="two_ray",
                             reflection_coefficient=-1.0)
        g = LinkGeometry(2000.0, 100.0, 1.5)
        assert model.path_loss_db(g) == pytest.approx(
            two_ray_path_loss(g, F5GHZ, -1.0), abs=1e-12)
