import math

import numpy as np
import pytest

from rotorlab import nonhermitian as nh
from rotorlab.errors import DomainError, NoRatchetError, UsageError
from rotorlab.potentials import Cosine
from rotorlab.quantum_engine import FloquetSpec, evolve, init_state

RESONANCE = 4 * np.pi


class TestKick:
    def test_matrix_matches_closed_form(self):
        k, gamma, L = 3.0, 0.2, 64
        column = nh.kick_matrix(k, gamma, L)[:, L]
        l = np.arange(-10, 11)
        assert np.allclose(column[L + l], nh.kick_harmonics(k, gamma, l), atol=1e-12)

    def test_harmonic_ratio(self):
        gamma = 0.2
        ratio = abs(nh.kick_harmonics(3.0, gamma, 1) / nh.kick_harmonics(3.0, gamma, -1))
        assert ratio == pytest.approx((1 + gamma) / (1 - gamma))

    def test_hermitian_kick_is_unitary(self):
        K = nh.kick_matrix(2.5, 0.0, 16)
        assert np.allclose(K @ K.conj().T, np.eye(33), atol=1e-12)

    def test_gain_range(self):
        with pytest.raises(DomainError):
            nh.kick_harmonics(1.0, 1.0, 0)


class TestSpectrum:
    def test_unitary_limit(self):
        spectrum = nh.nh_floquet_spectrum(3.0, 1.4, 0.0, 64)
        assert spectrum.max_abs_log <= 1e-10
        assert spectrum.is_real

    def test_real_below_threshold(self):
        spectrum = nh.nh_floquet_spectrum(3.0, 1.4, 0.01, 128)
        assert spectrum.mean_abs_log < 1e-8
        assert not spectrum.extended

    def test_similar_to_hermitian_rotor(self):
        gamma, L = 0.01, 256
        values = nh.nh_floquet_spectrum(3.0, 1.4, gamma, L, check_boundary=False).eigenvalues
        hermitian = np.linalg.eigvals(nh.floquet_matrix(3.0 * math.sqrt(1 - gamma ** 2), 1.4, 0.0, L))
        assert np.abs(values[:, None] - hermitian[None, :]).min(axis=1).max() < 1e-6

    def test_resonant_rates(self):
        k, gamma, L = 3.0, 0.1, 32
        spectrum = nh.nh_floquet_spectrum(k, RESONANCE, gamma, L)
        theta = 2 * np.pi * np.arange(2 * L + 1) / (2 * L + 1)
        assert np.sort(spectrum.log_abs) == pytest.approx(np.sort(k * gamma * np.sin(theta)), abs=1e-9)
        assert spectrum.extended
        assert spectrum.pt_paired()
        assert not spectrum.is_real

    def test_frame(self):
        frame = nh.nh_floquet_spectrum(2.0, 1.4, 0.0, 16).to_frame()
        assert list(frame.columns) == ["re_eps", "log_abs_lambda", "interior"]
        assert len(frame) == 33

    def test_small_lattice(self):
        with pytest.raises(UsageError):
            nh.nh_floquet_spectrum(1.0, 1.0, 0.0, 4)


class TestThreshold:
    def test_resonance_breaks_immediately(self):
        result = nh.pt_threshold(3.0, RESONANCE, 32, [1e-4, 1e-3])
        assert result.crossed
        assert 0.0 < result.gamma_pt <= 1e-4
        assert result.interval[0] < result.gamma_pt
        assert math.isnan(result.ratio)

    def test_open_interval_below_threshold(self):
        result = nh.pt_threshold(3.0, 1.4, 64, [0.002, 0.001])
        assert not result.crossed
        assert result.gamma_pt is None
        assert result.interval == (0.002, None)
        assert 0.0 < result.xi < 20.0

    def test_empty_grid(self):
        with pytest.raises(UsageError):
            nh.pt_threshold(3.0, 1.4, 16, [])


class TestDynamics:
    def test_norm_growth_at_resonance(self):
        k, gamma, L = 3.0, 0.1, 64
        spec = FloquetSpec(RESONANCE, Cosine(k, gain=gamma))
        run = evolve(init_state(L), spec, 200)
        rate = nh.norm_growth_rate(run.series)
        expected = 2.0 * nh.nh_floquet_spectrum(k, RESONANCE, gamma, L).max_log
        assert rate == pytest.approx(expected, rel=0.05)

    def test_growth_window(self):
        run = evolve(init_state(16), FloquetSpec(1.0, Cosine(1.0)), 2)
        with pytest.raises(UsageError):
            nh.norm_growth_rate(run.series, (5, 10))

    def test_no_ratchet_off_resonance(self):
        with pytest.raises(NoRatchetError):
            nh.ratchet_velocity(3.0, 1.0, 1.0 / 30.0, 400, 512)


@pytest.mark.slow
def test_ratchet_current_at_resonance():
    fit = nh.ratchet_velocity(3.0, np.pi / 3.0, 1.0 / 30.0, 200, 2048)
    assert fit.r_squared >= 0.95
    assert abs(fit.velocity) * (fit.window[1] - fit.window[0]) >= 1.0


@pytest.mark.slow
def test_threshold_tracks_localization_length():
    result = nh.pt_threshold(3.0, 1.4, 64, np.linspace(0.01, 0.95, 95))
    assert result.crossed
    assert 1.0 / 3.0 <= result.ratio <= 3.0
    assert result.interval[0] < result.gamma_pt
