import math

import numpy as np
import pytest

from rotorlab import kepler
from rotorlab.classical_maps import step_map
from rotorlab.errors import DomainError, UsageError
from rotorlab.potentials import wrap_centered


def _make_params(factor=1.0, omega0=2.0, n0=60.0):
    eps0c = 1.0 / (49.0 * omega0 ** (1.0 / 3.0))
    return kepler.MicrowaveParams.from_scaled(factor * eps0c, omega0, n0)


class TestParams:
    def test_scales(self):
        params = _make_params()
        assert params.N0 == pytest.approx(-15.0)
        assert params.T_lin == pytest.approx(6 * math.pi / 15.0)
        assert params.omega0 == pytest.approx(2.0)
        assert params.k * params.T_lin == pytest.approx(1.0, rel=1e-3)

    def test_positive(self):
        with pytest.raises(UsageError):
            kepler.MicrowaveParams(0.1, 0.0, 10.0)


class TestStep:
    def test_single_kick(self):
        params = kepler.MicrowaveParams(0.1 / 2.6, 1.0, 1.0)
        p = kepler.kepler_step(kepler.KeplerPoint(-0.5, math.pi / 2), params)
        assert params.k == pytest.approx(0.1)
        assert p.N == pytest.approx(-0.4)
        assert p.phi == pytest.approx(math.pi / 2 + math.pi / math.sqrt(2.0) * 0.4 ** -1.5)
        assert not p.ionized

    def test_ionization_is_absorbing(self):
        params = kepler.MicrowaveParams(0.1 / 2.6, 1.0, 1.0)
        p = kepler.kepler_step(kepler.KeplerPoint(-0.05, math.pi / 2), params)
        assert p.ionized
        assert p.phi == pytest.approx(math.pi / 2)
        assert kepler.kepler_step(p, params) is p

    def test_linearization(self):
        params = kepler.MicrowaveParams.from_scaled(0.001, 2.0, 60.0)
        linear = kepler.linearized_standard_map(params)
        p = kepler.KeplerPoint(params.N0 + 0.015, 1.0)
        exact = kepler.kepler_step(p, params)
        approx = linear.from_standard(step_map(linear.to_standard(p), linear.potential, drift=linear.drift))
        assert approx.N == pytest.approx(exact.N, abs=1e-12)
        assert abs(wrap_centered(approx.phi - exact.phi)) < 1e-3


class TestIonization:
    def test_no_field(self):
        run = kepler.ionization_probability(_make_params(0.0), 200, 50)
        assert np.all(run.series["fraction"] == 0.0)

    def test_fraction_is_monotone(self):
        run = kepler.ionization_probability(_make_params(3.0), 500, 200, seed=4)
        assert np.all(np.diff(run.series["fraction"]) >= 0.0)
        assert 0.0 <= run.final_fraction <= 1.0

    def test_reproducible(self):
        a = kepler.ionization_probability(_make_params(3.0), 300, 100, seed=9)
        b = kepler.ionization_probability(_make_params(3.0), 300, 100, seed=9)
        assert a.series.equals(b.series)

    def test_empty(self):
        with pytest.raises(UsageError):
            kepler.ionization_probability(_make_params(), 0, 10)

    def test_quantized_map(self):
        quiet = kepler.quantized_ionization_probability(_make_params(0.0), 20)
        assert np.allclose(quiet.series["fraction"], 0.0, atol=1e-12)
        strong = kepler.quantized_ionization_probability(_make_params(5.0), 100)
        assert np.all(np.diff(strong.series["fraction"]) >= -1e-12)
        assert strong.final_fraction > 0.0

    def test_quantized_fraction_bounded(self):
        run = kepler.quantized_ionization_probability(_make_params(3.0), 50, L=64)
        fraction = run.series["fraction"].to_numpy()
        assert fraction[0] == 0.0
        assert np.all((fraction >= -1e-12) & (fraction <= 1.0 + 1e-12))
        assert np.all(np.diff(fraction) >= -1e-12)

    def test_quantized_lattice_reaches_cut(self):
        with pytest.raises(UsageError):
            kepler.quantized_ionization_probability(_make_params(), 5, L=10)


class TestBorders:
    def test_chaos_border(self):
        assert kepler.borders(_make_params(omega0=1.0)).eps0_classical == pytest.approx(1.0 / 49.0)
        assert kepler.borders(_make_params(omega0=8.0)).eps0_classical == pytest.approx(0.0102, abs=1e-4)

    def test_quantum_border(self):
        params = _make_params()
        eps_q = kepler.borders(params).eps_quantum
        at_border = kepler.MicrowaveParams(eps_q, params.omega, params.n0)
        assert at_border.l_phi == pytest.approx(at_border.N_I)
        assert kepler.borders(at_border).ratio == pytest.approx(1.0)

    def test_low_frequency(self):
        with pytest.raises(DomainError):
            kepler.borders(_make_params(omega0=0.5))


class TestThresholdCurve:
    def test_columns(self):
        table = kepler.threshold_curve([2.0], 60.0, 100, 20, factors=[4.0, 8.0])
        assert list(table.columns) == ["omega0", "eps_threshold", "eps0c", "eps_q"]
        assert table["eps0c"].iloc[0] == pytest.approx(1.0 / (49.0 * 2.0 ** (1.0 / 3.0)))

    def test_unreachable(self):
        assert math.isnan(kepler.ionization_threshold(2.0, 60.0, 100, 5, factors=[0.2]))

    def test_quantum_column(self):
        table = kepler.threshold_curve([2.0], 60.0, 100, 20, factors=[4.0, 8.0], quantum=True)
        assert list(table.columns) == ["omega0", "eps_threshold", "eps0c", "eps_q", "eps_threshold_quantum"]
        value = table["eps_threshold_quantum"].iloc[0]
        eps0c = table["eps0c"].iloc[0]
        assert math.isnan(value) or value == pytest.approx(4.0 * eps0c) or value == pytest.approx(8.0 * eps0c)

    def test_quantum_unreachable(self):
        assert math.isnan(kepler.ionization_threshold(2.0, 60.0, 10, 5, factors=[0.0, 0.2], quantum=True))


@pytest.mark.slow
class TestThresholdPhysics:
    def test_strong_field_ionizes(self):
        assert kepler.ionization_probability(_make_params(5.0), 1000, 1000).final_fraction > 0.5

    def test_weak_field_is_confined(self):
        assert kepler.ionization_probability(_make_params(0.2), 1000, 1000).final_fraction < 0.05

    @pytest.mark.parametrize("omega0", [1.5, 2.0, 3.0])
    def test_threshold_near_chaos_border(self, omega0):
        threshold = kepler.ionization_threshold(omega0, 60.0, 1000, 1000)
        eps0c = 1.0 / (49.0 * omega0 ** (1.0 / 3.0))
        assert 0.5 * eps0c <= threshold <= 2.0 * eps0c
