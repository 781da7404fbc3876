import numpy as np
import pytest
from hypothesis import given, strategies as st

from rotorlab.errors import DomainError, UsageError
from rotorlab.potentials import (TWO_PI, Cosine, LogPotential, PiecewiseLinear, PowerLaw, Sawtooth,
                                 make_potential, wrap_centered)

angles = st.floats(min_value=-20.0, max_value=20.0, allow_nan=False)


class TestWrapping:
    @given(angles)
    def test_wrap_centered_range(self, theta):
        w = wrap_centered(theta)
        assert -np.pi - 1e-12 < w <= np.pi + 1e-12
        assert np.isclose(np.cos(w), np.cos(theta), atol=1e-9)


class TestCosine:
    def test_force_is_minus_derivative(self):
        pot = Cosine(2.5)
        theta = np.linspace(0.1, 6.0, 40)
        h = 1e-6
        numeric = -(pot.value(theta + h) - pot.value(theta - h)) / (2 * h)
        assert np.allclose(pot.force(theta), numeric, atol=1e-6)

    def test_gain_makes_value_complex(self):
        pot = Cosine(3.0, gain=0.2)
        value = pot.value(np.pi / 2)
        assert value.imag == pytest.approx(0.6)
        assert not pot.is_hermitian

    def test_gain_outside_unit_disc(self):
        with pytest.raises(DomainError):
            Cosine(1.0, gain=1.0)


class TestSawtooth:
    def test_linear_force(self):
        pot = Sawtooth(0.7)
        assert pot.force(np.pi + 0.5) == pytest.approx(0.35)
        assert pot.force_derivative(np.array([0.3]))[0] == pytest.approx(0.7)


class TestSingular:
    def test_power_law_alpha_range(self):
        with pytest.raises(DomainError):
            PowerLaw(1.0, 1.5)

    def test_log_is_finite_at_origin(self):
        assert np.isfinite(LogPotential(1.0).value(0.0))
        assert np.isfinite(PowerLaw(1.0, -0.5).force(0.0))

    @given(angles)
    def test_power_law_is_even(self, theta):
        pot = PowerLaw(1.3, 0.5)
        assert pot.value(theta) == pytest.approx(pot.value(-theta), rel=1e-9, abs=1e-9)


class TestPiecewiseLinear:
    @given(st.floats(min_value=-3.0, max_value=3.0))
    def test_antiperiodic(self, theta):
        pot = PiecewiseLinear(2.0)
        assert pot.value(theta + np.pi) == pytest.approx(-pot.value(theta), abs=1e-9)


class TestRegistry:
    def test_make_potential(self):
        pot = make_potential("power_law", K=1.0, alpha=0.5)
        assert isinstance(pot, PowerLaw)
        assert pot.to_dict() == {"kind": "power_law", "K": 1.0, "alpha": 0.5}

    def test_unknown_kind(self):
        with pytest.raises(UsageError):
            make_potential("square", k=1.0)


def test_two_pi():
    assert TWO_PI == pytest.approx(2 * np.pi)
