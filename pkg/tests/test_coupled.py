import math

import numpy as np
import pandas as pd
import pytest

from rotorlab import coupled
from rotorlab.errors import DomainError, FitError, SpillWarning, StateError, UsageError
from rotorlab.potentials import TWO_PI, Cosine
from rotorlab.quantum_engine import FloquetSpec, evolve, init_state


def _dense_step(spec, L):
    """Explicit (N²×N²) one-period matrix on the row-major (m1, m2) basis."""
    n = 2 * L + 1
    m = np.arange(-L, L + 1)
    theta = TWO_PI * np.arange(n) / n
    F = np.exp(1j * np.outer(theta, m))
    F2 = np.kron(F, F)
    t1, t2 = np.meshgrid(theta, theta, indexing="ij")
    phase = spec.K1 * np.cos(t1) + spec.K2 * np.cos(t2) + spec.xi * np.cos(t1 - t2)
    kick = np.exp(-1j * phase).ravel()
    free = np.exp(-0.5j * spec.T * m ** 2)
    free2 = np.kron(free, free)
    return free2[:, None] * (F2.conj().T * kick[None, :]) @ F2 / n ** 2


class TestState:
    def test_shape(self):
        with pytest.raises(UsageError):
            coupled.TwoRotorState(2, 2, np.zeros((5, 4)))

    def test_product_has_one_schmidt_value(self):
        state = coupled.TwoRotorState.delta(4, 6, 1, -2)
        assert state.amplitudes.shape == (9, 13)
        assert state.schmidt_values()[0] == pytest.approx(1.0)
        assert state.norm == pytest.approx(1.0)

    def test_negative_coupling(self):
        with pytest.raises(DomainError):
            coupled.CoupledSpec(1.0, 1.0, xi=-0.1)


class TestPropagation:
    def test_uncoupled_rotors_match_single_rotor(self):
        spec = coupled.CoupledSpec(2.0, 3.0, 0.0, 1.0)
        run = coupled.evolve_coupled(coupled.TwoRotorState.delta(32, 32), spec, 10)
        first = evolve(init_state(32), FloquetSpec(1.0, Cosine(2.0)), 10)
        second = evolve(init_state(32), FloquetSpec(1.0, Cosine(3.0)), 10)
        assert np.allclose(run.series["E1"], first.series["energy"], atol=1e-12)
        assert np.allclose(run.series["E2"], second.series["energy"], atol=1e-12)
        assert np.allclose(run.series["SvN"], 0.0, atol=1e-12)
        assert np.allclose(run.series["Slin"], 0.0, atol=1e-12)

    def test_dense_oracle(self):
        L = 8
        spec = coupled.CoupledSpec(1.2, 0.7, 0.4, 0.9)
        rng = np.random.default_rng(2)
        A = rng.normal(size=(17, 17)) + 1j * rng.normal(size=(17, 17))
        state = coupled.TwoRotorState(L, L, A / np.linalg.norm(A))
        U = _dense_step(spec, L)
        stepped = coupled.coupled_step(state, spec)
        assert np.allclose(stepped.amplitudes.ravel(), U @ state.amplitudes.ravel(), atol=1e-12)

    def test_norm_preserved(self):
        spec = coupled.CoupledSpec(3.0, 4.0, 0.5)
        run = coupled.evolve_coupled(coupled.TwoRotorState.delta(64, 64), spec, 30)
        assert np.allclose(run.series["norm"], 1.0, atol=1e-10)
        assert run.series["SvN"].iloc[-1] > 0.0

    def test_backward_inverts_forward(self):
        spec = coupled.CoupledSpec(1.0, 2.0, 0.3)
        propagator = coupled.CoupledPropagator(spec, 10, 12)
        A = coupled.TwoRotorState.delta(10, 12, 2, -1).amplitudes
        assert np.allclose(propagator.backward(propagator.forward(A)), A, atol=1e-12)

    def test_step_reports_spill_time(self):
        spec = coupled.CoupledSpec(5.0, 5.0, 1.0)
        with pytest.warns(SpillWarning, match="at t=7;"):
            stepped = coupled.coupled_step(coupled.TwoRotorState.delta(4, 4), spec, t=6)
        assert stepped.spilled


class TestReducedState:
    def test_matches_schmidt_spectrum(self):
        spec = coupled.CoupledSpec(2.0, 2.5, 1.0)
        state = coupled.evolve_coupled(coupled.TwoRotorState.delta(16, 16), spec, 5).final
        rho = coupled.reduced_density_matrix(state, keep=2)
        assert rho.trace == pytest.approx(1.0)
        assert np.allclose(rho.eigenvalues[:5], state.schmidt_values()[:5], atol=1e-12)
        measures = coupled.entanglement_measures(rho)
        assert 1.0 <= measures.N_eff <= 33.0

    def test_bad_keep(self):
        with pytest.raises(UsageError):
            coupled.reduced_density_matrix(coupled.TwoRotorState.delta(2, 2), keep=3)

    def test_maximally_mixed_qubit(self):
        measures = coupled.entanglement_measures(np.eye(2) / 2.0)
        assert measures.S_vN == pytest.approx(math.log(2.0))
        assert measures.S_lin == pytest.approx(0.5)
        assert measures.N_eff == pytest.approx(2.0)

    def test_trace(self):
        with pytest.raises(StateError):
            coupled.entanglement_measures(np.eye(2))

    def test_saturation_bound(self):
        assert coupled.saturation_bound(coupled.TwoRotorState.delta(3, 8)) == pytest.approx(math.log(7))


class TestPerturbation:
    def test_linear_entropy_follows_correlator(self):
        xi, steps = 0.003, 20
        spec = coupled.CoupledSpec(0.8, 1.1, xi, 1.0)
        state = coupled.TwoRotorState.delta(64, 64)
        C = coupled.interaction_correlator(state, spec, steps)
        predicted = coupled.perturbative_linear_entropy(C, xi)
        exact = coupled.evolve_coupled(state, spec, steps).series["Slin"].to_numpy()
        assert C.shape == (steps, steps)
        assert predicted[0] == 0.0
        assert np.allclose(predicted[5:], exact[5:], rtol=0.1)

    def test_needs_product_state(self):
        spec = coupled.CoupledSpec(1.0, 1.0, 1.0)
        entangled = coupled.evolve_coupled(coupled.TwoRotorState.delta(8, 8), spec, 3).final
        with pytest.raises(UsageError):
            coupled.interaction_correlator(entangled, spec, 4)


class TestFits:
    def test_synthetic_growth(self):
        t = np.arange(1, 401, dtype=float)
        series = pd.DataFrame({"t": t, "Slin": 1.0 - t ** -0.5, "SvN": 1.0 + 0.3 * np.log(t)})
        fits = coupled.entanglement_growth_fits(series)
        assert fits.svn_log_slope == pytest.approx(0.3)
        assert fits.deficit_exponent == pytest.approx(-0.5)
        assert fits.early_slope > 0.0
        assert fits.late_window == (100.0, 400.0)

    def test_saturated(self):
        t = np.arange(1, 101, dtype=float)
        series = pd.DataFrame({"t": t, "Slin": np.ones(t.size), "SvN": np.ones(t.size)})
        with pytest.raises(FitError):
            coupled.entanglement_growth_fits(series)


@pytest.mark.slow
def test_early_growth_scales_with_coupling_squared():
    slopes = []
    for xi in (0.005, 0.01):
        spec = coupled.CoupledSpec(9.0, 10.0, xi, 1.0)
        run = coupled.evolve_coupled(coupled.TwoRotorState.delta(256, 256), spec, 40)
        slopes.append(coupled.entanglement_growth_fits(run.series, late_start=20).early_slope)
    assert slopes[1] / slopes[0] == pytest.approx(4.0, abs=0.6)
