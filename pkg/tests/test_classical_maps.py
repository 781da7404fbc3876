import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from rotorlab import classical_maps as cm
from rotorlab.errors import DomainError, UsageError
from rotorlab.potentials import TWO_PI, Cosine, Sawtooth


def _standard_step(K):
    pot = Cosine(K)

    def step(theta, J):
        p = cm.step_map(cm.PhasePoint(theta, J), pot)
        return p.theta, p.J

    return step


class TestStepMap:
    def test_single_step(self):
        p = cm.step_map(cm.PhasePoint(np.pi / 2, 0.0), Cosine(1.0))
        assert p.J == pytest.approx(1.0)
        assert p.theta == pytest.approx(np.pi / 2 + 1.0)

    @given(st.floats(0.0, TWO_PI, exclude_max=True), st.floats(-5.0, 5.0), st.floats(0.1, 8.0))
    @settings(max_examples=50)
    def test_inverse(self, theta, J, K):
        pot = Cosine(K)
        back = cm.inverse_step(cm.step_map(cm.PhasePoint(theta, J), pot), pot)
        assert np.cos(back.theta - theta) == pytest.approx(1.0, abs=1e-9)
        assert back.J == pytest.approx(J, abs=1e-9)

    @pytest.mark.parametrize("K", [0.5, 2.0, 7.0])
    def test_area_preserving(self, K):
        jac = cm.numerical_jacobian(_standard_step(K), 1.1, 0.4)
        assert np.linalg.det(jac) == pytest.approx(1.0, abs=1e-6)

    def test_complex_potential_rejected(self):
        with pytest.raises(DomainError):
            cm.step_map(cm.PhasePoint(0.0, 0.0), Cosine(1.0, gain=0.1))

    def test_torus_wraps_momentum(self):
        p = cm.step_map(cm.PhasePoint(np.pi / 2, 3.0), Cosine(1.0), geometry=cm.Geometry.torus(1))
        assert -np.pi <= p.J < np.pi
        assert p.J == pytest.approx(4.0 - TWO_PI)

    def test_bad_torus(self):
        with pytest.raises(UsageError):
            cm.Geometry.torus(0)


class TestEnsemble:
    def test_uniform_angles_reproducible(self):
        a = cm.Ensemble.uniform_angles(100, seed=5)
        b = cm.Ensemble.uniform_angles(100, seed=5)
        assert np.array_equal(a.theta, b.theta)
        assert len(a) == 100

    def test_free_rotor_keeps_momentum(self):
        run = cm.evolve_ensemble(cm.Ensemble.uniform_angles(200, J0=1.0), Cosine(0.0), 20)
        assert np.allclose(run.series["meanJ"], 1.0)
        assert np.allclose(run.series["varJ"], 0.0)

    def test_snapshots(self):
        run = cm.evolve_ensemble(cm.Ensemble.uniform_angles(10), Cosine(1.0), 6, snapshot_every=3)
        assert sorted(run.snapshots) == [0, 3, 6]
        assert run.snapshots[3].shape == (10, 2)

    def test_empty_ensemble(self):
        with pytest.raises(UsageError):
            cm.evolve_ensemble(cm.Ensemble([], []), Cosine(1.0), 5)


class TestDiffusion:
    def test_matches_correlated_estimate(self):
        K = 30.0
        run = cm.evolve_ensemble(cm.Ensemble.uniform_angles(2000, seed=1), Cosine(K), 300)
        fit = cm.diffusion_coefficient(run.series, (60, 300))
        assert fit.D == pytest.approx(cm.rechester_white_estimate(K), rel=0.25)
        assert fit.r_squared > 0.9

    def test_short_window(self):
        run = cm.evolve_ensemble(cm.Ensemble.uniform_angles(50), Cosine(5.0), 30)
        with pytest.raises(UsageError):
            cm.diffusion_coefficient(run.series)

    def test_lyapunov_strong_chaos(self):
        estimate = cm.max_lyapunov(Cosine(10.0), cm.PhasePoint(1.0, 0.3))
        assert estimate.value == pytest.approx(np.log(5.0), abs=0.15)
        assert not estimate.regular


class TestPoincare:
    def test_kam_curves_bound_momentum(self):
        seeds = [cm.PhasePoint(0.5, TWO_PI * (j + 0.5) / 8) for j in range(8)]
        cloud = cm.poincare_section(Cosine(0.5), seeds, 400)
        assert len(cloud.frame) == 8 * 400
        assert cloud.excursion.max() < TWO_PI

    def test_sawtooth_section(self):
        cloud = cm.poincare_section(Sawtooth(0.3), [cm.PhasePoint(1.0, 1.0)], 50)
        assert set(cloud.frame.columns) == {"seed_id", "theta", "J"}
