import numpy as np
import pytest

from rotorlab import anderson
from rotorlab.errors import DomainError, PoleError, SingularPotentialError, UsageError
from rotorlab.potentials import Cosine


class TestSiteEnergies:
    def test_pole(self):
        with pytest.raises(PoleError):
            anderson.site_energies(2.0, np.pi / 2.0, np.arange(-3, 4))

    def test_values(self):
        W = anderson.site_energies(2.0, 0.3, np.array([0, 1]))
        assert W == pytest.approx(np.tan([0.3, 0.3 - 0.5]))

    def test_rational_period(self):
        assert anderson.is_rational_period(4 * np.pi / 3) == 3
        assert anderson.is_rational_period(2.0) is None


class TestHoppings:
    def test_weak_cosine(self):
        table = anderson.hoppings(Cosine(0.1))
        assert table[1].real == pytest.approx(-0.025, abs=1e-4)
        assert table[-1] == pytest.approx(table[1])
        assert abs(table[0]) < 1e-14
        assert abs(table[2]) < 1e-12
        assert table.l_max == 16

    def test_frame(self):
        frame = anderson.hoppings(Cosine(1.0), l_max=4).to_frame()
        assert frame["l"].tolist() == list(range(-4, 5))

    def test_singular(self):
        with pytest.raises(SingularPotentialError):
            anderson.hoppings(Cosine(3.5))

    def test_quadrature(self):
        with pytest.raises(UsageError):
            anderson.hoppings(Cosine(1.0), l_max=64, quadrature_points=100)

    def test_complex_potential(self):
        with pytest.raises(DomainError):
            anderson.hoppings(Cosine(1.0, gain=0.1))


class TestChain:
    def test_matrix_is_symmetric(self):
        chain = anderson.build_chain(Cosine(2.0), 2.0, n_range=(-30, 30), l_max=8)
        H = anderson.chain_matrix(chain)
        assert H.shape == (61, 61)
        assert np.allclose(H, H.T.conj())
        assert np.diag(H) == pytest.approx(chain.W)

    def test_energy(self):
        chain = anderson.build_chain(Cosine(2.0), 2.0, n_range=(-5, 5))
        assert chain.E == pytest.approx(-chain.hoppings[0].real)

    def test_localized_eigenvectors(self):
        chain = anderson.build_chain(Cosine(2.0), 2.0, n_range=(-200, 200))
        result = anderson.tb_localization_length(chain)
        assert 0.0 < result.length < 20.0
        assert result.method == "eigvec_decay"

    def test_mirror_pairs_stay_localized(self):
        chain = anderson.build_chain(Cosine(3.0), 2.0, n_range=(-300, 300))
        result = anderson.tb_localization_length(chain)
        assert 0.0 < result.length < 20.0
        assert result.r_squared > 0.5

    def test_unknown_method(self):
        chain = anderson.build_chain(Cosine(2.0), 2.0, n_range=(-20, 20))
        with pytest.raises(UsageError):
            anderson.tb_localization_length(chain, method="kpm")
