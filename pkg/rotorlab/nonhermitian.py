"""PT-symmetric kicked rotor: spectra, PT threshold and ratchet transport.

The kick k(cosθ + iγ sinθ) equals K₀cos(θ − iη) with K₀ = k√(1−γ²) and
tanh η = γ, so its momentum harmonics are (−i)^l J_l(K₀) e^{lη}. The Floquet
matrix is built on the same periodic θ grid the engine uses, which keeps the
γ = 0 operator exactly unitary.
"""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
import pandas as pd
from scipy import linalg, special, stats

from rotorlab.diagnostics import decay_window, fit_exponential_decay
from rotorlab.errors import DomainError, ExtendedStateError, NoRatchetError, TruncationError, UsageError
from rotorlab.potentials import Cosine
from rotorlab.quantum_engine import FloquetSpec, Propagator, evolve, free_phases, init_state

logger = logging.getLogger(__name__)

REALITY_TOLERANCE = 1e-8
BREAKING_THRESHOLD = 1e-6
BOUNDARY_SHIFT = 64
BOUNDARY_TOLERANCE = 1e-6
EDGE_WEIGHT = 1e-10
RATCHET_R2 = 0.95
BISECTION_STEPS = 30


@dataclass(frozen=True)
class NHSpectrum:
    eigenvalues: np.ndarray
    interior: np.ndarray
    L: int
    gamma: float
    k: float
    T: float

    @property
    def re_eps(self):
        return np.angle(self.eigenvalues)

    @property
    def log_abs(self):
        return np.log(np.abs(self.eigenvalues))

    @property
    def extended(self):
        return not bool(self.interior.any())

    @property
    def max_log(self):
        return float(self.log_abs.max())

    @property
    def max_abs_log(self):
        return float(np.abs(self.log_abs).max())

    @property
    def mean_abs_log(self):
        """Mean of |ln|λ|| over all states."""
        return float(np.mean(np.abs(self.log_abs)))

    @property
    def mean_positive_log(self):
        """Mean of max(ln|λ|, 0), the gain carried by the growing states."""
        return float(np.mean(np.clip(self.log_abs, 0.0, None)))

    @property
    def is_real(self):
        return self.max_abs_log <= REALITY_TOLERANCE

    def pt_paired(self, tolerance=1e-6):
        """ln|λ| values come in (x, −x) pairs."""
        values = np.sort(self.log_abs)
        return bool(np.allclose(values, -values[::-1], atol=tolerance))

    def to_frame(self):
        return pd.DataFrame({"re_eps": self.re_eps, "log_abs_lambda": self.log_abs, "interior": self.interior})


@dataclass(frozen=True)
class PTThreshold:
    gamma_pt: Optional[float]
    interval: tuple
    xi: float
    theory: float
    crossed: bool

    @property
    def ratio(self):
        if self.gamma_pt is None or self.theory == 0.0:
            return math.nan
        return self.gamma_pt / self.theory


@dataclass(frozen=True)
class RatchetFit:
    velocity: float
    r_squared: float
    window: tuple
    series: pd.DataFrame


def _check_gamma(gamma):
    if not abs(gamma) < 1.0:
        raise DomainError(f"gain must satisfy |gamma| < 1, got {gamma}", gamma=gamma)


def kick_harmonics(k, gamma, l):
    """Closed-form harmonic of e^{−ik(cosθ + iγ sinθ)} at e^{ilθ}."""
    _check_gamma(gamma)
    l = np.asarray(l)
    K0 = k * math.sqrt(1.0 - gamma ** 2)
    eta = math.atanh(gamma)
    return (-1j) ** l * special.jv(l, K0) * np.exp(l * eta)


def kick_matrix(k, gamma, L):
    """⟨m|e^{−iV}|n⟩ on m, n ∈ [−L, L] with the periodic θ grid of the engine."""
    _check_gamma(gamma)
    propagator = Propagator(FloquetSpec(T=0.0, potential=Cosine(k, gain=gamma)), L)
    return propagator.kick(np.eye(2 * L + 1, dtype=complex), 0).T


def floquet_matrix(k, T, gamma, L):
    m = np.arange(-L, L + 1)
    return free_phases(T, m)[:, None] * kick_matrix(k, gamma, L)


def _edge_weights(vectors, L):
    width = max(4, (2 * L + 1) // 8)
    weights = np.abs(vectors) ** 2
    weights /= weights.sum(axis=0)
    return weights[:width].sum(axis=0) + weights[-width:].sum(axis=0)


def _ordered(values, *others):
    order = np.lexsort((np.log(np.abs(values)), np.angle(values)))
    return (values[order],) + tuple(o[..., order] for o in others)


def _diagonalize(k, T, gamma, L):
    values, vectors = linalg.eig(floquet_matrix(k, T, gamma, L))
    values, vectors = _ordered(values, vectors)
    return values, vectors, _edge_weights(vectors, L) < EDGE_WEIGHT


def nh_floquet_spectrum(k, T, gamma, L, check_boundary=True):
    """Dense spectrum of the truncated operator with an L → L+64 stability test.

    Only interior states (edge weight below 1e-10) are held to the stability
    test; extended spectra pass through for the reality test to judge.
    """
    _check_gamma(gamma)
    if L < 8:
        raise UsageError(f"L must be >= 8, got {L}", L=L)
    values, _, interior = _diagonalize(k, T, gamma, L)
    spectrum = NHSpectrum(values, interior, L, gamma, k, T)
    if check_boundary and interior.any():
        wider = linalg.eigvals(floquet_matrix(k, T, gamma, L + BOUNDARY_SHIFT))
        shift = np.abs(values[interior][:, None] - wider[None, :]).min(axis=1)
        if shift.max() > BOUNDARY_TOLERANCE:
            raise TruncationError(f"interior eigenvalues move by {shift.max():.3g} when L grows by {BOUNDARY_SHIFT}",
                                  L=L, shift=float(shift.max()))
    if not spectrum.is_real:
        logger.info("k=%g T=%g gamma=%g: max |ln|lambda|| = %.3g", k, T, gamma, spectrum.max_abs_log)
    return spectrum


def localization_xi(k, T, L):
    """Median amplitude decay length of the interior γ = 0 eigenvectors."""
    _, vectors, interior = _diagonalize(k, T, 0.0, L)
    if not interior.any():
        raise ExtendedStateError("no eigenvector of the gamma=0 operator is localized in the bulk", k=k, T=T)
    lengths = []
    for j in np.flatnonzero(interior):
        u = vectors[:, j]
        center = int(np.argmax(np.abs(u)))
        lo, hi = decay_window(u, center)
        lengths.append(fit_exponential_decay(u[lo:hi], center - lo).length)
    return float(np.median(lengths))


def _broken(k, T, gamma, L):
    return nh_floquet_spectrum(k, T, gamma, L, check_boundary=False).max_log > BREAKING_THRESHOLD


def pt_threshold(k, T, L, gamma_grid):
    """Smallest γ whose spectrum has max ln|λ| > 1e-6, refined by bisection.

    Without a crossing on the grid the open interval (max γ, None) is returned.
    """
    grid = np.sort(np.asarray(gamma_grid, dtype=float))
    if grid.size == 0:
        raise UsageError("gamma grid is empty")
    try:
        xi = localization_xi(k, T, L)
        theory = math.tanh(1.0 / xi)
    except ExtendedStateError:
        xi, theory = math.inf, 0.0

    lower = 0.0
    for gamma in grid:
        if _broken(k, T, gamma, L):
            upper = float(gamma)
            break
        lower = float(gamma)
    else:
        return PTThreshold(None, (float(grid[-1]), None), xi, theory, False)

    for _ in range(BISECTION_STEPS):
        middle = 0.5 * (lower + upper)
        if _broken(k, T, middle, L):
            upper = middle
        else:
            lower = middle
    return PTThreshold(upper, (lower, upper), xi, theory, True)


def ratchet_velocity(k, T, gamma, steps, L, workers=None):
    """Slope of the normalized ⟨I(t)⟩ over the last half of ``steps``."""
    _check_gamma(gamma)
    spec = FloquetSpec(T=T, potential=Cosine(k, gain=gamma))
    run = evolve(init_state(L), spec, steps, workers=workers)
    series = run.series
    t = series["t"].to_numpy(dtype=float)
    tail = t >= 0.5 * steps
    fit = stats.linregress(t[tail], series["meanI"].to_numpy()[tail])
    r_squared = float(fit.rvalue ** 2)
    window = (float(t[tail][0]), float(t[-1]))
    if r_squared < RATCHET_R2 or abs(fit.slope) * (window[1] - window[0]) < 1.0:
        raise NoRatchetError(f"no directed transport (v={fit.slope:.3g}, R^2={r_squared:.3f})",
                             T=T, velocity=float(fit.slope), r_squared=r_squared)
    return RatchetFit(float(fit.slope), r_squared, window, series)


def norm_growth_rate(series, window=None):
    """d ln‖ψ‖²/dt from the ``log_norm`` column, over the last half by default."""
    t = series["t"].to_numpy(dtype=float)
    if window is None:
        window = (0.5 * t[-1], t[-1])
    mask = (t >= window[0]) & (t <= window[1])
    if mask.sum() < 3:
        raise UsageError("growth window holds fewer than 3 samples", window=window)
    return float(stats.linregress(t[mask], series["log_norm"].to_numpy()[mask]).slope)
