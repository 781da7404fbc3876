"""Tight-binding chain equivalent of the kicked rotor's Floquet eigenproblem.

For quasienergy ε the Floquet eigenvector maps onto
    W_n u_n + Σ_{l≠0} t_l u_{n+l} = E u_n,   E = −t₀,
with W_n = tan(½(εT − ½n²T)) and t_l the Fourier coefficients of −tan(V(θ)/2).
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from scipy import linalg

from rotorlab.diagnostics import decay_window, fit_exponential_decay
from rotorlab.errors import DomainError, ExtendedStateError, PoleError, SingularPotentialError, UsageError

logger = logging.getLogger(__name__)

POLE_GUARD = 1e-8
EIGENVECTOR_CONVENTION = "amplitude: |u_n| ~ exp(-|n - n0| / length)"


@dataclass(frozen=True)
class HoppingTable:
    l: np.ndarray
    t: np.ndarray
    truncated_weight: float

    def __getitem__(self, l):
        return self.t[int(l) + (self.l.size - 1) // 2]

    @property
    def l_max(self):
        return (self.l.size - 1) // 2

    def to_frame(self):
        return pd.DataFrame({"l": self.l, "re_t_l": self.t.real, "im_t_l": self.t.imag})


@dataclass(frozen=True)
class TightBindingChain:
    n: np.ndarray
    W: np.ndarray
    hoppings: HoppingTable
    T: float
    eps: float

    @property
    def E(self):
        return float(-self.hoppings[0].real)

    def to_frame(self):
        return pd.DataFrame({"n": self.n, "W_n": self.W})


@dataclass(frozen=True)
class TBLocalization:
    length: float
    r_squared: float
    method: str
    energy: float
    truncation_error: float
    convention: str = EIGENVECTOR_CONVENTION


def site_energies(T, eps, n):
    n = np.asarray(n)
    phase = 0.5 * (eps * T - 0.5 * n.astype(float) ** 2 * T)
    offset = np.mod(phase - 0.5 * np.pi, np.pi)
    distance = np.minimum(offset, np.pi - offset)
    if np.any(distance < POLE_GUARD):
        bad = int(n[np.argmin(distance)])
        raise PoleError(f"site n={bad} sits on a pole of tan", n=bad)
    return np.tan(phase)


def is_rational_period(T, max_q=64, tolerance=1e-10):
    """Smallest q ≤ max_q with T/4π = p/q, else None."""
    x = T / (4.0 * np.pi)
    for q in range(1, max_q + 1):
        if abs(x * q - round(x * q)) < tolerance:
            return q
    return None


def hoppings(pot, l_max=None, quadrature_points=None):
    """t_l = −(1/2π)∫ e^{ilθ} tan(V/2) dθ by the trapezoid rule on a uniform grid."""
    if not pot.is_hermitian:
        raise DomainError("hoppings need a real potential", potential=pot.kind)
    if l_max is None:
        l_max = max(int(math.ceil(4.0 * pot.amplitude)), 16)
    if quadrature_points is None:
        quadrature_points = max(8 * l_max, 1024)
    if quadrature_points < 8 * l_max:
        raise UsageError("quadrature_points must be >= 8 * l_max",
                         quadrature_points=quadrature_points, l_max=l_max)

    theta = 2.0 * np.pi * np.arange(quadrature_points) / quadrature_points
    V = pot.value(theta)
    if np.max(np.abs(V)) >= np.pi:
        raise SingularPotentialError(f"max |V| = {np.max(np.abs(V)):.4g} reaches pi; tan(V/2) is singular",
                                     potential=pot.kind)
    coefficients = -np.fft.ifft(np.tan(0.5 * V))
    l = np.arange(-l_max, l_max + 1)
    t = coefficients[np.mod(l, quadrature_points)]
    resolved = np.arange(-(quadrature_points // 2) + 1, quadrature_points // 2)
    tail = resolved[np.abs(resolved) > l_max]
    truncated = float(np.sum(np.abs(coefficients[np.mod(tail, quadrature_points)]) ** 2))
    if truncated > 1e-8:
        logger.warning("hopping truncation at l_max=%d drops weight %.3g", l_max, truncated)
    return HoppingTable(l, t, truncated)


def build_chain(pot, T, eps=0.0, n_range=(-200, 200), l_max=None):
    n = np.arange(n_range[0], n_range[1] + 1)
    return TightBindingChain(n, site_energies(T, eps, n), hoppings(pot, l_max), T, eps)


def chain_matrix(chain):
    """Dense operator H with H[n, n] = W_n and H[n, n+l] = t_l for 0 < |l| ≤ l_max."""
    size = chain.W.size
    H = np.diag(chain.W.astype(complex))
    for l in range(1, min(chain.hoppings.l_max, size - 1) + 1):
        H += np.diag(np.full(size - l, chain.hoppings[l]), l)
        H += np.diag(np.full(size - l, chain.hoppings[-l]), -l)
    if np.max(np.abs(H.imag)) < 1e-12:
        return H.real
    return H


def _eigvec_decay(chain, energy, n_states):
    # W_n is even in n, so eigh can mix the states at ±n₀
    values, vectors = linalg.eigh(chain_matrix(chain))
    size = values.size
    fits = []
    for index in np.argsort(np.abs(values - energy), kind="stable"):
        u = vectors[:, index]
        center = int(np.argmax(np.abs(u)))
        if size // 4 <= center < 3 * size // 4:
            lo, hi = decay_window(u, center)
            fits.append(fit_exponential_decay(u[lo:hi], center - lo))
        if len(fits) == n_states:
            break
    if not fits:
        raise ExtendedStateError("no eigenvector is centred in the bulk of the chain", energy=energy)

    length = float(np.median([f.length for f in fits]))
    r_squared = float(np.median([f.r_squared for f in fits]))
    participation = float(np.median([f.participation for f in fits]))
    if r_squared < 0.5 or participation > size / 10.0 or length > size / 20.0:
        raise ExtendedStateError(
            f"eigenvectors near E={energy:.4g} are extended (R^2 {r_squared:.2f}, PR {participation:.1f})",
            energy=energy, r_squared=r_squared, participation=participation)
    return length, r_squared


def _transfer_matrix(chain, energy):
    t_plus, t_minus = chain.hoppings[1], chain.hoppings[-1]
    if abs(t_plus) == 0.0:
        raise DomainError("nearest-neighbour hopping vanishes", l=1)
    previous, current = 0.0 + 0.0j, 1.0 + 0.0j
    growth = np.empty(chain.W.size)
    total = 0.0
    for i, w in enumerate(chain.W):
        previous, current = current, ((energy - w) * current - t_minus * previous) / t_plus
        scale = math.hypot(abs(previous), abs(current))
        total += math.log(scale)
        previous, current = previous / scale, current / scale
        growth[i] = total
    gamma = total / chain.W.size
    n = np.arange(growth.size)
    r_squared = float(np.corrcoef(n, growth)[0, 1] ** 2) if np.ptp(growth) > 0.0 else 0.0
    size = chain.W.size
    length = math.inf if gamma <= 0.0 else 1.0 / gamma
    if r_squared < 0.5 or length > size / 20.0:
        raise ExtendedStateError(f"transfer-matrix growth rate {gamma:.3g} indicates an extended state",
                                 energy=energy, r_squared=r_squared)
    return length, r_squared


def tb_localization_length(chain, energy=None, method="eigvec_decay", n_states=5):
    """Eigenvector localization length of the chain near ``energy`` (default E = −t₀)."""
    energy = chain.E if energy is None else energy
    if method == "eigvec_decay":
        length, r_squared = _eigvec_decay(chain, energy, n_states)
        truncation = chain.hoppings.truncated_weight
    elif method == "transfer_matrix_nn":
        weights = np.abs(chain.hoppings.t) ** 2
        off_site = weights.sum() - weights[chain.hoppings.l_max]
        nearest = abs(chain.hoppings[1]) ** 2 + abs(chain.hoppings[-1]) ** 2
        truncation = float((off_site - nearest) / off_site) if off_site > 0.0 else 0.0
        length, r_squared = _transfer_matrix(chain, energy)
    else:
        raise UsageError(f"unknown method {method!r}", method=method)
    return TBLocalization(length, r_squared, method, float(energy), truncation)
