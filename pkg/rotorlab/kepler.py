"""Kepler map for microwave ionization of highly excited hydrogen.

Scaled units: ε = ε₀/n₀⁴, ω = ω₀/n₀³. The map acts on N = E/ω, the energy in
photon units, and on the field phase φ at perihelion passage.
"""

import logging
import math
from dataclasses import dataclass

import numpy as np
import pandas as pd
from tqdm import tqdm

from rotorlab.classical_maps import PhasePoint
from rotorlab.data import series_frame
from rotorlab.errors import DomainError, UsageError
from rotorlab.potentials import TWO_PI, Cosine
from rotorlab.quantum_engine import FloquetSpec, Propagator, init_state
from rotorlab.seeding import draw_blocks

logger = logging.getLogger(__name__)

IONIZED_FRACTION = 0.1
THRESHOLD_FACTORS = np.geomspace(0.2, 5.0, 15)


@dataclass(frozen=True)
class KeplerPoint:
    N: float
    phi: float
    ionized: bool = False


@dataclass(frozen=True)
class MicrowaveParams:
    epsilon: float
    omega: float
    n0: float

    def __post_init__(self):
        if self.omega <= 0.0 or self.n0 <= 0.0:
            raise UsageError("omega and n0 must be positive", omega=self.omega, n0=self.n0)

    @classmethod
    def from_scaled(cls, eps0, omega0, n0):
        return cls(eps0 / n0 ** 4, omega0 / n0 ** 3, n0)

    @property
    def k(self):
        return 2.6 * self.epsilon / self.omega ** (5.0 / 3.0)

    @property
    def T_lin(self):
        return 6.0 * math.pi * self.omega ** 2 * self.n0 ** 5

    @property
    def N_I(self):
        """Photons needed to reach the continuum from n₀."""
        return 1.0 / (2.0 * self.n0 ** 2 * self.omega)

    @property
    def N0(self):
        return -self.N_I

    @property
    def l_phi(self):
        return 3.3 * self.epsilon ** 2 / self.omega ** (10.0 / 3.0)

    @property
    def omega0(self):
        return self.omega * self.n0 ** 3

    @property
    def eps0(self):
        return self.epsilon * self.n0 ** 4


@dataclass(frozen=True)
class Borders:
    eps0_classical: float
    eps_classical: float
    eps_quantum: float
    ratio: float

    @property
    def delocalized(self):
        return self.ratio > 1.0


@dataclass(frozen=True)
class LinearizedMap:
    K: float
    T_lin: float
    drift: float
    N0: float

    @property
    def potential(self):
        return Cosine(self.K)

    def to_standard(self, p):
        return PhasePoint(float(np.mod(p.phi, TWO_PI)), self.T_lin * (p.N - self.N0))

    def from_standard(self, p):
        return KeplerPoint(self.N0 + p.J / self.T_lin, p.theta)


@dataclass
class IonizationRun:
    params: MicrowaveParams
    series: pd.DataFrame

    @property
    def final_fraction(self):
        return float(self.series["fraction"].iloc[-1])


def _phase_advance(N, omega):
    return math.pi / math.sqrt(2.0 * omega) * (-N) ** -1.5


def kepler_step(p, params):
    """N̄ = N + k sinφ, φ̄ = φ + π/√(2ω)·(−N̄)^{−3/2}; N̄ ≥ 0 ionizes for good."""
    if p.ionized:
        return p
    N = p.N + params.k * math.sin(p.phi)
    if N >= 0.0:
        return KeplerPoint(N, p.phi, True)
    return KeplerPoint(N, p.phi + _phase_advance(N, params.omega))


def linearized_standard_map(params):
    """Standard map with K = k·T_lin around N₀ and I = T_lin(N − N₀)."""
    return LinearizedMap(params.k * params.T_lin, params.T_lin,
                         float(np.mod(_phase_advance(params.N0, params.omega), TWO_PI)), params.N0)


def ionization_probability(params, n_traj, steps, seed=0, progress=False):
    """Fraction of the N₀, uniform-φ ensemble ionized after each kick."""
    if n_traj < 1 or steps < 1:
        raise UsageError("n_traj and steps must be positive", n_traj=n_traj, steps=steps)
    phi = draw_blocks(seed, n_traj, lambda rng, size: rng.uniform(0.0, TWO_PI, size))
    N = np.full(n_traj, params.N0)
    ionized = np.zeros(n_traj, dtype=bool)
    scale = math.pi / math.sqrt(2.0 * params.omega)
    fraction = np.empty(steps + 1)
    fraction[0] = 0.0
    for t in tqdm(range(1, steps + 1), desc="kepler", disable=not progress):
        bound = ~ionized
        N[bound] += params.k * np.sin(phi[bound])
        ionized |= N >= 0.0
        bound = ~ionized
        phi[bound] = np.mod(phi[bound] + scale * (-N[bound]) ** -1.5, TWO_PI)
        fraction[t] = ionized.mean()
    return IonizationRun(params, series_frame(np.arange(steps + 1), fraction=fraction))


def quantized_ionization_probability(params, steps, L=None, progress=False):
    """Absorbed probability of the quantized linearized map, cut at m ≥ N_I photons.

    The engine runs the kicked rotor with kick k and period T_lin on m = N − N₀;
    the linear phase drift of the Kepler map is dropped.
    """
    cutoff = int(math.ceil(params.N_I))
    L = 2 * cutoff + 32 if L is None else L
    if L <= cutoff:
        raise UsageError(f"L={L} does not reach the ionization cut at m={cutoff}", L=L, cutoff=cutoff)
    propagator = Propagator(FloquetSpec(T=params.T_lin, potential=Cosine(params.k)), L)
    state = init_state(L)
    absorbed = np.arange(-L, L + 1) >= cutoff
    fraction = np.empty(steps + 1)
    fraction[0] = 0.0
    for t in tqdm(range(1, steps + 1), desc="kepler-quantum", disable=not progress):
        state = propagator.advance(state, t - 1)
        state.amplitudes[:, absorbed] = 0.0
        fraction[t] = 1.0 - float(np.sum(np.abs(state.amplitudes) ** 2))
    return IonizationRun(params, series_frame(np.arange(steps + 1), fraction=fraction))


def borders(params):
    """Classical chaos border ε₀c = 1/(49ω₀^{1/3}) and quantum delocalization border ℓ_φ = N_I."""
    omega0 = params.omega0
    if omega0 < 1.0:
        raise DomainError(f"the Kepler map needs omega0 >= 1, got {omega0:.4g}", omega0=omega0)
    eps0c = 1.0 / (49.0 * omega0 ** (1.0 / 3.0))
    eps_q = params.omega ** (7.0 / 6.0) / (params.n0 * math.sqrt(6.6))
    return Borders(eps0c, eps0c / params.n0 ** 4, eps_q, params.l_phi / params.N_I)


def ionization_threshold(omega0, n0, n_traj, steps, factors=THRESHOLD_FACTORS, seed=0,
                         fraction=IONIZED_FRACTION, quantum=False):
    """Smallest scaled field ε₀ on ``factors``·ε₀c whose ionized fraction reaches ``fraction``."""
    eps0c = borders(MicrowaveParams.from_scaled(0.0, omega0, n0)).eps0_classical
    for factor in np.sort(np.asarray(factors, dtype=float)):
        params = MicrowaveParams.from_scaled(factor * eps0c, omega0, n0)
        if quantum:
            run = quantized_ionization_probability(params, steps)
        else:
            run = ionization_probability(params, n_traj, steps, seed)
        if run.final_fraction >= fraction:
            return float(factor * eps0c)
    logger.info("omega0=%g: no field on the grid reaches an ionized fraction of %g", omega0, fraction)
    return math.nan


def threshold_curve(omega0_values, n0, n_traj, steps, factors=THRESHOLD_FACTORS, seed=0, quantum=False):
    """Table omega0, eps_threshold, eps0c, eps_q in scaled ε₀ units."""
    rows = []
    for omega0 in omega0_values:
        limits = borders(MicrowaveParams.from_scaled(0.0, omega0, n0))
        row = {
            "omega0": float(omega0),
            "eps_threshold": ionization_threshold(omega0, n0, n_traj, steps, factors, seed),
            "eps0c": limits.eps0_classical,
            "eps_q": limits.eps_quantum * n0 ** 4,
        }
        if quantum:
            row["eps_threshold_quantum"] = ionization_threshold(omega0, n0, n_traj, steps, factors, seed,
                                                                quantum=True)
        rows.append(row)
    return pd.DataFrame(rows)
