"""Split-step Floquet propagation on a truncated angular-momentum lattice.

Amplitudes live on m ∈ [−L, L] (N = 2L+1 sites, centred ordering) and the
angle grid has the same N points θ_j = 2πj/N, so the two representations are
related by an exactly invertible discrete Fourier transform. One period applies
the kick in angle space and then the free factor e^{−iTm²/2} in momentum space.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Callable, Optional

import numpy as np
import pandas as pd
from scipy import fft as sfft
from tqdm import tqdm

from rotorlab.classical_maps import Ensemble
from rotorlab.data import series_frame
from rotorlab.errors import DegenerateStateError, RangeError, SpillWarning, UsageError
from rotorlab.potentials import TWO_PI, Cosine

logger = logging.getLogger(__name__)

DEFAULT_SPILL_THRESHOLD = 1e-8
# amplitudes are rescaled into the tracked log scale outside this window
_RESCALE_ABOVE = 1e100
_RESCALE_BELOW = 1e-100


@dataclass
class RotorState:
    L: int
    amplitudes: np.ndarray
    hbar_eff: float = 1.0
    spill_threshold: float = DEFAULT_SPILL_THRESHOLD
    spilled: bool = False
    # physical amplitudes are amplitudes * exp(log_scale)
    log_scale: float = 0.0

    @property
    def components(self):
        return self.amplitudes.shape[0]

    @property
    def size(self):
        return 2 * self.L + 1

    @property
    def m(self):
        return np.arange(-self.L, self.L + 1)

    def edge_occupation(self):
        weights = np.abs(self.amplitudes) ** 2
        total = weights.sum()
        if total == 0.0:
            return 0.0
        return float((weights[:, 0].sum() + weights[:, -1].sum()) / total)


@dataclass(frozen=True)
class Modulation:
    """Kick amplitude factor 1 + ε cos(ω₂t) cos(ω₃t), t the integer kick index."""

    epsilon: float
    omega2: float
    omega3: float

    def factor(self, t):
        return 1.0 + self.epsilon * math.cos(self.omega2 * t) * math.cos(self.omega3 * t)


@dataclass(frozen=True)
class SpinKick:
    """Per-θ kick V₀(θ,t)·1 + V⃗(θ,t)·σ acting on two-component states."""

    vector: Callable
    scalar: Optional[Callable] = None


@dataclass(frozen=True)
class FloquetSpec:
    T: float
    potential: Optional[object] = None
    modulation: Optional[Modulation] = None
    spin_kick: Optional[SpinKick] = None
    half_step_split: bool = False

    @property
    def is_hermitian(self):
        return self.potential is None or self.potential.is_hermitian


@dataclass(frozen=True)
class Observables:
    norm: float
    log_norm: float
    energy: float
    mean_I: float
    prob: np.ndarray


@dataclass
class QuantumRun:
    series: pd.DataFrame
    final: RotorState
    spill_events: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


@dataclass(frozen=True)
class ColdAtomParameters:
    k: float
    hbar_eff: float

    @property
    def K(self):
        return self.k * self.hbar_eff


def init_state(L, kind="delta", m0=0, center=0.0, width=None, amplitudes=None,
               spinor=None, hbar_eff=1.0, spill_threshold=DEFAULT_SPILL_THRESHOLD):
    """Normalized initial state.

    ``kind`` is one of ``delta`` (at ``m0``), ``gaussian``, ``uniform`` or
    ``custom``. Gaussian ``center`` and ``width`` are given in scaled momentum
    J = ħ_eff·m, so a minimum-uncertainty packet uses ``width=sqrt(hbar_eff)``.
    ``spinor`` (two complex numbers) makes a two-component state.
    """
    if L < 1:
        raise UsageError(f"L must be >= 1, got {L}", L=L)
    m = np.arange(-L, L + 1)

    if kind == "delta":
        if not -L <= m0 <= L:
            raise RangeError(f"m0={m0} outside [-{L}, {L}]", m0=m0)
        profile = (m == m0).astype(complex)
    elif kind == "gaussian":
        if width is None or width < hbar_eff:
            raise UsageError(f"gaussian width {width} is below the lattice spacing {hbar_eff}", width=width)
        sigma = width / hbar_eff
        profile = np.exp(-((m - center / hbar_eff) ** 2) / (4.0 * sigma ** 2)).astype(complex)
    elif kind == "uniform":
        profile = np.ones(m.size, dtype=complex)
    elif kind == "custom":
        profile = np.asarray(amplitudes, dtype=complex)
        if profile.shape[-1] != m.size:
            raise UsageError(f"custom amplitudes need {m.size} entries per component", L=L)
    else:
        raise UsageError(f"unknown initial state kind {kind!r}", kind=kind)

    profile = np.atleast_2d(profile)
    if spinor is not None and profile.shape[0] == 1:
        profile = np.asarray(spinor, dtype=complex)[:, None] * profile
    total = np.sum(np.abs(profile) ** 2)
    if total == 0.0:
        raise DegenerateStateError("initial state has zero norm", kind=kind)
    return RotorState(L, profile / math.sqrt(total), hbar_eff, spill_threshold)


def spin_kick_factor(scalar, vector):
    """e^{−iV₀}(cos|V⃗| − i sin|V⃗| n̂·σ) for each grid point, shape (N, 2, 2)."""
    vx, vy, vz = np.asarray(vector, dtype=float)
    size = np.sqrt(vx ** 2 + vy ** 2 + vz ** 2)
    c = np.cos(size)
    s = np.sinc(size / np.pi)
    phase = np.exp(-1j * np.asarray(scalar, dtype=float)) * np.ones_like(size)
    out = np.empty(size.shape + (2, 2), dtype=complex)
    out[..., 0, 0] = c - 1j * s * vz
    out[..., 0, 1] = -1j * s * (vx - 1j * vy)
    out[..., 1, 0] = -1j * s * (vx + 1j * vy)
    out[..., 1, 1] = c + 1j * s * vz
    return phase[..., None, None] * out


def free_phases(T, m):
    """e^{−iTm²/2}, with the phase reduced exactly when T is a dyadic multiple of 4π."""
    turns = np.mod((T / (4.0 * np.pi)) * np.asarray(m, dtype=float) ** 2, 1.0)
    return np.exp(-1j * TWO_PI * turns)


class Propagator:
    """Cached grids and phase factors for one (spec, L) pair."""

    def __init__(self, spec, L, workers=None):
        self.spec = spec
        self.L = L
        self.size = 2 * L + 1
        self.workers = workers
        self.m = np.arange(-L, L + 1)
        self.theta = TWO_PI * np.arange(self.size) / self.size
        if spec.half_step_split:
            self._free = free_phases(0.5 * spec.T, self.m)
        else:
            self._free = free_phases(spec.T, self.m)
        self._potential = None if spec.potential is None else spec.potential.value(self.theta)
        self._kick = None
        if self._potential is not None and spec.modulation is None:
            self._kick = np.exp(-1j * self._potential)

    def to_angle(self, amplitudes):
        shifted = sfft.ifftshift(amplitudes, axes=-1)
        return sfft.ifft(shifted, axis=-1, norm="forward", workers=self.workers)

    def to_momentum(self, psi):
        spectrum = sfft.fft(psi, axis=-1, norm="forward", workers=self.workers)
        return sfft.fftshift(spectrum, axes=-1)

    def kick(self, amplitudes, t):
        psi = self.to_angle(amplitudes)
        if self._kick is not None:
            psi = psi * self._kick
        elif self._potential is not None:
            psi = psi * np.exp(-1j * self._potential * self.spec.modulation.factor(t))
        spin = self.spec.spin_kick
        if spin is not None:
            scalar = 0.0 if spin.scalar is None else spin.scalar(self.theta, t)
            factor = spin_kick_factor(scalar, spin.vector(self.theta, t))
            psi = np.einsum("jab,bj->aj", factor, psi)
        return self.to_momentum(psi)

    def period(self, amplitudes, t):
        if self.spec.half_step_split:
            return self._free * self.kick(self._free * amplitudes, t)
        return self._free * self.kick(amplitudes, t)

    def advance(self, state, t):
        amplitudes = self.period(state.amplitudes, t)
        log_scale = state.log_scale
        if not self.spec.is_hermitian:
            total = float(np.sum(np.abs(amplitudes) ** 2))
            if total > _RESCALE_ABOVE or 0.0 < total < _RESCALE_BELOW:
                amplitudes = amplitudes / math.sqrt(total)
                log_scale += 0.5 * math.log(total)
        new = replace(state, amplitudes=amplitudes, log_scale=log_scale)
        if not new.spilled and new.edge_occupation() > new.spill_threshold:
            new.spilled = True
            message = f"edge occupation {new.edge_occupation():.3g} exceeds {new.spill_threshold:g} at t={t}; grow L"
            logger.warning(message)
            warnings.warn(message, SpillWarning, stacklevel=3)
        return new


def floquet_step(state, spec, t, workers=None):
    if spec.spin_kick is not None and state.components != 2:
        raise UsageError("spin kicks need a two-component state", components=state.components)
    return Propagator(spec, state.L, workers).advance(state, t)


def observables(state):
    weights = np.abs(state.amplitudes) ** 2
    total = float(weights.sum())
    if total == 0.0 or not math.isfinite(total):
        raise DegenerateStateError(f"state norm is {total}", norm=total)
    prob = weights.sum(axis=0) / total
    m = state.m.astype(float)
    log_norm = math.log(total) + 2.0 * state.log_scale
    with np.errstate(over="ignore"):
        norm = float(np.exp(log_norm))
    return Observables(norm, log_norm, 0.5 * float(np.dot(m ** 2, prob)), float(np.dot(m, prob)), prob)


def evolve(state, spec, steps, record_every=1, progress=False, workers=None):
    """Apply ``steps`` periods, recording observables at t = 0 and every ``record_every`` kicks."""
    if steps < 1:
        raise UsageError(f"steps must be >= 1, got {steps}", steps=steps)
    if spec.spin_kick is not None and state.components != 2:
        raise UsageError("spin kicks need a two-component state", components=state.components)
    propagator = Propagator(spec, state.L, workers)
    rows = {"t": [], "norm": [], "energy": [], "meanI": [], "log_norm": []}
    spill_events, messages = [], []

    def record(t, current):
        obs = observables(current)
        rows["t"].append(t)
        rows["norm"].append(obs.norm)
        rows["energy"].append(obs.energy)
        rows["meanI"].append(obs.mean_I)
        rows["log_norm"].append(obs.log_norm)

    record(0, state)
    for t in tqdm(range(steps), desc="floquet", disable=not progress):
        was_spilled = state.spilled
        state = propagator.advance(state, t)
        if state.spilled and not was_spilled:
            spill_events.append(t + 1)
            messages.append(f"spill at t={t + 1} (L={state.L})")
        if (t + 1) % record_every == 0 or t + 1 == steps:
            record(t + 1, state)

    t = rows.pop("t")
    return QuantumRun(series_frame(t, **rows), state, spill_events, messages)


def qhe_default_field(theta1, theta2):
    """V⃗ = 2 arctan(2|d⃗|)/|d⃗| · d⃗ with d⃗ = (sinθ₁, sinθ₂, 0.8(1 − cosθ₁ − cosθ₂))."""
    theta1 = np.asarray(theta1, dtype=float)
    d = np.array([
        np.sin(theta1),
        np.full_like(theta1, np.sin(theta2)),
        0.8 * (1.0 - np.cos(theta1) - np.cos(theta2)),
    ])
    size = np.sqrt(np.sum(d ** 2, axis=0))
    prefactor = np.where(size > 0.0, 2.0 * np.arctan(2.0 * size) / np.where(size > 0.0, size, 1.0), 4.0)
    return prefactor * d


def spinor_qhe_run(L, hbar_eff, omega_tilde, steps, theta2_samples=8, field=None,
                   record_every=1, workers=None):
    """θ₂-averaged kinetic energy of the spin-1/2 rotor with kick phase θ₂ + ω̃t."""
    if theta2_samples < 8:
        raise UsageError(f"need at least 8 theta2 samples, got {theta2_samples}", theta2_samples=theta2_samples)
    field = qhe_default_field if field is None else field
    energies = []
    messages = []
    for j in range(theta2_samples):
        theta20 = TWO_PI * (j + 0.5) / theta2_samples

        def vector(theta, t, theta20=theta20):
            return field(theta, theta20 + omega_tilde * t) / hbar_eff

        spec = FloquetSpec(T=hbar_eff, spin_kick=SpinKick(vector))
        state = init_state(L, "delta", spinor=(1.0, 0.0), hbar_eff=hbar_eff)
        run = evolve(state, spec, steps, record_every, workers=workers)
        energies.append(run.series["energy"].to_numpy())
        messages.extend(run.warnings)
        t = run.series["t"].to_numpy()
    energies = np.array(energies)
    frame = series_frame(t, energy=energies.mean(axis=0), energy_spread=energies.std(axis=0))
    return QuantumRun(frame, state, [], messages)


def quasiperiodic_run(K, epsilon, omega2, omega3, hbar_eff, steps, L, initial=None,
                      record_every=1, workers=None):
    """Kicked rotor with kick amplitude modulated by 1 + ε cos(ω₂t) cos(ω₃t)."""
    spec = FloquetSpec(T=hbar_eff, potential=Cosine(K / hbar_eff),
                       modulation=Modulation(epsilon, omega2, omega3))
    state = init_state(L, "delta", hbar_eff=hbar_eff) if initial is None else initial
    return evolve(state, spec, steps, record_every, workers=workers)


def cold_atom_parameters(V0_over_hbar, omega_r, T):
    """Standing-wave pulses: k = (8V₀/ħ)ω_r T², ħ_eff = 8ω_r T."""
    return ColdAtomParameters(8.0 * V0_over_hbar * omega_r * T ** 2, 8.0 * omega_r * T)


def classical_ensemble_for(center, width, hbar_eff, n, seed=0):
    """Classical ensemble matching a minimum-uncertainty Gaussian in J = ħ_eff·m."""
    return Ensemble.gaussian(n, 0.0, center, hbar_eff / (2.0 * width), width, seed)
