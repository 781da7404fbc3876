"""Two kicked rotors coupled through ξ cos(θ₁ − θ₂).

One period applies the kick e^{−i(K₁cosθ₁ + K₂cosθ₂ + ξcos(θ₁−θ₂))} on the
(θ₁, θ₂) grid, then the free factor e^{−iT(m₁² + m₂²)/2}. Amplitudes are a
(2L₁+1)×(2L₂+1) matrix, so Schmidt coefficients are its singular values.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field, replace

import numpy as np
import pandas as pd
from scipy import fft as sfft
from scipy import stats
from tqdm import tqdm

from rotorlab.data import series_frame
from rotorlab.errors import DomainError, FitError, SpillWarning, StateError, UsageError
from rotorlab.potentials import TWO_PI
from rotorlab.quantum_engine import DEFAULT_SPILL_THRESHOLD, free_phases

logger = logging.getLogger(__name__)

EIGENVALUE_FLOOR = 1e-14
TRACE_TOLERANCE = 1e-8
EARLY_WINDOW = (5, 40)


@dataclass
class TwoRotorState:
    L1: int
    L2: int
    amplitudes: np.ndarray
    spill_threshold: float = DEFAULT_SPILL_THRESHOLD
    spilled: bool = False

    def __post_init__(self):
        self.amplitudes = np.asarray(self.amplitudes, dtype=complex)
        if self.amplitudes.shape != (2 * self.L1 + 1, 2 * self.L2 + 1):
            raise UsageError(f"amplitudes must be {(2 * self.L1 + 1, 2 * self.L2 + 1)}, got {self.amplitudes.shape}",
                             L1=self.L1, L2=self.L2)

    @classmethod
    def product(cls, a, b, spill_threshold=DEFAULT_SPILL_THRESHOLD):
        a = np.asarray(a, dtype=complex)
        b = np.asarray(b, dtype=complex)
        amplitudes = np.outer(a, b)
        amplitudes /= np.linalg.norm(amplitudes)
        return cls((a.size - 1) // 2, (b.size - 1) // 2, amplitudes, spill_threshold)

    @classmethod
    def delta(cls, L1, L2, m1=0, m2=0):
        a = np.zeros(2 * L1 + 1, dtype=complex)
        b = np.zeros(2 * L2 + 1, dtype=complex)
        a[m1 + L1] = 1.0
        b[m2 + L2] = 1.0
        return cls.product(a, b)

    @property
    def m1(self):
        return np.arange(-self.L1, self.L1 + 1)

    @property
    def m2(self):
        return np.arange(-self.L2, self.L2 + 1)

    @property
    def norm(self):
        return float(np.linalg.norm(self.amplitudes))

    def edge_occupation(self):
        weights = np.abs(self.amplitudes) ** 2
        total = weights.sum()
        if total == 0.0:
            return 0.0
        first = weights[0].sum() + weights[-1].sum()
        second = weights[:, 0].sum() + weights[:, -1].sum()
        return float(max(first, second) / total)

    def schmidt_values(self):
        """Squared singular values of the amplitude matrix, descending, summing to one."""
        sigma = np.linalg.svd(self.amplitudes, compute_uv=False)
        p = sigma ** 2
        return p / p.sum()


@dataclass(frozen=True)
class CoupledSpec:
    K1: float
    K2: float
    xi: float = 0.0
    T: float = 1.0

    def __post_init__(self):
        if self.xi < 0.0:
            raise DomainError(f"coupling must be non-negative, got {self.xi}", xi=self.xi)


@dataclass(frozen=True)
class Marginals:
    E1: float
    E2: float
    P1: np.ndarray
    P2: np.ndarray


@dataclass(frozen=True)
class ReducedState:
    matrix: np.ndarray
    eigenvalues: np.ndarray
    clip_mass: float

    @property
    def trace(self):
        return float(np.real(np.trace(self.matrix)))


@dataclass(frozen=True)
class Entanglement:
    S_vN: float
    S_lin: float
    N_eff: float


@dataclass
class CoupledRun:
    series: pd.DataFrame
    final: TwoRotorState
    spill_events: list = field(default_factory=list)
    warnings: list = field(default_factory=list)


@dataclass(frozen=True)
class EntanglementFits:
    early_slope: float
    early_window: tuple
    svn_log_slope: float
    deficit_exponent: float
    late_window: tuple


class CoupledPropagator:
    """Cached kick and free factors for one (spec, L₁, L₂)."""

    def __init__(self, spec, L1, L2, workers=None):
        self.spec = spec
        self.workers = workers
        n1, n2 = 2 * L1 + 1, 2 * L2 + 1
        theta1 = TWO_PI * np.arange(n1) / n1
        theta2 = TWO_PI * np.arange(n2) / n2
        self.difference = np.cos(theta1[:, None] - theta2[None, :])
        phase = spec.K1 * np.cos(theta1)[:, None] + spec.K2 * np.cos(theta2)[None, :] + spec.xi * self.difference
        self._kick = np.exp(-1j * phase)
        self._free = np.outer(free_phases(spec.T, np.arange(-L1, L1 + 1)), free_phases(spec.T, np.arange(-L2, L2 + 1)))

    def to_angle(self, amplitudes):
        return sfft.ifft2(sfft.ifftshift(amplitudes), norm="forward", workers=self.workers)

    def to_momentum(self, psi):
        return sfft.fftshift(sfft.fft2(psi, norm="forward", workers=self.workers))

    def forward(self, amplitudes):
        return self._free * self.to_momentum(self._kick * self.to_angle(amplitudes))

    def backward(self, amplitudes):
        return self.to_momentum(self._kick.conj() * self.to_angle(self._free.conj() * amplitudes))

    def interaction(self, amplitudes):
        """cos(θ₁ − θ₂) applied to ``amplitudes``."""
        return self.to_momentum(self.difference * self.to_angle(amplitudes))


def _check_spill(state, t):
    if state.spilled or state.edge_occupation() <= state.spill_threshold:
        return False
    state.spilled = True
    message = f"edge occupation {state.edge_occupation():.3g} exceeds {state.spill_threshold:g} at t={t}; grow L1/L2"
    logger.warning(message)
    warnings.warn(message, SpillWarning, stacklevel=3)
    return True


def coupled_step(state, spec, t=0, workers=None, propagator=None):
    """One period applied at period index ``t``."""
    propagator = propagator or CoupledPropagator(spec, state.L1, state.L2, workers)
    new = replace(state, amplitudes=propagator.forward(state.amplitudes))
    _check_spill(new, t + 1)
    return new


def marginal_observables(state):
    weights = np.abs(state.amplitudes) ** 2
    total = weights.sum()
    P1 = weights.sum(axis=1) / total
    P2 = weights.sum(axis=0) / total
    m1 = state.m1.astype(float)
    m2 = state.m2.astype(float)
    return Marginals(0.5 * float(np.dot(m1 ** 2, P1)), 0.5 * float(np.dot(m2 ** 2, P2)), P1, P2)


def reduced_density_matrix(state, keep=1):
    """ρ₁ = A A† or ρ₂ = Aᵀ A*, Hermitized, with negative eigenvalues clipped."""
    A = state.amplitudes / state.norm
    if keep == 1:
        rho = A @ A.conj().T
    elif keep == 2:
        rho = A.T @ A.conj()
    else:
        raise UsageError(f"keep must be 1 or 2, got {keep}", keep=keep)
    rho = 0.5 * (rho + rho.conj().T)
    values = np.linalg.eigvalsh(rho)[::-1]
    negative = values < 0.0
    clip_mass = float(-values[negative].sum())
    if clip_mass > 1e-12:
        logger.warning("clipped %.3g of negative eigenvalue mass from rho%d", clip_mass, keep)
    return ReducedState(rho, np.where(negative, 0.0, values), clip_mass)


def _measures(p):
    p = np.where(p < EIGENVALUE_FLOOR, 0.0, p)
    nonzero = p[p > 0.0]
    purity = float(np.sum(p ** 2))
    return Entanglement(float(-np.sum(nonzero * np.log(nonzero))), 1.0 - purity, 1.0 / purity)


def entanglement_measures(rho):
    """(S_vN, S_lin, N_eff) from a ``ReducedState`` or a density matrix."""
    if isinstance(rho, ReducedState):
        trace, values = rho.trace, rho.eigenvalues
    else:
        rho = np.asarray(rho)
        trace = float(np.real(np.trace(rho)))
        values = np.clip(np.linalg.eigvalsh(0.5 * (rho + rho.conj().T)), 0.0, None)
    if abs(trace - 1.0) > TRACE_TOLERANCE:
        raise StateError(f"reduced density matrix has trace {trace:.12g}", trace=trace)
    return _measures(np.asarray(values, dtype=float))


def evolve_coupled(state, spec, steps, record_every=1, progress=False, workers=None):
    """Series t, E1, E2, SvN, Slin, Neff, norm; entropies from the Schmidt spectrum."""
    if steps < 1:
        raise UsageError(f"steps must be >= 1, got {steps}", steps=steps)
    propagator = CoupledPropagator(spec, state.L1, state.L2, workers)
    rows = {key: [] for key in ("t", "E1", "E2", "SvN", "Slin", "Neff", "norm")}
    spill_events, messages = [], []

    def record(t, current):
        marginals = marginal_observables(current)
        measures = _measures(current.schmidt_values())
        for key, value in (("t", t), ("E1", marginals.E1), ("E2", marginals.E2), ("SvN", measures.S_vN),
                           ("Slin", measures.S_lin), ("Neff", measures.N_eff), ("norm", current.norm)):
            rows[key].append(value)

    record(0, state)
    for t in tqdm(range(1, steps + 1), desc="coupled", disable=not progress):
        state = replace(state, amplitudes=propagator.forward(state.amplitudes))
        if _check_spill(state, t):
            spill_events.append(t)
            messages.append(f"spill at t={t} (L1={state.L1}, L2={state.L2})")
        if t % record_every == 0 or t == steps:
            record(t, state)

    t = rows.pop("t")
    return CoupledRun(series_frame(t, **rows), state, spill_events, messages)


def _product_factors(state):
    u, sigma, vh = np.linalg.svd(state.amplitudes / state.norm)
    if sigma.size > 1 and sigma[1] > 1e-8:
        raise UsageError("the correlator needs a product initial state", second_schmidt=float(sigma[1]))
    return u[:, 0] * sigma[0], vh[0]


def _project_out(M, a, b):
    """(Q_a ⊗ Q_b) on the amplitude matrix M, Q = 1 − |x⟩⟨x|."""
    M = M - np.outer(a, a.conj() @ M)
    return M - np.outer(M @ b.conj(), b)


def interaction_correlator(state, spec, t_max, workers=None):
    """C(r, s) = 2 Re⟨χ_r|χ_s⟩ for r, s < t_max.

    χ_r = U₀^{−r}(Q_{a_r} ⊗ Q_{b_r}) cos(θ₁−θ₂)|a_r b_r⟩ with U₀ the uncoupled
    step and |a_r b_r⟩ the uncoupled evolution of the product ``state``.
    """
    a, b = _product_factors(state)
    free = CoupledPropagator(replace(spec, xi=0.0), state.L1, state.L2, workers)
    current = np.outer(a, b)
    chis = []
    for r in range(t_max):
        u, _, vh = np.linalg.svd(current)
        ar, br = u[:, 0], vh[0]
        chi = _project_out(free.interaction(current), ar, br)
        for _ in range(r):
            chi = free.backward(chi)
        chis.append(chi.ravel())
        current = free.forward(current)
    X = np.array(chis)
    return 2.0 * np.real(X.conj() @ X.T)


def perturbative_linear_entropy(correlator, xi):
    """S_lin(t) ≈ ξ² Σ_{r,s<t} C(r,s) for t = 0 … t_max."""
    C = np.asarray(correlator)
    totals = [0.0] + [float(C[:t, :t].sum()) for t in range(1, C.shape[0] + 1)]
    return xi ** 2 * np.array(totals)


def entanglement_growth_fits(series, early_window=EARLY_WINDOW, late_start=None):
    """Early S_lin slope, late S_vN slope against ln t and the S_lin deficit exponent."""
    t = series["t"].to_numpy(dtype=float)
    early = (t >= early_window[0]) & (t <= early_window[1])
    if early.sum() < 3:
        raise UsageError("early window holds fewer than 3 samples", window=early_window)
    early_slope = float(stats.linregress(t[early], series["Slin"].to_numpy()[early]).slope)

    late_start = late_start if late_start is not None else max(early_window[1], t[-1] / 4.0)
    late = t >= late_start
    deficit = 1.0 - series["Slin"].to_numpy()[late]
    if late.sum() < 3 or np.any(deficit <= 0.0):
        raise FitError("late window is too short or fully saturated", late_start=late_start)
    log_t = np.log(t[late])
    svn_slope = float(stats.linregress(log_t, series["SvN"].to_numpy()[late]).slope)
    deficit_exponent = float(stats.linregress(log_t, np.log(deficit)).slope)
    return EntanglementFits(early_slope, tuple(early_window), svn_slope, deficit_exponent,
                            (float(late_start), float(t[-1])))


def saturation_bound(state):
    """ln(min(2L₁+1, 2L₂+1)), the largest S_vN the grids allow."""
    return math.log(min(2 * state.L1 + 1, 2 * state.L2 + 1))
