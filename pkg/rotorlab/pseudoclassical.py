"""Pseudoclassical maps near quantum resonances.

Close to T = 2πl + δ the detuning δ plays the role of Planck's constant and
the dynamics follows classical maps in J = δ·m with kick strength K = kδ.
"""

import logging
import math
from dataclasses import dataclass, field

import numpy as np
import pandas as pd

from rotorlab.classical_maps import Ensemble, PhasePoint, evolve_ensemble, numerical_jacobian, step_map
from rotorlab.data import series_frame
from rotorlab.errors import CapacityError, DomainError, UsageError
from rotorlab.potentials import TWO_PI, Cosine
from rotorlab.seeding import draw_blocks

logger = logging.getLogger(__name__)

DEFAULT_PRUNE_THRESHOLD = 1e-12
NONZERO_COEFFICIENT = 1e-12


@dataclass(frozen=True)
class Detuning:
    l: int
    delta: float
    k: float

    def __post_init__(self):
        if not self.delta > 0.0:
            raise DomainError(f"detuning must be positive, got {self.delta}", delta=self.delta)

    @property
    def Keff(self):
        return self.k * self.delta

    @property
    def T(self):
        return TWO_PI * self.l + self.delta


@dataclass(frozen=True)
class GaussSums:
    r: int
    s: int
    coefficients: np.ndarray
    nonzero: np.ndarray
    bloch_phases: np.ndarray

    @property
    def bands(self):
        return int(self.nonzero.size)

    @property
    def amplitudes(self):
        return self.coefficients[self.nonzero]

    def to_frame(self):
        return pd.DataFrame({
            "l": np.arange(self.s),
            "re_G": self.coefficients.real,
            "im_G": self.coefficients.imag,
            "abs_G": np.abs(self.coefficients),
        })


@dataclass(frozen=True)
class FixedPointReport:
    K: float
    lambda_numeric: float
    lambda_closed_form: float
    trace: float
    unstable_direction: tuple
    stable_direction: tuple

    def t_exp(self, delta):
        """Spreading time ln(π/δ)/λ₊ using the Jacobian value."""
        if self.lambda_numeric <= 0.0:
            return math.inf
        return math.log(math.pi / delta) / self.lambda_numeric

    @property
    def discrepancy(self):
        return self.lambda_closed_form - self.lambda_numeric


@dataclass
class BranchState:
    J: np.ndarray
    theta: np.ndarray
    amplitude: np.ndarray
    capacity: int = 1_000_000
    dropped_weight: float = 0.0

    @classmethod
    def single(cls, J=0.0, theta=0.0, capacity=1_000_000):
        return cls(np.array([float(J)]), np.array([float(theta)]), np.array([1.0 + 0.0j]), capacity)

    @property
    def retained_weight(self):
        return float(np.sum(np.abs(self.amplitude) ** 2))

    def __len__(self):
        return self.J.size

    def to_frame(self, step):
        return pd.DataFrame({
            "step": np.full(self.J.size, step),
            "J": self.J,
            "theta": self.theta,
            "reA": self.amplitude.real,
            "imA": self.amplitude.imag,
        })


@dataclass
class MultibranchRun:
    state: BranchState
    series: pd.DataFrame


@dataclass
class SpreadingRun:
    delta: float
    series: pd.DataFrame
    slope: float
    t_exp_measured: float
    report: FixedPointReport
    window: tuple = field(default_factory=tuple)


def gauss_sums(r, s):
    """G_l = (1/s)Σ_m e^{−i2π(r/s)m(m−l)} with band data for the nonzero coefficients."""
    if s < 1:
        raise UsageError(f"s must be >= 1, got {s}", s=s)
    if math.gcd(r, s) != 1:
        raise UsageError(f"r={r} and s={s} are not coprime", r=r, s=s)
    m = np.arange(s)
    l = np.arange(s)
    exponent = np.mod(r * m[None, :] * (m[None, :] - l[:, None]), s)
    coefficients = np.exp(-2j * np.pi * exponent / s).sum(axis=1) / s
    nonzero = np.flatnonzero(np.abs(coefficients) > NONZERO_COEFFICIENT)
    phases = np.mod(TWO_PI * r * nonzero / s, TWO_PI)
    return GaussSums(r, s, coefficients, nonzero, phases)


def pc_step(p, K, l):
    """ε-classical map J̄ = J + K sinθ, θ̄ = θ + J̄ + πl."""
    drift = np.pi if l % 2 else 0.0
    return step_map(p, Cosine(K), drift)


def _dkr_raw(theta, J, pot):
    J1 = J + pot.force(theta)
    theta1 = theta + np.pi + J1
    J2 = J1 + pot.force(theta1)
    return theta1 - np.pi - J2, J2


def dkr_general_step(p, pot):
    """Double-kick map with two kicks per period, for any kick potential."""
    theta, J = _dkr_raw(p.theta, p.J, pot)
    return PhasePoint(float(np.mod(theta, TWO_PI)), float(J))


def dkr_pc_step(p, K):
    return dkr_general_step(p, Cosine(K))


def to_harper(p):
    return p.J + p.theta, p.theta


def from_harper(u, theta):
    return PhasePoint(float(np.mod(theta, TWO_PI)), float(u - theta))


def harper_step(u, theta, K):
    """Kicked-Harper map ū = u + K sinθ, θ̄ = θ + K sin ū."""
    u_new = u + K * math.sin(theta)
    return u_new, theta + K * math.sin(u_new)


def fixed_point_analysis(K):
    """Stretching rate at (J, θ) = (0, π) from the Jacobian, next to the closed form."""
    if K < 0.0:
        raise DomainError(f"K must be non-negative, got {K}", K=K)
    pot = Cosine(K)
    jacobian = numerical_jacobian(lambda a, b: _dkr_raw(a, b, pot), np.pi, 0.0)
    values, vectors = np.linalg.eig(jacobian)
    order = np.argsort(-np.abs(values))
    values, vectors = values[order], vectors[:, order]
    lambda_numeric = float(math.log(abs(values[0])))
    lambda_closed_form = math.log((K ** 2 + 2.0 + math.sqrt(K ** 2 + 4.0 * K)) / 2.0)
    if abs(lambda_closed_form - lambda_numeric) > 1e-6:
        logger.info("closed-form rate %.6g differs from Jacobian rate %.6g at K=%g",
                    lambda_closed_form, lambda_numeric, K)
    return FixedPointReport(K, lambda_numeric, lambda_closed_form, float(np.trace(jacobian)),
                            tuple(np.real(vectors[:, 0])), tuple(np.real(vectors[:, 1])))


def exponential_spreading(K, delta, n_points=10_000, steps=None, seed=0, threshold=1.0):
    """Ensemble spread along the stable manifold of (0, π), with momentum width δ.

    Returns ln⟨J²⟩ against t, its slope over the window where the rms momentum
    lies between twice its initial value and π/10, and the first time the rms
    momentum reaches ``threshold``.
    """
    report = fixed_point_analysis(K)
    if report.lambda_numeric <= 0.0:
        raise DomainError(f"(0, pi) is not hyperbolic at K={K}", K=K)
    if steps is None:
        steps = int(1.5 * report.t_exp(delta)) + 50
    pot = Cosine(K)
    along = draw_blocks(seed, n_points, lambda rng, size: rng.uniform(-0.5, 0.5, (size, 2))).reshape(-1, 2)
    stable = np.array(report.stable_direction) / report.stable_direction[0]
    theta = np.pi + delta * along[:, 0] * stable[0]
    J = delta * along[:, 1] + delta * along[:, 0] * stable[1]

    second, largest = np.empty(steps + 1), np.empty(steps + 1)
    for t in range(steps + 1):
        second[t] = math.fsum((J * J).tolist()) / n_points
        largest[t] = np.max(np.abs(J))
        theta, J = _dkr_raw(theta, J, pot)
        theta = np.mod(theta, TWO_PI)

    rms = np.sqrt(second)
    ts = np.arange(steps + 1)
    mask = (rms >= 2.0 * rms[0]) & (rms <= 0.1 * np.pi) & (np.maximum.accumulate(rms) <= 0.1 * np.pi)
    slope = math.nan
    window = ()
    if mask.sum() >= 10:
        slope = float(np.polyfit(ts[mask], np.log(second[mask]), 1)[0])
        window = (int(ts[mask][0]), int(ts[mask][-1]))
    crossed = np.flatnonzero(rms >= threshold)
    t_exp = float(crossed[0]) if crossed.size else math.inf
    series = series_frame(ts, meanJ2=second, lnJ2=np.log(second), maxabsJ=largest)
    return SpreadingRun(delta, series, slope, t_exp, report, window)


def pseudoclassical_ensemble(delta, K, l, n_points, steps, seed=0):
    """ε-classical ensemble for the momentum-zero state: θ uniform, J uniform in [−δ/2, δ/2]."""
    pairs = draw_blocks(seed, n_points, lambda rng, size: rng.uniform(0.0, 1.0, (size, 2))).reshape(-1, 2)
    ensemble = Ensemble(TWO_PI * pairs[:, 0], delta * (pairs[:, 1] - 0.5), seed)
    drift = np.pi if l % 2 else 0.0
    return evolve_ensemble(ensemble, Cosine(K), steps, drift)


def multibranch_evolve(state, K, sums, steps, prune_threshold=DEFAULT_PRUNE_THRESHOLD):
    """Advance every branch under the l=0 map, then split it over the nonzero Gaussian-sum bands."""
    phases = sums.bloch_phases
    amplitudes = sums.amplitudes
    n_bands = phases.size
    J, theta, amplitude = state.J.copy(), state.theta.copy(), state.amplitude.copy()
    dropped = state.dropped_weight

    rows = []

    def record(t):
        weight = np.abs(amplitude) ** 2
        retained = float(weight.sum())
        mean = float(np.dot(weight, J) / retained) if retained else math.nan
        mean2 = float(np.dot(weight, J * J) / retained) if retained else math.nan
        rows.append((t, mean, mean2, retained, dropped, J.size))

    record(0)
    for t in range(1, steps + 1):
        J = J + K * np.sin(theta)
        theta = theta + J
        count = J.size * n_bands
        if count > state.capacity:
            raise CapacityError(f"{count} branches exceed capacity {state.capacity} at step {t}",
                                retained_weight=float(np.sum(np.abs(amplitude) ** 2)), step=t)
        J = np.repeat(J, n_bands)
        theta = np.mod(np.repeat(theta, n_bands) + np.tile(phases, J.size // n_bands), TWO_PI)
        amplitude = np.repeat(amplitude, n_bands) * np.tile(amplitudes, amplitude.size)

        weight = np.abs(amplitude) ** 2
        keep = weight >= prune_threshold
        if not np.all(keep):
            dropped += float(weight[~keep].sum())
            J, theta, amplitude = J[keep], theta[keep], amplitude[keep]
        record(t)

    columns = list(zip(*rows))
    series = series_frame(columns[0], meanJ=columns[1], meanJ2=columns[2], retained=columns[3],
                          dropped=columns[4], branches=columns[5])
    final = BranchState(J, theta, amplitude, state.capacity, dropped)
    return MultibranchRun(final, series)
