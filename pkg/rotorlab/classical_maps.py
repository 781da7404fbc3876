"""Area-preserving kicked maps on the cylinder and the torus.

The standard map and its relatives all share one step: a kick
J̄ = J + F(θ) followed by a free rotation θ̄ = θ + J̄ (+ drift), angles reduced
into [0, 2π) with a floor-based modulo.
"""

import logging
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np
import pandas as pd
from scipy import special, stats
from tqdm import tqdm

from rotorlab.data import series_frame
from rotorlab.errors import DomainError, FitError, UsageError
from rotorlab.potentials import TWO_PI, wrap_centered
from rotorlab.seeding import draw_blocks

logger = logging.getLogger(__name__)

RESONANCE_OVERLAP_K = np.pi ** 2 / 4.0
CRITICAL_K = 0.9716


@dataclass(frozen=True)
class PhasePoint:
    theta: float
    J: float


@dataclass(frozen=True)
class Geometry:
    """Cylinder when ``cells`` is None, else a torus of ``cells`` momentum cells."""

    cells: Optional[int] = None

    @classmethod
    def torus(cls, cells=1):
        if int(cells) != cells or cells < 1:
            raise UsageError(f"torus needs a positive integer cell count, got {cells}", cells=cells)
        return cls(int(cells))

    @property
    def is_torus(self):
        return self.cells is not None

    def reduce_momentum(self, J):
        if self.cells is None:
            return J
        period = TWO_PI * self.cells
        return np.mod(J + 0.5 * period, period) - 0.5 * period


CYLINDER = Geometry()


@dataclass
class Ensemble:
    theta: np.ndarray
    J: np.ndarray
    seed: int = 0
    geometry: Geometry = CYLINDER

    def __post_init__(self):
        self.theta = np.mod(np.asarray(self.theta, dtype=float), TWO_PI)
        self.J = self.geometry.reduce_momentum(np.asarray(self.J, dtype=float))
        if self.theta.shape != self.J.shape:
            raise UsageError("theta and J must have the same length")

    def __len__(self):
        return self.theta.size

    def points(self):
        return [PhasePoint(float(a), float(b)) for a, b in zip(self.theta, self.J)]

    @classmethod
    def from_points(cls, points, seed=0, geometry=CYLINDER):
        return cls([p.theta for p in points], [p.J for p in points], seed, geometry)

    @classmethod
    def uniform_angles(cls, n, J0=0.0, seed=0, geometry=CYLINDER):
        theta = draw_blocks(seed, n, lambda rng, size: rng.uniform(0.0, TWO_PI, size))
        return cls(theta, np.full(n, float(J0)), seed, geometry)

    @classmethod
    def gaussian(cls, n, theta0, J0, sigma_theta, sigma_J, seed=0, geometry=CYLINDER):
        pairs = draw_blocks(seed, n, lambda rng, size: rng.standard_normal((size, 2)))
        pairs = pairs.reshape(-1, 2)
        return cls(theta0 + sigma_theta * pairs[:, 0], J0 + sigma_J * pairs[:, 1], seed, geometry)


@dataclass
class EnsembleRun:
    series: pd.DataFrame
    final: Ensemble
    snapshots: dict = field(default_factory=dict)


@dataclass(frozen=True)
class DiffusionFit:
    D: float
    stderr: float
    intercept: float
    r_squared: float
    window: tuple


@dataclass(frozen=True)
class LyapunovEstimate:
    value: float
    spread: float
    regular: bool


@dataclass
class SectionCloud:
    frame: pd.DataFrame
    excursion: pd.Series


def _require_real(pot):
    if not pot.is_hermitian:
        raise DomainError("classical maps need a real potential", potential=pot.kind)


def _kick_rotate(theta, J, pot, drift, geometry):
    J_new = J + pot.force(theta)
    theta_new = np.mod(theta + J_new + drift, TWO_PI)
    return theta_new, geometry.reduce_momentum(J_new)


def step_map(p, pot, drift=0.0, geometry=CYLINDER):
    """One kick followed by one free rotation."""
    _require_real(pot)
    theta, J = _kick_rotate(p.theta, p.J, pot, drift, geometry)
    if not np.isfinite(J):
        raise DomainError(f"non-finite momentum after kick at theta={p.theta!r}", theta=p.theta)
    if not np.isfinite(theta):
        raise DomainError(f"non-finite angle, drift={drift!r}", drift=drift)
    return PhasePoint(float(theta), float(J))


def inverse_step(p, pot, drift=0.0):
    """Exact inverse of ``step_map`` on the cylinder."""
    _require_real(pot)
    theta = float(np.mod(p.theta - p.J - drift, TWO_PI))
    return PhasePoint(theta, float(p.J - pot.force(theta)))


def numerical_jacobian(step, theta, J, h=1e-3):
    """Five-point Jacobian of ``step(theta, J) -> (theta', J')``.

    Output angles are compared through their circular difference, so the
    stencil is blind to the 2π reduction.
    """
    base = np.array(step(theta, J), dtype=float)

    def delta(dtheta, dJ):
        out = np.array(step(theta + dtheta, J + dJ), dtype=float) - base
        out[0] = wrap_centered(out[0])
        return out

    columns = []
    for unit in ((1.0, 0.0), (0.0, 1.0)):
        d = [delta(c * h * unit[0], c * h * unit[1]) for c in (2.0, 1.0, -1.0, -2.0)]
        columns.append((-d[0] + 8.0 * d[1] - 8.0 * d[2] + d[3]) / (12.0 * h))
    return np.column_stack(columns)


def _moments(J):
    values = J.tolist()
    n = len(values)
    mean = math.fsum(values) / n
    var = math.fsum((x - mean) ** 2 for x in values) / n
    return mean, var


def evolve_ensemble(ensemble, pot, steps, drift=0.0, snapshot_every=None, progress=False):
    """Iterate every point ``steps`` times, recording ⟨J⟩ and ⟨(ΔJ)²⟩ at each step."""
    if len(ensemble) == 0:
        raise UsageError("empty ensemble")
    if steps < 1:
        raise UsageError(f"steps must be >= 1, got {steps}", steps=steps)
    _require_real(pot)

    theta, J = ensemble.theta.copy(), ensemble.J.copy()
    means, variances = np.empty(steps + 1), np.empty(steps + 1)
    means[0], variances[0] = _moments(J)
    snapshots = {}
    if snapshot_every:
        snapshots[0] = np.column_stack([theta, J])

    for t in tqdm(range(1, steps + 1), desc="ensemble", disable=not progress):
        theta, J = _kick_rotate(theta, J, pot, drift, ensemble.geometry)
        means[t], variances[t] = _moments(J)
        if snapshot_every and t % snapshot_every == 0:
            snapshots[t] = np.column_stack([theta, J])

    if not np.all(np.isfinite(variances)):
        raise DomainError("ensemble moments became non-finite", potential=pot.kind)
    series = series_frame(np.arange(steps + 1), meanJ=means, varJ=variances)
    final = Ensemble(theta, J, ensemble.seed, ensemble.geometry)
    return EnsembleRun(series, final, snapshots)


def diffusion_coefficient(series, window=None, column="varJ"):
    """Least-squares slope of ⟨(ΔJ)²⟩ against t over ``window`` (inclusive)."""
    t = series["t"].to_numpy(dtype=float)
    y = series[column].to_numpy(dtype=float)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        t, y = t[mask], y[mask]
    if t.size < 50:
        raise UsageError(f"diffusion fit needs >= 50 points, got {t.size}", window=window)
    if not np.all(np.isfinite(y)):
        raise FitError("series contains non-finite values", column=column)
    if np.ptp(y) == 0.0:
        return DiffusionFit(0.0, 0.0, float(y[0]), 1.0, (t[0], t[-1]))

    fit = stats.linregress(t, y)
    if fit.slope < 0.0 and abs(fit.slope) > 3.0 * fit.stderr:
        raise FitError(f"second moment decreases (slope {fit.slope:.3g})", slope=fit.slope)
    return DiffusionFit(float(fit.slope), float(fit.stderr), float(fit.intercept), float(fit.rvalue ** 2), (t[0], t[-1]))


def rechester_white_estimate(K):
    """(K²/2)(1 − J₂(K)), the diffusion rate with the leading correlation."""
    return 0.5 * K ** 2 * (1.0 - special.jv(2, K))


def max_lyapunov(pot, p0, steps=10_000, transient=1_000, blocks=10):
    """Benettin tangent-vector estimate, renormalized every step."""
    _require_real(pot)
    if steps <= transient:
        raise UsageError("steps must exceed the transient", steps=steps, transient=transient)

    theta, J = float(p0.theta), float(p0.J)
    for _ in range(transient):
        J = J + float(pot.force(theta))
        theta = (theta + J) % TWO_PI

    dtheta, dJ = 1.0, 0.0
    logs = np.empty(steps)
    for i in range(steps):
        slope = float(pot.force_derivative(theta))
        dJ = dJ + slope * dtheta
        dtheta = dtheta + dJ
        J = J + float(pot.force(theta))
        theta = (theta + J) % TWO_PI
        norm = math.hypot(dtheta, dJ)
        logs[i] = math.log(norm)
        dtheta, dJ = dtheta / norm, dJ / norm

    value = math.fsum(logs) / steps
    per_block = [math.fsum(chunk) / chunk.size for chunk in np.array_split(logs, blocks)]
    spread = float(np.std(per_block) / math.sqrt(blocks))
    regular = value < max(3.0 * spread, 1e-2)
    if regular:
        logger.info("Lyapunov estimate %.3g is indistinguishable from zero (spread %.3g)", value, spread)
    return LyapunovEstimate(value, spread, regular)


def poincare_section(pot, seeds, steps, cells=1):
    """Torus samples per seed plus each seed's momentum excursion on the cylinder lift."""
    _require_real(pot)
    geometry = Geometry.torus(cells)
    theta = np.array([p.theta for p in seeds], dtype=float)
    J = np.array([p.J for p in seeds], dtype=float)
    J0 = J.copy()
    excursion = np.zeros_like(J)

    thetas, momenta = [], []
    for _ in range(steps):
        theta, J = _kick_rotate(theta, J, pot, 0.0, CYLINDER)
        excursion = np.maximum(excursion, np.abs(J - J0))
        thetas.append(theta)
        momenta.append(geometry.reduce_momentum(J))

    n = len(seeds)
    frame = pd.DataFrame({
        "seed_id": np.tile(np.arange(n), steps),
        "theta": np.concatenate(thetas) if thetas else np.empty(0),
        "J": np.concatenate(momenta) if momenta else np.empty(0),
    })
    return SectionCloud(frame, pd.Series(excursion, name="excursion"))
