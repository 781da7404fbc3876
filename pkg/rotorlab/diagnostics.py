"""Localization lengths, growth laws, time scales and scaling verdicts."""

import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np
from scipy import ndimage, stats

from rotorlab.errors import DomainError, FitError, ProfileError, UsageError

logger = logging.getLogger(__name__)

SATURATION_SLOPE = 0.02
# log-space residual floor, so exact synthetic laws tie and the simpler law wins
_RESIDUAL_FLOOR = 1e-10
_POOR_FIT_RMS = 1.0
ENVELOPE_SLACK = 3.0
ENVELOPE_WIDTH = 9
GROWTH_LAWS = ("saturated", "linear", "quadratic", "power")


@dataclass(frozen=True)
class LocalizationFit:
    length: float
    stderr: float
    r_squared: float
    center: float
    n_bins: int


@dataclass(frozen=True)
class DecayFit:
    """Amplitude decay |u_n| ∝ exp(−|n−n₀|/length)."""

    length: float
    r_squared: float
    center: int
    participation: float


@dataclass(frozen=True)
class GrowthFit:
    law: str
    coefficient: float
    exponent: Optional[float]
    window: tuple
    residual: float


@dataclass(frozen=True)
class Timescales:
    t_E: float
    t_star: float
    l_pred: float


@dataclass(frozen=True)
class ScalingVerdict:
    gamma_cl: float
    phase: str
    beta_singular: Optional[float]
    quantum_correction: str
    beta_phase: Optional[str] = None


def _weighted_quantile(x, w, q):
    order = np.argsort(x, kind="stable")
    cdf = np.cumsum(w[order])
    return x[order][np.searchsorted(cdf, q * cdf[-1])]


def participation_ratio(p):
    p = np.asarray(p, dtype=float)
    return float(p.sum() ** 2 / np.sum(p ** 2))


def fit_localization_length(P, m, center=None, floor=1e-14):
    """ℓ from ln P(m) = const − 2|m−m₀|/ℓ over the tail.

    The central |m−m₀| < ℓ_guess/4 region is excluded, with ℓ_guess = IQR/ln 2
    (exact for a two-sided exponential).
    """
    P = np.asarray(P, dtype=float)
    m = np.asarray(m, dtype=float)
    if center is None:
        center = float(m[np.argmax(P)])
    iqr = _weighted_quantile(m, P, 0.75) - _weighted_quantile(m, P, 0.25)
    guess = iqr / math.log(2.0)
    distance = np.abs(m - center)
    mask = (P > floor) & (distance >= 0.25 * guess)
    n_bins = int(mask.sum())
    if n_bins < 20:
        raise UsageError(f"only {n_bins} tail bins above floor {floor:g}", n_bins=n_bins)

    fit = stats.linregress(distance[mask], np.log(P[mask]))
    r_squared = float(fit.rvalue ** 2)
    if fit.slope >= 0.0 or r_squared < 0.8:
        raise ProfileError(f"profile is not exponential (slope {fit.slope:.3g}, R^2 {r_squared:.3f})",
                           slope=fit.slope, r_squared=r_squared)
    length = 2.0 / abs(fit.slope)
    return LocalizationFit(length, length * fit.stderr / abs(fit.slope), r_squared, center, n_bins)


def decay_window(u, center, slack=ENVELOPE_SLACK, width=ENVELOPE_WIDTH):
    """Sites [lo, hi) around ``center`` before the smoothed log-envelope climbs ``slack`` above its running minimum."""
    envelope = ndimage.maximum_filter1d(np.log(np.abs(np.asarray(u)) + 1e-300), size=width)
    edges = []
    for step in (-1, 1):
        i, lowest = center, envelope[center]
        while 0 <= i + step < envelope.size:
            lowest = min(lowest, envelope[i + step])
            if envelope[i + step] - lowest > slack:
                break
            i += step
        edges.append(i)
    return edges[0], edges[1] + 1


def fit_exponential_decay(u, center=None, floor=1e-12, margin=0):
    """Fit ln|u_n| against |n−n₀| for an eigenvector ``u``."""
    amplitude = np.abs(np.asarray(u))
    n = np.arange(amplitude.size)
    if center is None:
        center = int(np.argmax(amplitude))
    keep = amplitude > floor * amplitude.max()
    if margin:
        keep &= (n >= margin) & (n < amplitude.size - margin)
    keep[center] = False
    distance = np.abs(n - center)[keep]
    participation = participation_ratio(amplitude ** 2)
    if distance.size < 3 or np.ptp(distance) == 0:
        return DecayFit(math.inf, 0.0, center, participation)
    fit = stats.linregress(distance, np.log(amplitude[keep]))
    length = math.inf if fit.slope >= 0.0 else 1.0 / abs(fit.slope)
    return DecayFit(length, float(fit.rvalue ** 2), center, participation)


def is_saturated(t, y, threshold=SATURATION_SLOPE):
    """Relative slope over the last third below ``threshold`` per 100 steps."""
    t = np.asarray(t, dtype=float)
    y = np.asarray(y, dtype=float)
    tail = slice(2 * t.size // 3, None)
    fit = stats.linregress(t[tail], y[tail])
    level = abs(np.mean(y[tail]))
    if level == 0.0:
        return fit.slope == 0.0
    return abs(fit.slope) * 100.0 / level < threshold


def _law_fits(t, y):
    """Least-squares fits of each law; returns (law, coefficient, exponent, prediction, n_params)."""
    ones = np.ones_like(t)
    c = float(np.mean(y))
    yield "saturated", c, None, c * ones, 1

    slope, intercept = np.polyfit(t, y, 1)
    yield "linear", float(slope), 1.0, intercept + slope * t, 2

    curvature, offset = np.polyfit(t ** 2, y, 1)
    yield "quadratic", float(curvature), 2.0, offset + curvature * t ** 2, 2

    mu, log_a = np.polyfit(np.log(t), np.log(y), 1)
    yield "power", float(math.exp(log_a)), float(mu), np.exp(log_a) * t ** mu, 2


def fit_growth_law(series, window=None, column="energy"):
    """Select one of saturated, t, t², t^μ by a BIC-style score on log residuals."""
    t = series["t"].to_numpy(dtype=float)
    y = series[column].to_numpy(dtype=float)
    if window is not None:
        mask = (t >= window[0]) & (t <= window[1])
        t, y = t[mask], y[mask]
    if t.size < 30:
        raise UsageError(f"growth fit needs >= 30 samples, got {t.size}", window=window)
    if np.any(t <= 0.0) or np.any(y <= 0.0):
        raise FitError("growth fits need positive t and y", column=column)
    span = (float(t[0]), float(t[-1]))

    if is_saturated(t, y):
        rms = float(np.sqrt(np.mean(np.log(y / np.mean(y)) ** 2)))
        return GrowthFit("saturated", float(np.mean(y)), None, span, rms)

    n = t.size
    best, residuals = None, {}
    for law, coefficient, exponent, prediction, n_params in _law_fits(t, y):
        if law == "saturated" or np.any(prediction <= 0.0):
            continue
        rms = float(np.sqrt(np.mean(np.log(y / prediction) ** 2)))
        residuals[law] = rms
        score = n * math.log(max(rms, _RESIDUAL_FLOOR) ** 2) + n_params * math.log(n)
        if best is None or score < best[0]:
            best = (score, GrowthFit(law, coefficient, exponent, span, rms))
    if best is None or best[1].residual > _POOR_FIT_RMS:
        raise FitError("no growth law fits the window", residuals=residuals)
    return best[1]


def timescales(K, k, T):
    """Ehrenfest time |ln T|/ln(K/2) and break time t* = ℓ = k²/2."""
    if T <= 0.0:
        raise UsageError(f"T must be positive, got {T}", T=T)
    if K <= 2.0:
        raise DomainError(f"Ehrenfest estimate needs K > 2, got {K}", K=K)
    t_star = 0.5 * k ** 2
    return Timescales(abs(math.log(T)) / math.log(0.5 * K), t_star, t_star)


def _phase(value, tolerance):
    if abs(value) <= tolerance:
        return "critical"
    return "metal" if value > 0.0 else "insulator"


def scaling_verdict(d, d_e, mu, alpha=None, tolerance=1e-9):
    """γ_cl = d/d_e − 2/μ decides the phase; with ``alpha`` the singular-potential β = −α/(1−α) gets its own verdict."""
    if mu <= 0.0:
        raise UsageError(f"mu must be positive, got {mu}", mu=mu)
    if not 0.0 < d_e <= 1.0:
        raise UsageError(f"d_e must lie in (0, 1], got {d_e}", d_e=d_e)
    gamma_cl = d / d_e - 2.0 / mu

    beta = beta_phase = None
    if alpha is not None:
        beta = -math.inf if alpha == 1.0 else -alpha / (1.0 - alpha)
        beta_phase = _phase(beta, tolerance)

    ratio = 2.0 / mu
    if abs(ratio - 1.0) <= tolerance:
        correction = "logarithmic"
    elif ratio > 1.0:
        correction = "growing"
    else:
        correction = "subleading"
    return ScalingVerdict(gamma_cl, _phase(gamma_cl, tolerance), beta, correction, beta_phase)
