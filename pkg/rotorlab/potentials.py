"""Kick potentials V(θ) shared by the classical maps and the quantum engine."""

from dataclasses import asdict, dataclass

import numpy as np

from rotorlab.errors import DomainError, UsageError

TWO_PI = 2.0 * np.pi

# |θ| below this is replaced by the guard value for singular potentials
SINGULAR_GUARD = 1e-12


def wrap_zero_to_two_pi(theta):
    return np.mod(theta, TWO_PI)


def wrap_centered(theta):
    """Angle in (−π, π]."""
    return np.pi - np.mod(np.pi - np.asarray(theta, dtype=float), TWO_PI)


def _guarded(w):
    sign = np.where(w < 0.0, -1.0, 1.0)
    return sign, np.maximum(np.abs(w), SINGULAR_GUARD)


class KickPotential:
    """Base class: V(θ), the force F(θ) = −dV/dθ and dF/dθ."""

    kind = "abstract"

    @property
    def is_hermitian(self):
        return True

    @property
    def is_even(self):
        return False

    @property
    def amplitude(self):
        raise NotImplementedError

    def value(self, theta):
        raise NotImplementedError

    def force(self, theta):
        raise NotImplementedError

    def force_derivative(self, theta):
        raise NotImplementedError

    def to_dict(self):
        return {"kind": self.kind, **asdict(self)}


@dataclass(frozen=True)
class Cosine(KickPotential):
    """k cos θ, or k(cos θ + iγ sin θ) when ``gain`` is non-zero."""

    k: float
    gain: float = 0.0
    kind = "cosine"

    def __post_init__(self):
        if abs(self.gain) >= 1.0:
            raise DomainError(f"gain must satisfy |gamma| < 1, got {self.gain}", gamma=self.gain)

    @property
    def is_hermitian(self):
        return self.gain == 0.0

    @property
    def is_even(self):
        return self.gain == 0.0

    @property
    def amplitude(self):
        return abs(self.k)

    def value(self, theta):
        theta = np.asarray(theta, dtype=float)
        if self.gain == 0.0:
            return self.k * np.cos(theta)
        return self.k * (np.cos(theta) + 1j * self.gain * np.sin(theta))

    def force(self, theta):
        return self.k * np.sin(np.asarray(theta, dtype=float))

    def force_derivative(self, theta):
        return self.k * np.cos(np.asarray(theta, dtype=float))


@dataclass(frozen=True)
class CosinePhase(KickPotential):
    k: float
    phase: float = 0.0
    kind = "cosine_phase"

    @property
    def is_even(self):
        return abs(np.sin(self.phase)) < 1e-15

    @property
    def amplitude(self):
        return abs(self.k)

    def value(self, theta):
        return self.k * np.cos(np.asarray(theta, dtype=float) + self.phase)

    def force(self, theta):
        return self.k * np.sin(np.asarray(theta, dtype=float) + self.phase)

    def force_derivative(self, theta):
        return self.k * np.cos(np.asarray(theta, dtype=float) + self.phase)


@dataclass(frozen=True)
class Sawtooth(KickPotential):
    """−k(θ−π)²/2 on [0, 2π), giving the linear force k(θ−π)."""

    k: float
    kind = "sawtooth"

    @property
    def is_even(self):
        return True

    @property
    def amplitude(self):
        return abs(self.k) * np.pi ** 2 / 2.0

    def value(self, theta):
        x = wrap_zero_to_two_pi(np.asarray(theta, dtype=float))
        return -0.5 * self.k * (x - np.pi) ** 2

    def force(self, theta):
        x = wrap_zero_to_two_pi(np.asarray(theta, dtype=float))
        return self.k * (x - np.pi)

    def force_derivative(self, theta):
        return np.full_like(np.asarray(theta, dtype=float), self.k)


@dataclass(frozen=True)
class PowerLaw(KickPotential):
    """K|θ|^α with θ in (−π, π]; α in [−1, 1]."""

    K: float
    alpha: float
    kind = "power_law"

    def __post_init__(self):
        if not -1.0 <= self.alpha <= 1.0:
            raise DomainError(f"alpha must lie in [-1, 1], got {self.alpha}", alpha=self.alpha)

    @property
    def is_even(self):
        return True

    @property
    def amplitude(self):
        return abs(self.K) * np.pi ** max(self.alpha, 0.0)

    def value(self, theta):
        _, a = _guarded(wrap_centered(theta))
        return self.K * a ** self.alpha

    def force(self, theta):
        sign, a = _guarded(wrap_centered(theta))
        return -self.K * self.alpha * sign * a ** (self.alpha - 1.0)

    def force_derivative(self, theta):
        _, a = _guarded(wrap_centered(theta))
        return -self.K * self.alpha * (self.alpha - 1.0) * a ** (self.alpha - 2.0)


@dataclass(frozen=True)
class LogPotential(KickPotential):
    K: float
    kind = "log"

    @property
    def is_even(self):
        return True

    @property
    def amplitude(self):
        return abs(self.K) * np.log(np.pi)

    def value(self, theta):
        _, a = _guarded(wrap_centered(theta))
        return self.K * np.log(a)

    def force(self, theta):
        sign, a = _guarded(wrap_centered(theta))
        return -self.K * sign / a

    def force_derivative(self, theta):
        _, a = _guarded(wrap_centered(theta))
        return self.K / a ** 2


@dataclass(frozen=True)
class PiecewiseLinear(KickPotential):
    """k(1 − 2|θ|/π) on [−π, π); satisfies V(θ+π) = −V(θ)."""

    k: float
    kind = "piecewise_linear"

    @property
    def is_even(self):
        return True

    @property
    def amplitude(self):
        return abs(self.k)

    def value(self, theta):
        w = np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi
        return self.k * (1.0 - 2.0 * np.abs(w) / np.pi)

    def force(self, theta):
        w = np.mod(np.asarray(theta, dtype=float) + np.pi, TWO_PI) - np.pi
        return np.where(w < 0.0, -1.0, 1.0) * 2.0 * self.k / np.pi

    def force_derivative(self, theta):
        return np.zeros_like(np.asarray(theta, dtype=float))


POTENTIALS = {
    cls.kind: cls
    for cls in (Cosine, CosinePhase, Sawtooth, PowerLaw, LogPotential, PiecewiseLinear)
}


def make_potential(kind, **params):
    """Build a potential from its config name, e.g. ``make_potential("power_law", K=1, alpha=0.5)``."""
    try:
        cls = POTENTIALS[kind]
    except KeyError:
        raise UsageError(f"unknown potential {kind!r}; choose from {sorted(POTENTIALS)}", potential=kind)
    return cls(**params)
