"""Floquet bands of the on-resonance double-kicked rotor.

With T = 4π and T₀ = 2πr/s the Floquet operator
    U(α) = D† K₂ D K₁(α),   D = e^{−iT₀m²/2},  K₂ = e^{−ik cosθ},  K₁ = e^{−ik cos(θ+α)}
commutes with momentum translations by s, so each Bloch phase φ gives an
s×s matrix Ū(φ, α) (2s×2s with spin). Its eigenvectors satisfy
v(φ+2π) = G v(φ), G = diag(e^{−i2πm/s}), which the φ-boundary links use.
"""

import logging
import math
import warnings
from dataclasses import dataclass, field, replace
from typing import Optional

import numpy as np
import pandas as pd
from scipy import fft as sfft
from scipy import linalg, optimize

from rotorlab.data import series_frame
from rotorlab.errors import (AdiabaticityWarning, ChernUndefinedError, GapClosureWarning, TruncationError,
                             UsageError)
from rotorlab.potentials import TWO_PI, Cosine, CosinePhase
from rotorlab.quantum_engine import FloquetSpec, Propagator, RotorState, free_phases, observables, spin_kick_factor

logger = logging.getLogger(__name__)

DEGENERACY_TOLERANCE = 1e-6
LEAKAGE_LIMIT = 0.05
SIGMA_Y = np.array([[0.0, -1j], [1j, 0.0]])


@dataclass(frozen=True)
class SpinKickParams:
    """Kicks H_j = K_j⁰cos(ν_j⁰θ + α_j⁰) + K_j cos(ν_jθ + α_j) n̂_j·σ for j = 1, 2."""

    K0: tuple = (1.0, 1.0)
    nu0: tuple = (1, 1)
    alpha0: tuple = (0.0, 0.5 * np.pi)
    K: tuple = (1.0, 1.0)
    nu: tuple = (1, 1)
    alpha: tuple = (0.5 * np.pi, 0.0)
    n: tuple = ((0.0, 0.0, 1.0), (1.0, 0.0, 0.0))

    def __post_init__(self):
        for axis in self.n:
            if not math.isclose(float(np.linalg.norm(axis)), 1.0, rel_tol=1e-12):
                raise UsageError(f"spin axis {axis} is not a unit vector", axis=axis)

    @classmethod
    def cii(cls, K0=(1.0, 1.0), K=(1.0, 1.0), nu0=(1, 1), nu=(1, 1), n=((0.0, 0.0, 1.0), (1.0, 0.0, 0.0))):
        """Odd frequencies with α₁⁰=0, α₁=π/2, α₂⁰=π/2, α₂=0."""
        if any(v % 2 == 0 for v in tuple(nu0) + tuple(nu)):
            raise UsageError("the CII set needs odd kick frequencies", nu0=nu0, nu=nu)
        return cls(tuple(K0), tuple(nu0), (0.0, 0.5 * np.pi), tuple(K), tuple(nu), (0.5 * np.pi, 0.0), tuple(n))


@dataclass(frozen=True)
class ResonantDKRSpec:
    r: int = 1
    s: int = 3
    k: float = 1.0
    alpha: float = 0.0
    phi: float = 0.0
    spin: Optional[SpinKickParams] = None
    p_max: int = 256
    tol: float = 1e-13

    def __post_init__(self):
        if self.s < 1 or math.gcd(self.r, self.s) != 1:
            raise UsageError(f"r={self.r} and s={self.s} must be coprime with s >= 1", r=self.r, s=self.s)

    @property
    def T0(self):
        return TWO_PI * self.r / self.s

    @property
    def components(self):
        return 1 if self.spin is None else 2

    @property
    def bands(self):
        return self.s * self.components

    def twist(self):
        """G with Ū(φ+2π) = G Ū(φ) G†."""
        phases = np.exp(-1j * TWO_PI * np.arange(self.s) / self.s)
        return np.kron(np.diag(phases), np.eye(self.components))


@dataclass
class BandGrid:
    spec: ResonantDKRSpec
    phi: np.ndarray
    alpha: np.ndarray
    omega: np.ndarray
    eigenvalues: np.ndarray
    vectors: np.ndarray
    gaps: np.ndarray
    residual: float
    warnings: list = field(default_factory=list)

    @property
    def min_gap(self):
        return float(np.min(self.gaps))

    def closed_nodes(self):
        return [tuple(int(x) for x in node) for node in np.argwhere(self.gaps < DEGENERACY_TOLERANCE)]

    def to_frame(self):
        i, j, n = np.meshgrid(np.arange(self.phi.size), np.arange(self.alpha.size),
                              np.arange(self.omega.shape[-1]), indexing="ij")
        return pd.DataFrame({
            "phi": self.phi[i.ravel()],
            "alpha": self.alpha[j.ravel()],
            "band": n.ravel(),
            "omega": self.omega.ravel(),
        })


@dataclass
class CurvatureField:
    phi: np.ndarray
    alpha: np.ndarray
    B: np.ndarray
    flagged: np.ndarray

    @property
    def masked(self):
        return np.where(self.flagged[..., None], np.nan, self.B)

    def quadrature(self):
        cell = (TWO_PI / self.phi.size) * (TWO_PI / self.alpha.size)
        return self.B.sum(axis=(0, 1)) * cell / TWO_PI

    def to_frame(self):
        i, j, n = np.meshgrid(np.arange(self.phi.size), np.arange(self.alpha.size),
                              np.arange(self.B.shape[-1]), indexing="ij")
        return pd.DataFrame({
            "phi": self.phi[i.ravel()],
            "alpha": self.alpha[j.ravel()],
            "band": n.ravel(),
            "B": self.masked.ravel(),
        })


@dataclass
class ChernTable:
    lattice: np.ndarray
    quadrature: np.ndarray
    flux: np.ndarray

    def to_frame(self):
        return pd.DataFrame({
            "band": np.arange(self.lattice.size),
            "C_lattice": self.lattice,
            "C_quadrature": self.quadrature,
        })


@dataclass
class PumpResult:
    series: pd.DataFrame
    band: int
    delta_I: float
    chern: int
    prediction: int
    max_leakage: float
    warnings: list = field(default_factory=list)


def _coefficient_grid(spec):
    top = spec.k if spec.spin is None else max(
        abs(a) * v for a, v in zip(tuple(spec.spin.K0) + tuple(spec.spin.K), tuple(spec.spin.nu0) + tuple(spec.spin.nu)))
    return int(2 ** math.ceil(math.log2(max(64.0, 8.0 * (abs(top) + 32.0)))))


def _kick_on_grid(spec, which, scale, theta):
    if spec.spin is None:
        return np.exp(-1j * scale * spec.k * np.cos(theta))[:, None, None]
    j = which - 1
    p = spec.spin
    scalar = scale * p.K0[j] * np.cos(p.nu0[j] * theta + p.alpha0[j])
    amplitude = scale * p.K[j] * np.cos(p.nu[j] * theta + p.alpha[j])
    vector = np.asarray(p.n[j], dtype=float)[:, None] * amplitude[None, :]
    return spin_kick_factor(scalar, vector)


def kick_coefficients(spec, which, scale=1.0):
    """Fourier blocks c_l of kick ``which`` (1 or 2), with ⟨j|K|n⟩ = c_{j−n}.

    Returns ``(coefficients, P)`` with coefficients of shape (2P+1, d, d),
    P the smallest band half-width whose dropped tail stays below ``spec.tol``.
    """
    size = _coefficient_grid(spec)
    theta = TWO_PI * np.arange(size) / size
    spectrum = sfft.fft(_kick_on_grid(spec, which, scale, theta), axis=0) / size
    weight = np.sum(np.abs(spectrum) ** 2, axis=(1, 2))

    half = size // 2
    l = np.arange(-half + 1, half)
    w = weight[np.mod(l, size)]
    # tail[P] = weight beyond |l| > P
    pairs = (w + w[::-1])[half:]
    tail = np.append(np.cumsum(pairs[::-1])[::-1], 0.0)
    P = int(np.argmax(np.sqrt(tail) <= spec.tol))
    if P > spec.p_max or P > size // 4:
        raise TruncationError(f"kick {which} needs |l| up to {P}, beyond p_max={spec.p_max}",
                              required=P, p_max=spec.p_max)
    return spectrum[np.mod(np.arange(-P, P + 1), size)], P


def _toeplitz(coefficients, P, rows, cols):
    diff = rows[:, None] - cols[None, :]
    inside = np.abs(diff) <= P
    blocks = coefficients[np.clip(diff + P, 0, 2 * P)] * inside[..., None, None]
    d = coefficients.shape[-1]
    return blocks.transpose(0, 2, 1, 3).reshape(rows.size * d, cols.size * d)


def _free(spec, cols, adjoint):
    # e^{−iπr m²/s} through the exact residue of r·m² mod 2s
    turns = np.mod(spec.r * cols.astype(np.int64) ** 2, 2 * spec.s) / (2.0 * spec.s)
    values = np.exp((1j if adjoint else -1j) * TWO_PI * turns)
    return np.repeat(values, spec.components)


def _factors(spec, frame, derivative=False):
    c2, P2 = kick_coefficients(spec, 2)
    if frame == "standard":
        c1, P1 = kick_coefficients(spec, 1)
        l1 = np.arange(-P1, P1 + 1)
        kick1 = c1 * np.exp(1j * l1 * spec.alpha)[:, None, None]
        if derivative:
            kick1 = kick1 * (1j * l1)[:, None, None]
        return [("free", True), ("kick", c2, P2), ("free", False), ("kick", kick1, P1)]
    if frame == "symmetric":
        if derivative:
            raise UsageError("derivatives are only built in the standard frame")
        half, Ph = kick_coefficients(spec, 1, scale=0.5)
        half = half * np.exp(1j * np.arange(-Ph, Ph + 1) * spec.alpha)[:, None, None]
        return [("kick", half, Ph), ("free", True), ("kick", c2, P2), ("free", False), ("kick", half, Ph)]
    raise UsageError(f"unknown frame {frame!r}", frame=frame)


def _row_block(spec, frame="standard", derivative=False):
    """Rows m ∈ [0, s) of the full operator, on the momentum window they couple to."""
    d = spec.components
    cols = np.arange(spec.s)
    block = np.eye(spec.s * d, dtype=complex)
    for factor in _factors(spec, frame, derivative):
        if factor[0] == "free":
            block = block * _free(spec, cols, factor[1])[None, :]
        else:
            _, coefficients, P = factor
            wider = np.arange(cols[0] - P, cols[-1] + P + 1)
            block = block @ _toeplitz(coefficients, P, cols, wider)
            cols = wider
    return block, cols


def _fold(spec, block, cols, phis, derivative=False):
    """Ū[m, n mod s] = Σ block[m, n] e^{i(n−m)φ/s}, optionally times i(n−m)/s."""
    s, d = spec.s, spec.components
    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    shift = (cols[None, :] - np.arange(s)[:, None]) / s
    phase = np.exp(1j * phis[:, None, None] * shift[None])
    if derivative:
        phase = phase * (1j * shift)[None]
    rows = block.reshape(s, d, cols.size, d)
    out = np.zeros((phis.size, s, d, s, d), dtype=complex)
    for q in range(s):
        sel = np.mod(cols, s) == q
        out[:, :, :, q, :] = np.einsum("pmn,manb->pmab", phase[:, :, sel], rows[:, :, sel, :])
    return out.reshape(phis.size, s * d, s * d)


def floquet_stack(spec, phis, frame="standard"):
    """Ū(φ, spec.alpha) for every φ in ``phis``."""
    block, cols = _row_block(spec, frame)
    return _fold(spec, block, cols, phis)


def reduced_floquet_matrix(spec, frame="standard"):
    return floquet_stack(spec, [spec.phi], frame)[0]


def floquet_derivatives(spec, phis=None):
    """(∂Ū/∂φ, ∂Ū/∂α) at ``phis`` (default spec.phi), both from the explicit construction."""
    phis = [spec.phi] if phis is None else phis
    block, cols = _row_block(spec)
    d_phi = _fold(spec, block, cols, phis, derivative=True)
    block_alpha, cols_alpha = _row_block(spec, derivative=True)
    return d_phi, _fold(spec, block_alpha, cols_alpha, phis)


def _eig_unitary(U):
    T, Z = linalg.schur(U, output="complex")
    return np.diag(T).copy(), Z


def _match(reference, vectors):
    overlap = np.abs(reference.conj().T @ vectors) ** 2
    _, columns = optimize.linear_sum_assignment(overlap, maximize=True)
    return columns


def _chord_gaps(eigenvalues):
    n = eigenvalues.shape[-1]
    if n == 1:
        return np.full(eigenvalues.shape[:-1], np.inf)
    diff = np.abs(eigenvalues[..., :, None] - eigenvalues[..., None, :])
    diff = diff + np.where(np.eye(n, dtype=bool), np.inf, 0.0)
    return diff.min(axis=(-2, -1))


def band_spectrum(spec, n_phi=24, n_alpha=24):
    """Eigendecomposition of Ū on a uniform (φ, α) mesh, bands continued by maximal overlap.

    Bands are numbered by quasienergy in [0, 2π) at node (0, 0).
    """
    if spec.s <= 4 and min(n_phi, n_alpha) < 24:
        raise UsageError("meshes below 24x24 under-resolve the bands", n_phi=n_phi, n_alpha=n_alpha)
    phis = TWO_PI * np.arange(n_phi) / n_phi
    alphas = TWO_PI * np.arange(n_alpha) / n_alpha
    size = spec.bands
    values = np.empty((n_phi, n_alpha, size), dtype=complex)
    vectors = np.empty((n_phi, n_alpha, size, size), dtype=complex)
    residual = 0.0

    for j, alpha in enumerate(alphas):
        stack = floquet_stack(replace(spec, alpha=alpha), phis)
        for i in range(n_phi):
            lam, Z = _eig_unitary(stack[i])
            residual = max(residual, float(np.max(np.linalg.norm(stack[i] @ Z - Z * lam, axis=0))))
            values[i, j], vectors[i, j] = lam, Z

    order = np.argsort(np.mod(np.angle(values[0, 0]), TWO_PI), kind="stable")
    values[0, 0], vectors[0, 0] = values[0, 0][order], vectors[0, 0][:, order]
    for i in range(n_phi):
        for j in range(n_alpha):
            if i == 0 and j == 0:
                continue
            reference = vectors[i - 1, 0] if j == 0 else vectors[i, j - 1]
            columns = _match(reference, vectors[i, j])
            values[i, j], vectors[i, j] = values[i, j][columns], vectors[i, j][:, columns]

    if residual > 1e-10:
        logger.warning("eigen-residual %.3g exceeds 1e-10", residual)
    gaps = _chord_gaps(values)
    grid = BandGrid(spec, phis, alphas, np.mod(np.angle(values), TWO_PI), values, vectors, gaps, residual)
    closed = grid.closed_nodes()
    if closed:
        message = f"{len(closed)} mesh nodes have gaps below {DEGENERACY_TOLERANCE:g}, first at {closed[0]}"
        grid.warnings.append(message)
        warnings.warn(message, GapClosureWarning, stacklevel=2)
    return grid


def berry_curvature(grid):
    """B_n = −2 Im Σ_{n′≠n} ⟨n|∂_φŪ†|n′⟩⟨n′|∂_αŪ|n⟩ / |λ_n − λ_n′|²."""
    spec = grid.spec
    size = spec.bands
    B = np.zeros(grid.omega.shape)
    flagged = np.zeros(grid.gaps.shape, dtype=bool)
    off_diagonal = ~np.eye(size, dtype=bool)

    for j, alpha in enumerate(grid.alpha):
        d_phi, d_alpha = floquet_derivatives(replace(spec, alpha=alpha), grid.phi)
        V = grid.vectors[:, j]
        lam = grid.eigenvalues[:, j]
        P_phi = np.einsum("pim,pij,pjn->pmn", V.conj(), d_phi, V)
        P_alpha = np.einsum("pim,pij,pjn->pmn", V.conj(), d_alpha, V)
        chord = np.abs(lam[:, :, None] - lam[:, None, :])
        usable = off_diagonal[None] & (chord >= DEGENERACY_TOLERANCE)
        weight = np.where(usable, 1.0 / np.where(usable, chord, 1.0) ** 2, 0.0)
        B[:, j] = -2.0 * np.imag(np.einsum("pab,pab,pab->pb", P_phi.conj(), P_alpha, weight))
        flagged[:, j] = np.any(off_diagonal[None] & ~usable, axis=(1, 2))
    return CurvatureField(grid.phi, grid.alpha, B, flagged)


def _links(grid):
    """Normalized band-resolved link variables along φ and α, boundaries included."""
    V = grid.vectors
    G = grid.spec.twist()
    forward_phi = np.roll(V, -1, axis=0)
    forward_phi[-1] = np.einsum("ij,ajn->ain", G, V[0])
    forward_alpha = np.roll(V, -1, axis=1)

    u_phi = np.einsum("pajn,pajn->pan", V.conj(), forward_phi)
    u_alpha = np.einsum("pajn,pajn->pan", V.conj(), forward_alpha)
    return u_phi / np.abs(u_phi), u_alpha / np.abs(u_alpha)


def _check_cycle_labels(grid):
    V = grid.vectors
    G = grid.spec.twist()
    identity = np.arange(V.shape[-1])
    for j in range(grid.alpha.size):
        if not np.array_equal(_match(V[-1, j], G @ V[0, j]), identity):
            raise ChernUndefinedError("bands exchange labels around the phi cycle", alpha_index=j)
    for i in range(grid.phi.size):
        if not np.array_equal(_match(V[i, -1], V[i, 0]), identity):
            raise ChernUndefinedError("bands exchange labels around the alpha cycle", phi_index=i)


def chern_numbers(grid):
    """Lattice field-strength Chern numbers with the curvature quadrature alongside."""
    closed = grid.closed_nodes()
    if closed:
        raise ChernUndefinedError(f"gap closes at mesh node {closed[0]}", node=closed[0])
    _check_cycle_labels(grid)
    u_phi, u_alpha = _links(grid)
    plaquette = u_phi * np.roll(u_alpha, -1, axis=0) * np.roll(u_phi, -1, axis=1).conj() * u_alpha.conj()
    flux = -np.angle(plaquette)
    raw = flux.sum(axis=(0, 1)) / TWO_PI
    lattice = np.rint(raw).astype(int)
    if np.max(np.abs(raw - lattice)) > 1e-6:
        logger.warning("lattice Chern sums %s are not integers; refine the mesh", raw)
    quadrature = berry_curvature(grid).quadrature()
    return ChernTable(lattice, quadrature, flux)


def _band_vectors(spec, phis, alpha, reference=None, band=0):
    """Band ``band`` eigenvectors of Ū(φ, α) over ``phis``; tracked from ``reference`` when given."""
    stack = floquet_stack(replace(spec, alpha=alpha), phis)
    values, vectors = np.linalg.eig(stack)
    if reference is None:
        columns = np.empty(phis.size, dtype=int)
        first = np.argsort(np.mod(np.angle(values[0]), TWO_PI), kind="stable")[band]
        columns[0] = first
        previous = vectors[0][:, first]
        for i in range(1, phis.size):
            columns[i] = int(np.argmax(np.abs(vectors[i].conj().T @ previous)))
            previous = vectors[i][:, columns[i]]
    else:
        overlaps = np.abs(np.einsum("pj,pjn->pn", reference.conj(), vectors))
        columns = np.argmax(overlaps, axis=1)
    picked = vectors[np.arange(phis.size), :, columns]
    return picked, _chord_gaps(values).min()


def _parallel_transport(spec, vectors):
    """Smooth phases along φ with the closing twist phase spread evenly."""
    out = vectors.copy()
    for i in range(1, out.shape[0]):
        overlap = np.vdot(out[i - 1], out[i])
        out[i] = out[i] * np.exp(-1j * np.angle(overlap))
    closing = np.angle(np.vdot(out[-1], spec.twist() @ out[0]))
    n = out.shape[0]
    return out * np.exp(1j * closing * np.arange(n) / n)[:, None]


def wannier_state(spec, vectors, L):
    """ψ(m) = (1/N)Σ_i e^{imφ_i/s} v_i[m mod s] on m ∈ [−L, L]."""
    n, s = vectors.shape[0], spec.s
    period = n * s
    if period <= 2 * L + 1:
        raise UsageError(f"{n} phi samples alias on a lattice of {2 * L + 1} sites", n_phi=n, L=L)
    m = np.arange(-L, L + 1)
    psi = np.empty(m.size, dtype=complex)
    for q in range(s):
        seq = np.zeros(period, dtype=complex)
        seq[:n] = vectors[:, q]
        # s·ifft(seq)[m] = (1/N)Σ_i e^{2πi·im/(Ns)} v_i[q], the φ average at m
        profile = s * sfft.ifft(seq)
        sel = np.mod(m, s) == q
        psi[sel] = profile[np.mod(m[sel], period)]
    return psi


def _bloch_components(spec, psi, L, n):
    s = spec.s
    period = n * s
    m = np.arange(-L, L + 1)
    out = np.empty((n, s), dtype=complex)
    for q in range(s):
        seq = np.zeros(period, dtype=complex)
        sel = np.mod(m, s) == q
        seq[np.mod(m[sel], period)] = psi[sel]
        out[:, q] = sfft.fft(seq)[:n]
    return out


def band_projection_weight(spec, psi, L, band_vectors):
    """Share of ``psi`` in the band whose eigenvectors over the φ mesh are ``band_vectors``."""
    components = _bloch_components(spec, psi, L, band_vectors.shape[0])
    inside = np.sum(np.abs(np.einsum("pj,pj->p", band_vectors.conj(), components)) ** 2)
    return float(inside / np.sum(np.abs(components) ** 2))


def thouless_pump(spec, band=0, d_f=1000, L=2048, n_phi=None, chern_mesh=24, progress=False, workers=None):
    """Cycle α through 2π in ``d_f`` kicks starting from the band's Wannier state.

    The series records ⟨I⟩ and the band leakage 1 − Σ|⟨v_n|ũ⟩|²/Σ‖ũ‖² after
    each kick; the prediction is −s·C_n.
    """
    if spec.spin is not None:
        raise UsageError("the pump runs the spinless rotor only")
    if not 0 <= band < spec.bands:
        raise UsageError(f"band {band} outside [0, {spec.bands})", band=band)
    messages = []
    if spec.bands > 1:
        with warnings.catch_warnings(record=True) as caught:
            warnings.simplefilter("always")
            table = chern_numbers(band_spectrum(replace(spec, alpha=0.0), chern_mesh, chern_mesh))
        messages.extend(str(w.message) for w in caught)
        chern = int(table.lattice[band])
    else:
        chern = 0

    n = max(n_phi or 0, (2 * L + 1) // spec.s + 1)
    phis = TWO_PI * np.arange(n) / n
    tracked, min_gap = _band_vectors(spec, phis, 0.0, band=band)
    tracked = _parallel_transport(spec, tracked)
    psi = wannier_state(spec, tracked, L)
    state = RotorState(L, (psi / np.linalg.norm(psi))[None, :])

    m = np.arange(-L, L + 1)
    forward, backward = free_phases(spec.T0, m), free_phases(spec.T0, m).conj()
    second = Propagator(FloquetSpec(spec.T0, Cosine(spec.k)), L, workers)

    rows = {"alpha": [0.0], "meanI": [observables(state).mean_I], "leakage": [0.0]}
    amplitudes = state.amplitudes
    for d in range(1, d_f + 1):
        alpha = TWO_PI * d / d_f
        first = Propagator(FloquetSpec(spec.T0, CosinePhase(spec.k, alpha)), L, workers)
        amplitudes = backward * second.kick(forward * first.kick(amplitudes, d), d)
        state = replace(state, amplitudes=amplitudes)

        tracked, gap = _band_vectors(spec, phis, alpha, reference=tracked)
        min_gap = min(min_gap, gap)
        leakage = 1.0 - band_projection_weight(spec, amplitudes[0], L, tracked)
        rows["alpha"].append(alpha)
        rows["meanI"].append(observables(state).mean_I)
        rows["leakage"].append(leakage)
        if progress and d % max(1, d_f // 10) == 0:
            logger.info("pump step %d/%d, <I>=%.4f", d, d_f, rows["meanI"][-1])

    series = series_frame(np.arange(d_f + 1), **rows)
    max_leakage = float(np.max(series["leakage"]))
    if max_leakage > LEAKAGE_LIMIT or min_gap < DEGENERACY_TOLERANCE:
        message = f"band leakage reached {max_leakage:.3f} (min gap {min_gap:.2g}); the cycle is not adiabatic"
        messages.append(message)
        warnings.warn(message, AdiabaticityWarning, stacklevel=2)
    delta_I = float(series["meanI"].iloc[-1] - series["meanI"].iloc[0])
    return PumpResult(series, band, delta_I, chern, -spec.s * chern, max_leakage, messages)


def az_symmetry_check(spec, phis=None):
    """Operator-norm residuals of the three AZ relations in the symmetric (half-kick) frame.

    T = σ_y𝒦, Γ = (−1)^m and C = ΓT. The parity (−1)^m = e^{imsπ/s} carries sector φ
    to φ + sπ, so the reduced relations read

        T: Y Ū(φ)* Y† = Ū(−φ)†,  C: Y Ū(φ)* Y† = Ū(sπ − φ),  Γ: Ū(φ + sπ) = Ū(φ)†

    with Y = 1⊗σ_y. For even s the shift is the twist G^{s/2} = diag((−1)^q).
    """
    if spec.spin is None:
        raise UsageError("AZ checks need the spin-1/2 rotor")
    phis = np.linspace(0.0, TWO_PI, 8, endpoint=False) + 0.37 if phis is None else np.asarray(phis, dtype=float)
    shift = spec.s * np.pi
    Y = np.kron(np.eye(spec.s), SIGMA_Y)
    here = floquet_stack(spec, phis, frame="symmetric")
    mirrored = floquet_stack(spec, -phis, frame="symmetric")
    shifted = floquet_stack(spec, phis + shift, frame="symmetric")
    mirrored_shifted = floquet_stack(spec, shift - phis, frame="symmetric")
    worst = {"T": 0.0, "C": 0.0, "Gamma": 0.0}
    for U, V, S, W in zip(here, mirrored, shifted, mirrored_shifted):
        turned = Y @ U.conj() @ Y.conj().T
        checks = {
            "T": turned - V.conj().T,
            "C": turned - W,
            "Gamma": S - U.conj().T,
        }
        for name, diff in checks.items():
            worst[name] = max(worst[name], float(np.linalg.norm(diff, 2)))
    return worst
