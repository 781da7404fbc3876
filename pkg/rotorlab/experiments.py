"""Experiment registry: parameter schemas and the runs behind each experiment id."""

import logging
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np
import pandas as pd

from rotorlab import anderson, classical_maps, coupled, diagnostics, kepler, nonhermitian, pseudoclassical, topology
from rotorlab.config import Param
from rotorlab.data import amplitude_frame, distribution_frame
from rotorlab.errors import ConfigError, ExtendedStateError, FitError, ProfileError, UsageError
from rotorlab.potentials import TWO_PI, Cosine, Sawtooth
from rotorlab.quantum_engine import FloquetSpec, evolve, init_state, observables, quasiperiodic_run, spinor_qhe_run

logger = logging.getLogger(__name__)


@dataclass
class Outcome:
    frames: dict
    diagnostics: dict = field(default_factory=dict)
    warnings: list = field(default_factory=list)


@dataclass(frozen=True)
class Experiment:
    name: str
    summary: str
    params: tuple
    runner: Callable
    target: Callable
    derived: tuple = ()

    def param_names(self):
        return [p.name for p in self.params]


def _fit_or_reason(fit, *args, **kwargs):
    try:
        return fit(*args, **kwargs), None
    except (UsageError, FitError, ProfileError, ExtendedStateError) as exc:
        logger.warning("%s: %s", fit.__name__, exc)
        return None, str(exc)


def _saturation_time(series, column="energy", start=300, stride=100):
    t = series["t"].to_numpy()
    y = series[column].to_numpy()
    for cut in range(start, int(t[-1]) + 1, stride):
        mask = t <= cut
        if mask.sum() >= 30 and diagnostics.is_saturated(t[mask], y[mask]):
            return cut
    return None


def _quantum_outcome(run, k_pred=None):
    """Series plus final distribution for a single-rotor run, with localization fits."""
    final = run.final
    prob = observables(final).prob
    frames = {"series": run.series, "distribution": distribution_frame(final.m, prob)}
    result = {
        "final_energy": float(run.series["energy"].iloc[-1]),
        "saturated": bool(diagnostics.is_saturated(run.series["t"], run.series["energy"]))
        if len(run.series) >= 3 else False,
        "t_saturated": _saturation_time(run.series),
        "spill_events": list(run.spill_events),
    }
    fit, reason = _fit_or_reason(diagnostics.fit_localization_length, prob, final.m)
    if fit is not None:
        result.update(localization_length=fit.length, localization_r2=fit.r_squared,
                      localization_stderr=fit.stderr)
    else:
        result["localization_fit_error"] = reason
    if k_pred is not None:
        result["l_pred"] = 0.5 * k_pred ** 2
    return Outcome(frames, result, list(run.warnings))


def run_classical_diffusion(p, seed, workers, progress):
    pot = Cosine(p["K"])
    ensemble = classical_maps.Ensemble.uniform_angles(p["n_traj"], p["J0"], seed)
    run = classical_maps.evolve_ensemble(ensemble, pot, p["steps"], progress=progress)
    start = p["steps"] // 5
    result = {"D_pred": float(classical_maps.rechester_white_estimate(p["K"]))}
    if p["K"] > 0.0:
        fit = classical_maps.diffusion_coefficient(run.series, (start, p["steps"]))
        result.update(D=fit.D, D_stderr=fit.stderr, D_r2=fit.r_squared)
        lyapunov = classical_maps.max_lyapunov(pot, classical_maps.PhasePoint(1.0, 0.3))
        result.update(lyapunov=lyapunov.value, lyapunov_spread=lyapunov.spread,
                      lyapunov_pred=math.log(0.5 * p["K"]) if p["K"] > 2.0 else None)
    frames = {"series": run.series}
    if p["section_seeds"] > 0:
        seeds = [classical_maps.PhasePoint(0.5, TWO_PI * (j + 0.5) / p["section_seeds"])
                 for j in range(p["section_seeds"])]
        cloud = classical_maps.poincare_section(pot, seeds, p["section_steps"])
        frames["section"] = cloud.frame
        result["max_excursion"] = float(cloud.excursion.max())
    return Outcome(frames, result)


def run_qkr_localization(p, seed, workers, progress):
    spec = FloquetSpec(p["T"], Cosine(p["k"]))
    run = evolve(init_state(p["L"], m0=p["m0"]), spec, p["steps"], p["record_every"], progress, workers)
    return _quantum_outcome(run, p["k"])


def run_resonance(p, seed, workers, progress):
    T = 2.0 * TWO_PI * p["r"] / p["s"]
    run = evolve(init_state(p["L"]), FloquetSpec(T, Cosine(p["k"])), p["steps"], 1, progress, workers)
    series = run.series
    result = {"T": T, "final_energy": float(series["energy"].iloc[-1])}
    if p["s"] == 1:
        t = series["t"].to_numpy(dtype=float)[1:]
        expected = 0.25 * p["k"] ** 2 * t ** 2
        result["max_relative_error"] = float(np.max(np.abs(series["energy"].to_numpy()[1:] - expected) / expected))
    fit, reason = _fit_or_reason(diagnostics.fit_growth_law, series, (1, p["steps"]))
    if fit is not None:
        result.update(growth_law=fit.law, growth_exponent=fit.exponent, growth_coefficient=fit.coefficient)
    else:
        result["growth_fit_error"] = reason
    return Outcome({"series": series, "final": amplitude_frame(run.final.m, run.final.amplitudes[0])},
                   result, list(run.warnings))


def run_antiresonance(p, seed, workers, progress):
    spec = FloquetSpec(TWO_PI, Cosine(p["k"]))
    state = init_state(p["L"])
    two = evolve(state, spec, 2, workers=workers).final
    run = evolve(state, spec, p["steps"], 1, progress, workers)
    error = float(np.max(np.abs(two.amplitudes - state.amplitudes)))
    return Outcome({"series": run.series}, {"return_error": error, "max_energy": float(run.series["energy"].max())},
                   list(run.warnings))


def run_anderson_bridge(p, seed, workers, progress):
    pot = Cosine(p["k"])
    chain = anderson.build_chain(pot, p["T"], p["eps"], (-p["n_max"], p["n_max"]), p["l_max"] or None)
    result = {"E": chain.E, "truncated_weight": chain.hoppings.truncated_weight}
    q = anderson.is_rational_period(p["T"])
    result["period_q"] = q
    if q is not None and chain.W.size > q:
        result["period_defect"] = float(np.max(np.abs(chain.W[q:] - chain.W[:-q])))
    try:
        fit = anderson.tb_localization_length(chain, method=p["method"])
        result.update(l_tb=fit.length, l_tb_r2=fit.r_squared, convention=fit.convention)
    except ExtendedStateError as exc:
        result["extended"] = str(exc)
    if p["dyn_steps"] > 0:
        run = evolve(init_state(p["dyn_L"]), FloquetSpec(p["T"], pot), p["dyn_steps"], 10, progress, workers)
        prob = observables(run.final).prob
        fit, reason = _fit_or_reason(diagnostics.fit_localization_length, prob, run.final.m)
        if fit is not None:
            result["l_dyn"] = fit.length
            if "l_tb" in result:
                result["l_dyn_over_2l_tb"] = fit.length / (2.0 * result["l_tb"])
        else:
            result["l_dyn_error"] = reason
    return Outcome({"chain": chain.to_frame(), "hoppings": chain.hoppings.to_frame()}, result)


def run_pseudoclassical_dkr(p, seed, workers, progress):
    frames, result = [], {}
    t_exp = []
    for delta in p["delta_values"]:
        run = pseudoclassical.exponential_spreading(p["K"], delta, p["n_points"], p["steps"] or None, seed)
        series = run.series.copy()
        series.insert(1, "delta", delta)
        frames.append(series)
        t_exp.append(run.t_exp_measured)
        result[f"slope[{delta!r}]"] = run.slope
        result[f"t_exp[{delta!r}]"] = run.t_exp_measured
        result["lambda_numeric"] = run.report.lambda_numeric
        result["lambda_closed_form"] = run.report.lambda_closed_form
    if len(t_exp) > 1:
        gaps = np.diff(t_exp) * result["lambda_numeric"]
        steps_ln10 = np.abs(np.diff(np.log(p["delta_values"])))
        result["t_exp_gap_over_ln_ratio"] = [float(g / s) for g, s in zip(gaps, steps_ln10)]
    return Outcome({"spreading": pd.concat(frames, ignore_index=True)}, result)


def run_gauss_sums(p, seed, workers, progress):
    sums = pseudoclassical.gauss_sums(p["r"], p["s"])
    weight = float(np.sum(np.abs(sums.coefficients) ** 2))
    return Outcome({"gauss": sums.to_frame()}, {"bands": sums.bands, "total_weight": weight,
                                               "bloch_phases": sums.bloch_phases.tolist()})


def _resonant_spec(p):
    return topology.ResonantDKRSpec(r=p["r"], s=p["s"], k=p["k"])


def run_chern_scan(p, seed, workers, progress):
    spec = _resonant_spec(p)
    grid = topology.band_spectrum(spec, p["n_phi"], p["n_alpha"])
    table = topology.chern_numbers(grid)
    result = {
        "chern": [int(c) for c in table.lattice],
        "chern_quadrature": table.quadrature.tolist(),
        "chern_sum": int(np.sum(table.lattice)),
        "min_gap": grid.min_gap,
        "residual": grid.residual,
    }
    curvature = topology.berry_curvature(grid)
    return Outcome({"chern": table.to_frame(), "bands": grid.to_frame(), "curvature": curvature.to_frame()},
                   result, list(grid.warnings))


def run_thouless_pump(p, seed, workers, progress):
    spec = _resonant_spec(p)
    pump = topology.thouless_pump(spec, p["band"], p["d_f"], p["L"], chern_mesh=p["chern_mesh"],
                                  progress=progress, workers=workers)
    result = {"delta_I": pump.delta_I, "chern": pump.chern, "prediction": pump.prediction,
              "max_leakage": pump.max_leakage}
    if pump.prediction != 0:
        result["relative_error"] = abs(pump.delta_I - pump.prediction) / abs(pump.prediction)
    return Outcome({"series": pump.series}, result, list(pump.warnings))


def run_coupled_entanglement(p, seed, workers, progress):
    spec = coupled.CoupledSpec(p["K1"], p["K2"], p["xi"])
    state = coupled.TwoRotorState.delta(p["L1"], p["L2"])
    run = coupled.evolve_coupled(state, spec, p["steps"], p["record_every"], progress, workers)
    last = run.series.iloc[-1]
    result = {"final_SvN": float(last["SvN"]), "final_Slin": float(last["Slin"]),
              "final_E1": float(last["E1"]), "final_E2": float(last["E2"]),
              "max_SvN_bound": coupled.saturation_bound(run.final)}
    if p["xi"] > 0.0:
        fits, reason = _fit_or_reason(coupled.entanglement_growth_fits, run.series)
        if fits is not None:
            result.update(early_slope=fits.early_slope, svn_log_slope=fits.svn_log_slope,
                          deficit_exponent=fits.deficit_exponent)
        else:
            result["growth_fit_error"] = reason
    return Outcome({"series": run.series}, result, list(run.warnings))


def run_nh_spectrum(p, seed, workers, progress):
    spectrum = nonhermitian.nh_floquet_spectrum(p["k"], p["T"], p["gamma"], p["L"])
    result = {
        "mean_abs_log": spectrum.mean_abs_log,
        "mean_positive_log": spectrum.mean_positive_log,
        "max_log": spectrum.max_log,
        "is_real": spectrum.is_real,
        "extended": spectrum.extended,
    }
    if p["gamma_grid"]:
        threshold = nonhermitian.pt_threshold(p["k"], p["T"], p["L"], p["gamma_grid"])
        result["threshold"] = {"gamma_pt": threshold.gamma_pt, "interval": list(threshold.interval),
                               "xi": threshold.xi, "tanh_inverse_xi": threshold.theory, "crossed": threshold.crossed}
    return Outcome({"spectrum": spectrum.to_frame()}, result)


def run_nh_ratchet(p, seed, workers, progress):
    fit = nonhermitian.ratchet_velocity(p["k"], p["T"], p["gamma"], p["steps"], p["L"], workers)
    result = {"velocity": fit.velocity, "r_squared": fit.r_squared, "window": list(fit.window),
              "norm_growth_rate": nonhermitian.norm_growth_rate(fit.series)}
    return Outcome({"series": fit.series}, result)


def run_kepler_threshold(p, seed, workers, progress):
    table = kepler.threshold_curve(p["omega0_values"], p["n0"], p["n_traj"], p["steps"], seed=seed,
                                   quantum=p["quantum"])
    ratio = (table["eps_threshold"] / table["eps0c"]).tolist()
    return Outcome({"thresholds": table}, {"threshold_over_eps0c": ratio})


def run_quasiperiodic_transition(p, seed, workers, progress):
    run = quasiperiodic_run(p["K"], p["epsilon"], p["omega2"], p["omega3"], p["hbar_eff"], p["steps"], p["L"],
                            record_every=p["record_every"], workers=workers)
    outcome = _quantum_outcome(run)
    fit, reason = _fit_or_reason(diagnostics.fit_growth_law, run.series, (1, p["steps"]))
    outcome.diagnostics["growth_law"] = fit.law if fit is not None else reason
    if fit is not None:
        outcome.diagnostics["growth_exponent"] = fit.exponent
    return outcome


def run_qhe_energy_growth(p, seed, workers, progress):
    run = spinor_qhe_run(p["L"], p["hbar_eff"], p["omega_tilde"], p["steps"], p["theta2_samples"],
                         record_every=p["record_every"], workers=workers)
    result = {"final_energy": float(run.series["energy"].iloc[-1])}
    fit, reason = _fit_or_reason(diagnostics.fit_growth_law, run.series, (1, p["steps"]))
    if fit is not None:
        result.update(growth_law=fit.law, growth_exponent=fit.exponent)
    else:
        result["growth_fit_error"] = reason
    return Outcome({"series": run.series}, result, list(run.warnings))


def run_sawtooth_localization(p, seed, workers, progress):
    spec = FloquetSpec(p["T"], Sawtooth(p["k"]))
    run = evolve(init_state(p["L"]), spec, p["steps"], p["record_every"], progress, workers)
    outcome = _quantum_outcome(run)
    outcome.diagnostics["K"] = p["k"] * p["T"]
    return outcome


EXPERIMENTS = {e.name: e for e in (
    Experiment("classical-diffusion", "standard-map ensemble diffusion and Lyapunov exponent", (
        Param("K", "float", 10.0, "kick strength"),
        Param("n_traj", "int", 10_000, "trajectories"),
        Param("steps", "int", 1000, "map iterations"),
        Param("J0", "float", 0.0, "initial momentum"),
        Param("section_seeds", "int", 0, "Poincare seeds, 0 to skip the section"),
        Param("section_steps", "int", 500, "iterations per Poincare seed"),
    ), run_classical_diffusion, classical_maps.evolve_ensemble, ("ensemble", "pot")),
    Experiment("qkr-localization", "dynamical localization of the quantum kicked rotor", (
        Param("k", "float", 20.0, "kick strength"),
        Param("T", "float", 0.25, "kick period"),
        Param("L", "int", 8192, "momentum cutoff"),
        Param("steps", "int", 3000, "kicks"),
        Param("record_every", "int", 1, "series stride"),
        Param("m0", "int", 0, "initial momentum"),
    ), run_qkr_localization, evolve, ("state", "spec")),
    Experiment("resonance", "quadratic energy growth at T = 4*pi*r/s", (
        Param("k", "float", 3.0, "kick strength"),
        Param("r", "int", 1, "resonance numerator"),
        Param("s", "int", 1, "resonance denominator"),
        Param("L", "int", 512, "momentum cutoff"),
        Param("steps", "int", 50, "kicks"),
    ), run_resonance, evolve, ("state", "spec")),
    Experiment("antiresonance", "period-two return at T = 2*pi", (
        Param("k", "float", 5.0, "kick strength"),
        Param("L", "int", 256, "momentum cutoff"),
        Param("steps", "int", 10, "kicks"),
    ), run_antiresonance, evolve, ("state", "spec")),
    Experiment("anderson-bridge", "tight-binding chain of the Floquet eigenproblem", (
        Param("k", "float", 3.0, "kick strength"),
        Param("T", "float", 2.0, "kick period"),
        Param("eps", "float", 0.0, "quasienergy"),
        Param("n_max", "int", 200, "chain half-length"),
        Param("l_max", "int", 0, "hopping range, 0 for automatic"),
        Param("method", "str", "eigvec_decay", "eigvec_decay or transfer_matrix_nn"),
        Param("dyn_steps", "int", 0, "kicks of the dynamical comparison, 0 to skip"),
        Param("dyn_L", "int", 1024, "momentum cutoff of the dynamical comparison"),
    ), run_anderson_bridge, anderson.build_chain, ("pot", "n_range")),
    Experiment("pseudoclassical-dkr", "exponential spreading of the double-kick map near (0, pi)", (
        Param("K", "float", 0.005, "kick strength"),
        Param("delta_values", "floats", [0.1, 0.01, 0.001], "momentum widths"),
        Param("n_points", "int", 10_000, "ensemble size"),
        Param("steps", "int", 0, "iterations, 0 for 1.5 t_exp + 50"),
    ), run_pseudoclassical_dkr, pseudoclassical.exponential_spreading, ("delta",)),
    Experiment("gauss-sums", "Gaussian-sum band coefficients at T = 2*pi*r/s", (
        Param("r", "int", 1, "numerator"),
        Param("s", "int", 3, "denominator"),
    ), run_gauss_sums, pseudoclassical.gauss_sums),
    Experiment("chern-scan", "band Chern numbers of the resonant double-kicked rotor", (
        Param("r", "int", 1, "numerator of T0/2pi"),
        Param("s", "int", 3, "denominator of T0/2pi"),
        Param("k", "float", 2.0, "kick strength"),
        Param("n_phi", "int", 48, "phi mesh"),
        Param("n_alpha", "int", 48, "alpha mesh"),
    ), run_chern_scan, topology.band_spectrum, ("spec",)),
    Experiment("thouless-pump", "adiabatic pump of a Wannier state over one alpha cycle", (
        Param("r", "int", 1, "numerator of T0/2pi"),
        Param("s", "int", 3, "denominator of T0/2pi"),
        Param("k", "float", 2.0, "kick strength"),
        Param("band", "int", 0, "pumped band"),
        Param("d_f", "int", 1000, "kicks per cycle"),
        Param("L", "int", 2048, "momentum cutoff"),
        Param("chern_mesh", "int", 24, "mesh of the Chern reference"),
    ), run_thouless_pump, topology.thouless_pump, ("spec",)),
    Experiment("coupled-entanglement", "energies and entanglement of two coupled rotors", (
        Param("K1", "float", 9.0, "first kick strength"),
        Param("K2", "float", 10.0, "second kick strength"),
        Param("xi", "float", 0.1, "coupling"),
        Param("L1", "int", 512, "first cutoff"),
        Param("L2", "int", 512, "second cutoff"),
        Param("steps", "int", 1000, "kicks"),
        Param("record_every", "int", 5, "series stride"),
    ), run_coupled_entanglement, coupled.evolve_coupled, ("state", "spec")),
    Experiment("nh-spectrum", "quasienergy spectrum of the PT-symmetric rotor", (
        Param("k", "float", 3.0, "kick strength"),
        Param("T", "float", 1.4, "kick period"),
        Param("gamma", "float", 0.01, "gain/loss"),
        Param("L", "int", 128, "momentum cutoff"),
        Param("gamma_grid", "floats", [], "threshold grid, empty to skip"),
    ), run_nh_spectrum, nonhermitian.nh_floquet_spectrum),
    Experiment("nh-ratchet", "directed transport of the PT rotor at resonance", (
        Param("k", "float", 3.0, "kick strength"),
        Param("T", "float", math.pi / 3.0, "kick period"),
        Param("gamma", "float", 1.0 / 30.0, "gain/loss"),
        Param("steps", "int", 200, "kicks"),
        Param("L", "int", 2048, "momentum cutoff"),
    ), run_nh_ratchet, nonhermitian.ratchet_velocity),
    Experiment("kepler-threshold", "10% ionization thresholds of the Kepler map", (
        Param("omega0_values", "floats", [1.5, 2.0, 3.0], "scaled frequencies"),
        Param("n0", "float", 60.0, "initial principal action"),
        Param("n_traj", "int", 1000, "trajectories"),
        Param("steps", "int", 1000, "kicks"),
        Param("quantum", "bool", False, "also scan the quantized linear map"),
    ), run_kepler_threshold, kepler.threshold_curve),
    Experiment("quasiperiodic-transition", "quasiperiodic kicked rotor near its transition", (
        Param("K", "float", 6.4, "kick strength"),
        Param("epsilon", "float", 0.8, "modulation depth"),
        Param("omega2", "float", TWO_PI * math.sqrt(5.0), "first modulation frequency"),
        Param("omega3", "float", TWO_PI * math.sqrt(13.0), "second modulation frequency"),
        Param("hbar_eff", "float", 2.89, "effective Planck constant"),
        Param("L", "int", 2048, "momentum cutoff"),
        Param("steps", "int", 1000, "kicks"),
        Param("record_every", "int", 1, "series stride"),
    ), run_quasiperiodic_transition, quasiperiodic_run),
    Experiment("qhe-energy-growth", "theta2-averaged energy of the spin-1/2 rotor", (
        Param("hbar_eff", "float", 1.0, "effective Planck constant"),
        Param("omega_tilde", "float", math.pi * (math.sqrt(5.0) - 1.0), "phase velocity of theta2"),
        Param("L", "int", 1024, "momentum cutoff"),
        Param("steps", "int", 500, "kicks"),
        Param("theta2_samples", "int", 8, "theta2 samples"),
        Param("record_every", "int", 1, "series stride"),
    ), run_qhe_energy_growth, spinor_qhe_run),
    Experiment("sawtooth-localization", "quantum sawtooth map", (
        Param("k", "float", 1.5, "kick strength"),
        Param("T", "float", 1.0, "kick period"),
        Param("L", "int", 4096, "momentum cutoff"),
        Param("steps", "int", 1000, "kicks"),
        Param("record_every", "int", 1, "series stride"),
    ), run_sawtooth_localization, evolve, ("state", "spec")),
)}


def get_experiment(name):
    try:
        return EXPERIMENTS[name]
    except KeyError:
        raise ConfigError(f"unknown experiment {name!r}; see list-experiments", experiment=name)


def list_experiments():
    return [(e.name, e.summary) for e in EXPERIMENTS.values()]
