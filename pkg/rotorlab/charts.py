from dataclasses import dataclass
from typing import Callable

import plotly.graph_objects as go

TEMPLATE = "plotly_dark"


@dataclass(frozen=True)
class FigureSpec:
    sources: dict
    builder: Callable
    scales: dict


def plot_localization(frames):
    df = frames["distribution"]
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df["m"], y=df["prob"], mode='lines', name='P(m)'))
    fig.update_layout(
        title='Momentum Distribution',
        xaxis_title='m',
        yaxis_title='P(m)',
        yaxis_type='log',
        template=TEMPLATE
    )
    return fig


def plot_energy(frames):
    df = frames["series"]
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df["t"], y=df["energy"], mode='lines', name='E(t)'))
    fig.update_layout(
        title='Kinetic Energy',
        xaxis_title='t',
        yaxis_title='E',
        template=TEMPLATE
    )
    return fig


def plot_dk_exponential(frames):
    df = frames["spreading"]
    fig = go.Figure()
    for delta, group in df.groupby("delta", sort=False):
        fig.add_trace(go.Scatter(x=group["t"], y=group["lnJ2"], mode='lines', name=f"delta={delta:g}"))
    fig.update_layout(
        title='Double-Kick Exponential Spreading',
        xaxis_title='t',
        yaxis_title='ln <J^2>',
        template=TEMPLATE
    )
    return fig


def plot_pump(frames):
    df = frames["series"]
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df["alpha"], y=df["meanI"], mode='lines', name='<I>'))
    fig.add_trace(go.Scatter(x=df["alpha"], y=df["leakage"], mode='lines', name='leakage', yaxis='y2'))
    fig.update_layout(
        title='Pumped Angular Momentum',
        xaxis_title='alpha',
        yaxis_title='<I>',
        yaxis2=dict(title='leakage', overlaying='y', side='right'),
        template=TEMPLATE
    )
    return fig


def plot_chern(frames):
    bands = frames["bands"]
    table = frames["chern"]
    first = bands["alpha"].min()
    cut = bands[bands["alpha"] == first]
    fig = go.Figure()
    for band, group in cut.groupby("band"):
        chern = table.loc[table["band"] == band, "C_lattice"]
        label = f"band {band}" if chern.empty else f"band {band} (C={int(round(chern.iloc[0]))})"
        fig.add_trace(go.Scatter(x=group["phi"], y=group["omega"], mode='lines+markers', name=label))
    fig.update_layout(
        title='Quasienergy Bands',
        xaxis_title='phi',
        yaxis_title='omega',
        template=TEMPLATE
    )
    return fig


def plot_entanglement(frames):
    df = frames["series"]
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df["t"], y=df["SvN"], mode='lines', name='S_vN'))
    fig.add_trace(go.Scatter(x=df["t"], y=df["Slin"], mode='lines', name='S_lin'))
    fig.update_layout(
        title='Entanglement Growth',
        xaxis_title='t',
        yaxis_title='S',
        xaxis_type='log',
        template=TEMPLATE
    )
    return fig


def plot_nh_spectrum(frames):
    df = frames["spectrum"]
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df["re_eps"], y=df["log_abs_lambda"], mode='markers', name='eigenvalues'))
    fig.update_layout(
        title='Non-Hermitian Quasienergies',
        xaxis_title='Re eps',
        yaxis_title='ln |lambda|',
        template=TEMPLATE
    )
    return fig


def plot_ratchet(frames):
    df = frames["series"]
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df["t"], y=df["meanI"], mode='lines', name='<I>'))
    fig.update_layout(
        title='Ratchet Current',
        xaxis_title='t',
        yaxis_title='<I>',
        template=TEMPLATE
    )
    return fig


def plot_kepler_threshold(frames):
    df = frames["thresholds"]
    fig = go.Figure()
    for column, name in (("eps_threshold", "10% threshold"), ("eps0c", "chaos border"), ("eps_q", "quantum border")):
        fig.add_trace(go.Scatter(x=df["omega0"], y=df[column], mode='lines+markers', name=name))
    fig.update_layout(
        title='Ionization Thresholds',
        xaxis_title='omega0',
        yaxis_title='eps0',
        yaxis_type='log',
        template=TEMPLATE
    )
    return fig


def plot_poincare(frames):
    df = frames["section"]
    fig = go.Figure()
    fig.add_trace(go.Scattergl(x=df["theta"], y=df["J"], mode='markers', marker=dict(size=2, color=df["seed_id"]),
                               name='section'))
    fig.update_layout(
        title='Poincare Section',
        xaxis_title='theta',
        yaxis_title='J',
        template=TEMPLATE
    )
    return fig


def plot_diffusion(frames):
    df = frames["series"]
    fig = go.Figure()
    fig.add_trace(go.Scatter(x=df["t"], y=df["varJ"], mode='lines', name='<(dJ)^2>'))
    fig.update_layout(
        title='Momentum Diffusion',
        xaxis_title='t',
        yaxis_title='<(dJ)^2>',
        template=TEMPLATE
    )
    return fig


FIGURES = {
    "localization": FigureSpec({"distribution": ("m", "prob")}, plot_localization, {"y": "log"}),
    "energy": FigureSpec({"series": ("t", "energy")}, plot_energy, {}),
    "dk-exponential": FigureSpec({"spreading": ("t", "delta", "lnJ2")}, plot_dk_exponential, {}),
    "pump": FigureSpec({"series": ("t", "alpha", "meanI", "leakage")}, plot_pump, {}),
    "chern": FigureSpec({"bands": ("phi", "alpha", "band", "omega"), "chern": ("band", "C_lattice")},
                        plot_chern, {}),
    "entanglement": FigureSpec({"series": ("t", "SvN", "Slin")}, plot_entanglement, {"x": "log"}),
    "nh-spectrum": FigureSpec({"spectrum": ("re_eps", "log_abs_lambda")}, plot_nh_spectrum, {}),
    "ratchet": FigureSpec({"series": ("t", "meanI")}, plot_ratchet, {}),
    "kepler-threshold": FigureSpec({"thresholds": ("omega0", "eps_threshold", "eps0c", "eps_q")},
                                   plot_kepler_threshold, {"y": "log"}),
    "poincare": FigureSpec({"section": ("seed_id", "theta", "J")}, plot_poincare, {}),
    "diffusion": FigureSpec({"series": ("t", "varJ")}, plot_diffusion, {}),
}
