"""Kicked-rotor simulations: classical maps, quantum Floquet dynamics and their diagnostics."""

__version__ = "0.1.0"
