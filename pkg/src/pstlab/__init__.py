"""Continuous-time quantum walks on graphs: spectra, fidelity and perfect state transfer."""

__version__ = "0.1.0"
