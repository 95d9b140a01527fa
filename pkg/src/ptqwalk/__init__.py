"""Gain-loss (PT-symmetric) discrete-time quantum walks: operators, band theory,
symmetry checks, time evolution and spectra."""

__version__ = "0.1.0"
