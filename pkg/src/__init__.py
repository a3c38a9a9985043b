"""Hermite Kinetics - Hermite spectral solvers for kinetic equations."""

__version__ = "0.1.0"
