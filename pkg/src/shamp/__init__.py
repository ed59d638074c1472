"""Spectral simulation and kernel-norm verification for the linear stochastic
Swift-Hohenberg equation and its amplitude equation."""

__version__ = "0.1.0"
