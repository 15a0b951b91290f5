"""Wavelet-Galerkin solver for Wigner equations with polynomial Hamiltonians."""

__version__ = "0.1.0"
