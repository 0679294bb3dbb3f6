"""Finite-space weight characteristics, maximal operators and extrapolation harness."""
__version__ = "0.1.0"
