"""Regularized (XP)^2 model: classical, semiclassical and quantum solvers."""

__version__ = "0.1.0"
