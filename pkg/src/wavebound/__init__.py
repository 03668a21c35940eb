"""Numerical laboratory for the 1-D wave equation with time-dependent speed.

Solves u_tt = a(t)^2 u_xx for compactly supported data, tracks the
antiderivative field and both energies, evaluates the closed-form bounds on
the solution norm, and fits the norm growth when no bound applies.
"""

from wavebound.config import ExperimentConfig
from wavebound.coefficients import CoefficientProfile, classify, get_profile
from wavebound.initial_data import InitialData, bound_constant, get_data
from wavebound.solver import init_grid, run

__version__ = "0.1.0"

__all__ = [
    "CoefficientProfile",
    "ExperimentConfig",
    "InitialData",
    "bound_constant",
    "classify",
    "get_data",
    "get_profile",
    "init_grid",
    "run",
    "__version__",
]
