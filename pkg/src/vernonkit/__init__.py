"""Feynman-Vernon kernels for a system coupled to a bath through a cavity mode."""

from .errors import ConfigError, GridError, ModelError, NumericalError, VernonError
from .numgrid import (
    LagGrid,
    SampledKernel,
    Spectrum,
    TimeGrid,
    TwoTimeKernel,
    differentiate,
    forward_fourier,
    inverse_fourier,
    quad_integral,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "GridError",
    "ModelError",
    "NumericalError",
    "VernonError",
    "LagGrid",
    "SampledKernel",
    "Spectrum",
    "TimeGrid",
    "TwoTimeKernel",
    "differentiate",
    "forward_fourier",
    "inverse_fourier",
    "quad_integral",
]
