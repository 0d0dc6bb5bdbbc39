"""Uniform grids, sampled kernels and the Fourier / quadrature substrate.

Fourier convention used throughout the package::

    k_hat(nu) = int exp(+i nu tau) k(tau) dtau
    k(tau)    = (1 / 2 pi) int exp(-i nu tau) k_hat(nu) dnu

Lag grids are odd-sized and symmetric about ``tau = 0`` so the discrete
transform pair is an exact round trip and the conjugate frequency grid is
symmetric about ``nu = 0`` as well.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Optional, Union

import numpy as np

from .errors import GridError

Parity = Literal["even", "odd", "none"]

__all__ = [
    "TimeGrid",
    "LagGrid",
    "SampledKernel",
    "TwoTimeKernel",
    "Spectrum",
    "forward_fourier",
    "inverse_fourier",
    "differentiate",
    "quad_integral",
    "trapezoid_weights",
    "simpson_weights",
    "conjugate_frequencies",
]


def _finite(values: np.ndarray, what: str) -> None:
    if not np.all(np.isfinite(values)):
        raise GridError(f"{what} contains NaN or infinite samples")


@dataclass(frozen=True)
class TimeGrid:
    """Uniform grid ``t_start, ..., t_end`` with ``n_points`` samples."""

    t_start: float
    t_end: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 2:
            raise GridError(f"TimeGrid needs n_points >= 2, got {self.n_points}")
        if not (np.isfinite(self.t_start) and np.isfinite(self.t_end)):
            raise GridError(f"TimeGrid bounds must be finite, got [{self.t_start}, {self.t_end}]")
        if not self.t_end > self.t_start:
            raise GridError(
                f"TimeGrid needs t_end > t_start, got [{self.t_start}, {self.t_end}]")
        object.__setattr__(self, "n_points", int(self.n_points))

    @property
    def dt(self) -> float:
        return (self.t_end - self.t_start) / (self.n_points - 1)

    @property
    def times(self) -> np.ndarray:
        return self.t_start + self.dt * np.arange(self.n_points)

    def index_of(self, t: float) -> int:
        """Index of the grid point nearest to ``t``; rejects points off the grid."""
        if t < self.t_start - 0.5 * self.dt or t > self.t_end + 0.5 * self.dt:
            raise GridError(f"time {t} outside grid [{self.t_start}, {self.t_end}]")
        return int(round((t - self.t_start) / self.dt))

    def lag_grid(self) -> "LagGrid":
        """Lag grid covering every difference of two times on this grid."""
        return LagGrid(self.t_end - self.t_start, 2 * self.n_points - 1)


@dataclass(frozen=True)
class LagGrid:
    """Symmetric lag grid ``tau_j = -max_lag + j * dtau`` with odd ``n_points``."""

    max_lag: float
    n_points: int

    def __post_init__(self):
        if int(self.n_points) != self.n_points or self.n_points < 3 or self.n_points % 2 == 0:
            raise GridError(f"LagGrid needs an odd n_points >= 3, got {self.n_points}")
        if not self.max_lag > 0:
            raise GridError(f"LagGrid needs max_lag > 0, got {self.max_lag}")
        object.__setattr__(self, "n_points", int(self.n_points))

    @classmethod
    def from_step(cls, dtau: float, n_half: int) -> "LagGrid":
        """Grid with spacing ``dtau`` and ``n_half`` points on each side of zero."""
        return cls(dtau * n_half, 2 * n_half + 1)

    @property
    def dt(self) -> float:
        return 2.0 * self.max_lag / (self.n_points - 1)

    @property
    def center(self) -> int:
        return (self.n_points - 1) // 2

    @property
    def taus(self) -> np.ndarray:
        h = self.center
        return self.dt * np.arange(-h, h + 1)

    def frequencies(self) -> np.ndarray:
        return conjugate_frequencies(self)


def conjugate_frequencies(lags: LagGrid) -> np.ndarray:
    """Frequency grid dual to ``lags``: ``nu_m = 2 pi m / (n dtau)``, |m| <= h."""
    h = lags.center
    return 2.0 * np.pi * np.arange(-h, h + 1) / (lags.n_points * lags.dt)


@dataclass(frozen=True)
class SampledKernel:
    """A stationary kernel sampled on a :class:`LagGrid`.

    Parity and causal support are checked exactly at construction; use
    :meth:`symmetrized` to impose a parity on noisy samples.
    """

    grid: LagGrid
    values: np.ndarray
    parity: Parity = "none"
    causal_support: bool = False

    def __post_init__(self):
        v = np.asarray(self.values)
        if v.shape != (self.grid.n_points,):
            raise GridError(
                f"kernel has {v.shape} samples, lag grid has {self.grid.n_points}")
        _finite(v, "kernel")
        if self.parity not in ("even", "odd", "none"):
            raise GridError(f"unknown parity {self.parity!r}")
        if self.parity == "even" and not np.array_equal(v, v[::-1]):
            raise GridError("kernel tagged even is not mirror symmetric")
        if self.parity == "odd" and not np.array_equal(v, -v[::-1]):
            raise GridError("kernel tagged odd is not mirror antisymmetric")
        if self.causal_support and np.any(v[: self.grid.center] != 0):
            raise GridError("causal kernel has nonzero samples at negative lag")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)

    @property
    def taus(self) -> np.ndarray:
        return self.grid.taus

    def symmetrized(self, parity: Parity) -> "SampledKernel":
        v = self.values
        if parity == "even":
            v = 0.5 * (v + v[::-1])
        elif parity == "odd":
            v = 0.5 * (v - v[::-1])
        return SampledKernel(self.grid, v, parity, False)

    def positive_half(self) -> np.ndarray:
        """Samples at ``tau >= 0``."""
        return self.values[self.grid.center:]

    def scaled(self, factor: float) -> "SampledKernel":
        return SampledKernel(self.grid, factor * self.values, self.parity, self.causal_support)


@dataclass(frozen=True)
class TwoTimeKernel:
    """A kernel ``k(t, s)`` sampled on a :class:`TimeGrid` (row ``t``, column ``s``)."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise GridError(f"two-time kernel has shape {v.shape}, grid needs {(n, n)}")
        _finite(v, "two-time kernel")
        object.__setattr__(self, "values", v)

    def same_grid(self, other) -> bool:
        return self.grid == other.grid


def _check_symmetric_uniform(nus: np.ndarray) -> None:
    if nus.ndim != 1 or nus.size < 3 or nus.size % 2 == 0:
        raise GridError("frequency grid must be 1-d with an odd number of points")
    step = np.diff(nus)
    if not np.allclose(step, step[0], rtol=1e-9, atol=0.0) or step[0] <= 0:
        raise GridError("frequency grid must be uniform and ascending")
    if not np.allclose(nus, -nus[::-1], rtol=0.0, atol=1e-9 * abs(step[0])):
        raise GridError("frequency grid must be symmetric about zero")


@dataclass(frozen=True)
class Spectrum:
    """Complex samples ``k_hat(nu)`` on a uniform grid symmetric about zero."""

    nus: np.ndarray
    values: np.ndarray
    causal_support: bool = False

    def __post_init__(self):
        nus = np.asarray(self.nus, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        _check_symmetric_uniform(nus)
        if v.shape != nus.shape:
            raise GridError(f"spectrum has {v.shape} values on {nus.shape} frequencies")
        _finite(v, "spectrum")
        object.__setattr__(self, "nus", nus)
        object.__setattr__(self, "values", v)

    @property
    def dnu(self) -> float:
        return float(self.nus[1] - self.nus[0])

    def reflected(self) -> "Spectrum":
        """The spectrum evaluated at ``-nu`` on the same grid."""
        return Spectrum(self.nus, self.values[::-1].copy(), self.causal_support)

    def matches(self, other: "Spectrum") -> bool:
        return self.nus.shape == other.nus.shape and np.allclose(
            self.nus, other.nus, rtol=1e-12, atol=1e-12 * abs(self.dnu))

    def window(self, nu_max: float) -> np.ndarray:
        return np.abs(self.nus) <= nu_max + 1e-12 * abs(self.dnu)


def forward_fourier(k: SampledKernel) -> Spectrum:
    """``k_hat(nu) = sum_j dtau k(tau_j) exp(i nu tau_j)`` on the conjugate grid."""
    v = np.asarray(k.values, dtype=complex)
    n = k.grid.n_points
    out = n * k.grid.dt * np.fft.fftshift(np.fft.ifft(np.fft.ifftshift(v)))
    return Spectrum(conjugate_frequencies(k.grid), out, k.causal_support)


def inverse_fourier(spec: Spectrum, lags: Optional[LagGrid] = None) -> SampledKernel:
    """Inverse of :func:`forward_fourier`; returns complex samples (parity ``none``)."""
    n = spec.nus.size
    if lags is None:
        lags = LagGrid.from_step(2.0 * np.pi / (n * spec.dnu), (n - 1) // 2)
    elif lags.n_points != n or not np.allclose(conjugate_frequencies(lags), spec.nus,
                                                rtol=1e-9, atol=1e-12):
        raise GridError("spectrum grid is not the conjugate of the requested lag grid")
    v = np.fft.fftshift(np.fft.fft(np.fft.ifftshift(spec.values))) / (n * lags.dt)
    return SampledKernel(lags, v)


def differentiate(k: SampledKernel) -> SampledKernel:
    """Second-order finite-difference ``dk/dtau``.

    Even kernels become odd and vice versa (imposed exactly).  A causal
    kernel is differentiated on ``tau >= 0`` only, with a one-sided stencil
    at ``tau = 0``, and stays causal.
    """
    if k.grid.n_points < 5:
        raise GridError("differentiate needs at least 5 samples")
    dt = k.grid.dt
    if k.causal_support:
        half = k.positive_half()
        d = np.gradient(half, dt, edge_order=2)
        out = np.zeros_like(k.values, dtype=d.dtype)
        out[k.grid.center:] = d
        return SampledKernel(k.grid, out, "none", True)
    d = np.gradient(k.values, dt, edge_order=2)
    if k.parity == "even":
        return SampledKernel(k.grid, 0.5 * (d - d[::-1]), "odd")
    if k.parity == "odd":
        return SampledKernel(k.grid, 0.5 * (d + d[::-1]), "even")
    return SampledKernel(k.grid, d, "none")


def trapezoid_weights(n: int, dx: float) -> np.ndarray:
    if n < 1:
        raise GridError("quadrature needs at least one sample")
    w = np.full(n, dx)
    if n == 1:
        return np.zeros(1)
    w[0] = w[-1] = 0.5 * dx
    return w


def simpson_weights(n: int, dx: float) -> np.ndarray:
    """Composite Simpson weights; an even sample count closes with the 3/8 rule."""
    if n < 3:
        return trapezoid_weights(n, dx)
    w = np.zeros(n)
    m = n if n % 2 == 1 else n - 3
    if m >= 3:
        w[:m:2] += 2.0
        w[1:m:2] += 4.0
        w[0] -= 1.0
        w[m - 1] -= 1.0
        w[:m] *= dx / 3.0
    if n % 2 == 0:
        # 3/8 rule on the last three intervals
        w[n - 4:] += np.array([1.0, 3.0, 3.0, 1.0]) * 3.0 * dx / 8.0
    return w


def quad_integral(f, dx: Union[float, TimeGrid, LagGrid], rule: str = "trapezoid"):
    """Integrate uniformly spaced samples ``f`` with spacing ``dx``."""
    f = np.asarray(f)
    if f.size == 0:
        raise GridError("cannot integrate an empty series")
    if isinstance(dx, (TimeGrid, LagGrid)):
        if dx.n_points != f.size:
            raise GridError("sample count does not match the grid")
        dx = dx.dt
    # unit-spacing weights first, so f = 1 on [0, 2] gives 2.0 exactly
    if rule == "trapezoid":
        w = trapezoid_weights(f.size, 1.0)
    elif rule == "simpson":
        w = simpson_weights(f.size, 1.0)
    else:
        raise GridError(f"unknown quadrature rule {rule!r}")
    return dx * (w @ f)
