"""Bath models and the bath-to-cavity Feynman-Vernon kernels.

Stationary kernels are functions of the lag ``tau = (first time) - (second
time)``::

    k_i(tau) = sum_k c_k^2 / (2 w_k) sin(w_k tau)
    k_r(tau) = sum_k c_k^2 / (2 w_k) cos(w_k tau) coth(w_k beta hbar / 2)

For the Ohmic (Caldeira-Leggett) bath the mode sum becomes
``(eta / pi) int_0^Omega w ... dw`` (hard cutoff at ``Omega``).
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Literal, Tuple, Union

import numpy as np

from .errors import GridError, ModelError, NumericalError
from .numgrid import LagGrid, SampledKernel, Spectrum, TimeGrid, TwoTimeKernel

__all__ = [
    "OhmicBath",
    "DiscreteBath",
    "CouplingSchedule",
    "discretize_ohmic",
    "kernel_i_bc",
    "kernel_r_bc",
    "kernel_r_bc_fourier",
    "kernel_i_bc_fourier",
    "kernel_bc_two_time",
    "coth_limit",
]

# |x| below which coth(x) is replaced by 1/x + x/3
COTH_SERIES_EPS = 1e-6
# |Omega tau| below which the closed-form k_i switches to its Taylor series
KI_SERIES_EPS = 1e-3


@dataclass(frozen=True)
class OhmicBath:
    """Hard-cutoff Ohmic bath: ``f(w) C_w^2 = 2 eta w^2 / pi`` for ``w < Omega``."""

    eta: float
    cutoff: float
    beta: float

    def __post_init__(self):
        for name in ("eta", "cutoff", "beta"):
            val = getattr(self, name)
            if not (np.isfinite(val) and val > 0):
                raise ModelError(f"OhmicBath.{name} must be positive, got {val}")


@dataclass(frozen=True)
class DiscreteBath:
    """Explicit oscillator modes ``(omega_k, c_k)`` at inverse temperature ``beta``."""

    modes: Tuple[Tuple[float, float], ...]
    beta: float

    def __post_init__(self):
        modes = tuple((float(w), float(c)) for w, c in self.modes)
        if not modes:
            raise ModelError("DiscreteBath needs at least one mode")
        if any(not (w > 0 and np.isfinite(w)) for w, _ in modes):
            raise ModelError("all mode frequencies must be positive")
        if any(not np.isfinite(c) for _, c in modes):
            raise ModelError("mode couplings must be finite")
        if not (np.isfinite(self.beta) and self.beta > 0):
            raise ModelError(f"DiscreteBath.beta must be positive, got {self.beta}")
        object.__setattr__(self, "modes", modes)

    @property
    def omegas(self) -> np.ndarray:
        return np.array([w for w, _ in self.modes])

    @property
    def couplings(self) -> np.ndarray:
        return np.array([c for _, c in self.modes])


Bath = Union[OhmicBath, DiscreteBath]


@dataclass(frozen=True)
class CouplingSchedule:
    """Time-dependent coupling ``C(t)``.

    ``linear-ramp`` rises linearly from 0 at ``t_on`` to ``amplitude`` at
    ``t_on + ramp_time``; ``smooth-ramp`` follows ``sin^2`` over the same
    interval.  Both are zero before ``t_on``.
    """

    kind: Literal["constant", "linear-ramp", "smooth-ramp"] = "constant"
    amplitude: float = 1.0
    ramp_time: float = 0.0
    t_on: float = 0.0

    def __post_init__(self):
        if self.kind not in ("constant", "linear-ramp", "smooth-ramp"):
            raise ModelError(f"unknown coupling schedule kind {self.kind!r}")
        if not np.isfinite(self.amplitude):
            raise ModelError("coupling amplitude must be finite")
        if not (self.ramp_time >= 0):
            raise ModelError("ramp_time must be non-negative")
        if self.kind == "constant" and self.ramp_time != 0:
            raise ModelError("a constant schedule has ramp_time = 0")
        if self.kind != "constant" and self.ramp_time == 0:
            raise ModelError(f"a {self.kind} schedule needs ramp_time > 0")

    def __call__(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "constant":
            return np.full_like(t, self.amplitude)
        x = np.clip((t - self.t_on) / self.ramp_time, 0.0, 1.0)
        if self.kind == "linear-ramp":
            return self.amplitude * x
        return self.amplitude * np.sin(0.5 * np.pi * x) ** 2

    def sample(self, grid: TimeGrid) -> np.ndarray:
        return self(grid.times)


def sample_coupling(coupling, grid: TimeGrid) -> np.ndarray:
    """Coupling values on ``grid`` from a schedule, a scalar or an explicit array."""
    if isinstance(coupling, CouplingSchedule):
        return coupling.sample(grid)
    arr = np.asarray(coupling, dtype=float)
    if arr.ndim == 0:
        return np.full(grid.n_points, float(arr))
    if arr.shape != (grid.n_points,):
        raise GridError(
            f"coupling has {arr.size} samples but the grid has {grid.n_points}")
    if not np.all(np.isfinite(arr)):
        raise ModelError("coupling samples must be finite")
    return arr


def coth_limit(x):
    """``coth(x)`` with the series ``1/x + x/3`` near zero (undefined at exactly 0)."""
    x = np.asarray(x, dtype=float)
    small = np.abs(x) < COTH_SERIES_EPS
    safe = np.where(small, 1.0, x)
    return np.where(small, 1.0 / np.where(small, x, 1.0) + x / 3.0, 1.0 / np.tanh(safe))


def discretize_ohmic(bath: OhmicBath, n_modes: int = 256) -> DiscreteBath:
    """Midpoint modes on ``[0, Omega]`` with ``c_k^2 = (2 eta / pi) w_k^2 dw``."""
    if n_modes < 1:
        raise ModelError("n_modes must be positive")
    dw = bath.cutoff / n_modes
    w = (np.arange(n_modes) + 0.5) * dw
    c = np.sqrt(2.0 * bath.eta / np.pi * w**2 * dw)
    return DiscreteBath(tuple(zip(w, c)), bath.beta)


def _ohmic_ki(eta: float, cutoff: float, tau: np.ndarray) -> np.ndarray:
    # (eta/pi) int_0^W w sin(w tau) dw = (eta/pi) (sin x - x cos x) / tau^2, x = W tau
    x = cutoff * tau
    small = np.abs(x) < KI_SERIES_EPS
    ts = np.where(small, 1.0, tau)
    xs = cutoff * ts
    closed = (np.sin(xs) - xs * np.cos(xs)) / ts**2
    x2 = x * x
    series = cutoff**3 * tau * (
        1.0 / 3 - x2 / 30 + x2**2 / 840 - x2**3 / 45360 + x2**4 / 3991680)
    out = eta / np.pi * np.where(small, series, closed)
    if not np.all(np.isfinite(out)):
        raise NumericalError("Ohmic k_i evaluation produced non-finite values")
    return out


def _ohmic_kr_linear_part(cutoff: float, tau: np.ndarray) -> np.ndarray:
    # int_0^W w cos(w tau) dw
    x = cutoff * tau
    small = np.abs(x) < KI_SERIES_EPS
    ts = np.where(small, 1.0, tau)
    xs = cutoff * ts
    closed = (np.cos(xs) - 1.0) / ts**2 + cutoff * np.sin(xs) / ts
    x2 = x * x
    series = cutoff**2 * (0.5 - x2 / 8 + x2**2 / 144 - x2**3 / 4320)
    return np.where(small, series, closed)


def _gauss_legendre_panels(a: float, b: float, n_panels: int, order: int = 16):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    half = 0.5 * np.diff(edges)
    mid = 0.5 * (edges[1:] + edges[:-1])
    nodes = (mid[:, None] + half[:, None] * x[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def _ohmic_kr(bath: OhmicBath, tau: np.ndarray, hbar: float, n_nodes=None) -> np.ndarray:
    """``(eta/pi) int_0^W w coth(w beta hbar/2) cos(w tau) dw``.

    Split as ``w coth = w + 2 w / (exp(beta hbar w) - 1)``; the first part is
    closed form, the Bose part is integrated by composite Gauss-Legendre.
    """
    bh = bath.beta * hbar
    tmax = float(np.max(np.abs(tau))) if tau.size else 0.0
    if n_nodes is None:
        n_nodes = 16 * max(8, int(math.ceil(bath.cutoff * tmax / math.pi)) + 8)
    n_panels = max(1, int(math.ceil(n_nodes / 16)))
    w, wt = _gauss_legendre_panels(0.0, bath.cutoff, n_panels)
    x = bh * w
    bose = 2.0 / bh * x / np.expm1(x)  # nodes never hit w = 0 exactly
    total = np.empty_like(tau, dtype=float)
    chunk = max(1, 2_000_000 // w.size)
    for start in range(0, tau.size, chunk):
        tt = tau[start:start + chunk]
        total[start:start + chunk] = np.cos(np.outer(tt, w)) @ (wt * bose)
    out = bath.eta / np.pi * (_ohmic_kr_linear_part(bath.cutoff, tau) + total)
    if not np.all(np.isfinite(out)):
        raise NumericalError("Ohmic k_r quadrature produced non-finite values")
    return out


def _stationary_ki(bath: Bath, tau: np.ndarray) -> np.ndarray:
    if isinstance(bath, OhmicBath):
        return _ohmic_ki(bath.eta, bath.cutoff, tau)
    w, c = bath.omegas, bath.couplings
    return np.sin(np.outer(tau, w)) @ (c**2 / (2 * w))


def _stationary_kr(bath: Bath, tau: np.ndarray, hbar: float, n_nodes=None) -> np.ndarray:
    if not (bath.beta > 0):
        raise ModelError("beta must be positive")
    if isinstance(bath, OhmicBath):
        return _ohmic_kr(bath, tau, hbar, n_nodes)
    w, c = bath.omegas, bath.couplings
    return np.cos(np.outer(tau, w)) @ (c**2 / (2 * w) * coth_limit(0.5 * w * bath.beta * hbar))


def _mirror(grid: LagGrid, positive: np.ndarray, parity: str) -> np.ndarray:
    h = grid.center
    out = np.empty(grid.n_points)
    out[h:] = positive
    out[:h] = (positive[1:][::-1] if parity == "even" else -positive[1:][::-1])
    if parity == "odd":
        out[h] = 0.0
    return out


def kernel_i_bc(bath: Bath, lags: LagGrid, causal: bool = False) -> SampledKernel:
    """Dissipation kernel ``k_i^{B->C}(tau)``; odd, or zeroed for ``tau < 0`` if ``causal``."""
    pos = _stationary_ki(bath, lags.taus[lags.center:])
    vals = _mirror(lags, pos, "odd")
    if causal:
        vals[: lags.center] = 0.0
        return SampledKernel(lags, vals, "none", True)
    return SampledKernel(lags, vals, "odd")


def kernel_r_bc(bath: Bath, lags: LagGrid, hbar: float = 1.0, n_nodes=None) -> SampledKernel:
    """Noise kernel ``k_r^{B->C}(tau)``; even.

    ``n_nodes`` sets the Gauss-Legendre node count for the Ohmic quadrature.
    """
    pos = _stationary_kr(bath, lags.taus[lags.center:], hbar, n_nodes)
    return SampledKernel(lags, _mirror(lags, pos, "even"), "even")


def kernel_r_bc_fourier(bath: OhmicBath, nus, hbar: float = 1.0) -> Spectrum:
    """``k_r_hat(nu) = eta nu coth(nu beta hbar / 2)``, zero beyond the cutoff.

    The ``nu -> 0`` value is ``2 eta / (beta hbar)``.
    """
    if not isinstance(bath, OhmicBath):
        raise ModelError("closed-form k_r_hat is only available for the Ohmic bath")
    nus = np.asarray(nus, dtype=float)
    # x coth(x) is even; using |nu| keeps mirrored samples bit-identical
    x = 0.5 * np.abs(nus) * bath.beta * hbar
    small = x < COTH_SERIES_EPS
    # nu coth(x) = (2 / beta hbar) x coth(x), and x coth(x) ~ 1 + x^2 / 3
    xcoth = np.where(small, 1.0 + x**2 / 3.0, x * coth_limit(np.where(small, 1.0, x)))
    vals = bath.eta * 2.0 / (bath.beta * hbar) * xcoth
    vals = np.where(np.abs(nus) <= bath.cutoff, vals, 0.0)
    return Spectrum(nus, vals.astype(complex))


def kernel_i_bc_fourier(bath: OhmicBath, nus) -> Spectrum:
    """One-sided transform of the Ohmic ``k_i`` in the delta-derivative limit: ``i eta nu / 2``.

    The cutoff-dependent real part (a shift of the cavity frequency) is
    dropped, as is the counterterm that would cancel it.
    """
    if not isinstance(bath, OhmicBath):
        raise ModelError("closed-form k_i_hat is only available for the Ohmic bath")
    nus = np.asarray(nus, dtype=float)
    return Spectrum(nus, 0.5j * bath.eta * nus, causal_support=True)


def kernel_bc_two_time(bath: Bath, schedule, grid: TimeGrid,
                       which: Literal["i", "r"], hbar: float = 1.0,
                       n_nodes=None) -> TwoTimeKernel:
    """``k(t, s) = C(t) C(s) k(t - s)`` on ``grid`` (full matrix, both orderings)."""
    c = sample_coupling(schedule, grid)
    lags = grid.lag_grid()
    if which == "i":
        stat = kernel_i_bc(bath, lags).values
    elif which == "r":
        stat = kernel_r_bc(bath, lags, hbar, n_nodes).values
    else:
        raise ModelError(f"which must be 'i' or 'r', got {which!r}")
    n = grid.n_points
    idx = np.arange(n)
    diff = idx[:, None] - idx[None, :] + (n - 1)
    return TwoTimeKernel(grid, np.outer(c, c) * stat[diff])
