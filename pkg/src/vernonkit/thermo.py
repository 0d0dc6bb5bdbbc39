"""Counting-field kernels, first-moment heat kernels and quantum thermal power.

Heat kernels of one side, as functions of the lag ``tau = t - s``::

    I(tau) = (1/hbar) d k_i^{C->S} / dtau        (extended even)
    J(tau) = -(i/hbar) d k_r^{C->S} / dtau       (odd)

``J`` is purely imaginary for a real ``k_r``; :class:`HeatKernelPair` stores
the real odd function ``J_s = (1/hbar) dk_r/dtau`` and ``J = -i J_s``.

The correlation function ``C_Q(tau) = Tr[Q(tau) rho Q(0)]`` is ingested.
With this operator ordering ``C_Q(tau) = S(tau)/2 + (i/2)(chi(tau) - chi(-tau))``
in terms of the symmetrized correlation ``S`` and the (real) response ``chi``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Optional, Tuple

import numpy as np

from .errors import GridError, ModelError
from .numgrid import (LagGrid, SampledKernel, Spectrum, TimeGrid, differentiate,
                      inverse_fourier, trapezoid_weights)
from .response import CavityModel
from .spectral import OhmicBath, coth_limit

__all__ = [
    "CountingField",
    "ShiftedKernels",
    "HeatKernelPair",
    "CorrelationSeries",
    "SideConfig",
    "PowerResult",
    "shifted_action_kernels",
    "counting_actions",
    "first_moment",
    "heat_kernels_from_cs",
    "heat_kernels_cl_fourier",
    "heat_kernels_cl_time",
    "combine_sides",
    "quantum_power",
    "fdt_pair",
    "correlation_from_fdt",
]


@dataclass(frozen=True)
class CountingField:
    """Counting parameter ``kappa`` (a time shift of the kernel arguments)."""

    kappa: float = 0.0

    def __post_init__(self):
        if not np.isfinite(self.kappa):
            raise ModelError("kappa must be finite")


@dataclass(frozen=True)
class ShiftedKernels:
    """``k(tau)``, ``k(tau + kappa)`` and ``k(tau - kappa)`` for both kernels."""

    kappa: float
    k_i: SampledKernel
    k_i_plus: SampledKernel
    k_i_minus: SampledKernel
    k_r: SampledKernel
    k_r_plus: SampledKernel
    k_r_minus: SampledKernel


def _shift(k: SampledKernel, kappa: float) -> SampledKernel:
    if kappa == 0:
        return SampledKernel(k.grid, k.values)
    # linear interpolation, zero outside the sampled window
    vals = np.interp(k.taus + kappa, k.taus, k.values, left=0.0, right=0.0)
    return SampledKernel(k.grid, vals)


def shifted_action_kernels(k_i_cs: SampledKernel, k_r_cs: SampledKernel,
                           kappa: CountingField | float) -> ShiftedKernels:
    """Kernels shifted by ``+-kappa`` for the counting-field actions.

    Shifts use linear interpolation and are limited to ``|kappa| <= max_lag / 4``.
    """
    kap = kappa.kappa if isinstance(kappa, CountingField) else float(kappa)
    if k_i_cs.grid != k_r_cs.grid:
        raise GridError("k_i and k_r must share a lag grid")
    if abs(kap) > k_i_cs.grid.max_lag / 4:
        raise GridError(
            f"|kappa| = {abs(kap)} exceeds a quarter of the lag window "
            f"({k_i_cs.grid.max_lag / 4})")
    return ShiftedKernels(
        kap,
        _shift(k_i_cs, 0.0), _shift(k_i_cs, kap), _shift(k_i_cs, -kap),
        _shift(k_r_cs, 0.0), _shift(k_r_cs, kap), _shift(k_r_cs, -kap),
    )


def _lag_matrix(k: SampledKernel, grid: TimeGrid) -> np.ndarray:
    """``k(t_a - t_b)`` on the time grid; needs the kernel lag step to match ``grid.dt``."""
    lags = k.grid
    if not np.isclose(lags.dt, grid.dt, rtol=1e-9):
        raise GridError("kernel lag step differs from the time step")
    n = grid.n_points
    if lags.center < n - 1:
        raise GridError("kernel lag window is shorter than the time window")
    idx = np.arange(n)
    return np.asarray(k.values)[idx[:, None] - idx[None, :] + lags.center]


def _lower_weights(grid: TimeGrid) -> np.ndarray:
    # trapezoid on t_i < s < t, then on t_i < t < t_f
    n, dt = grid.n_points, grid.dt
    w = np.zeros((n, n))
    for a in range(1, n):
        w[a, : a + 1] = trapezoid_weights(a + 1, dt)
    return trapezoid_weights(n, dt)[:, None] * w


def counting_actions(shifted: ShiftedKernels, q, q_prime, grid: TimeGrid
                     ) -> Tuple[float, float]:
    """Counting-field actions ``(S_i_kappa, S_r_kappa)`` for paths ``Q``, ``Q'``.

    Double integrals over ``t_i < s < t < t_f`` with kernel argument ``t - s``.
    """
    q = np.asarray(q, dtype=float)
    qp = np.asarray(q_prime, dtype=float)
    if q.shape != (grid.n_points,) or qp.shape != q.shape:
        raise GridError("paths must be sampled on the time grid")
    w = _lower_weights(grid)
    qq = np.outer(q, q) - np.outer(qp, qp)
    qq_r = np.outer(q, q) + np.outer(qp, qp)
    cross = np.outer(q, qp)          # Q(t) Q'(s)
    cross_t = np.outer(qp, q)        # Q(s) Q'(t)
    ki = _lag_matrix(shifted.k_i, grid)
    kip = _lag_matrix(shifted.k_i_plus, grid)
    kim = _lag_matrix(shifted.k_i_minus, grid)
    kr = _lag_matrix(shifted.k_r, grid)
    krp = _lag_matrix(shifted.k_r_plus, grid)
    krm = _lag_matrix(shifted.k_r_minus, grid)
    s_i = np.sum(w * (ki * qq + kip * cross - kim * cross_t))
    s_r = np.sum(w * (kr * qq_r - krp * cross - krm * cross_t))
    return float(s_i), float(s_r)


@dataclass(frozen=True)
class HeatKernelPair:
    """First-moment kernels of one side: ``I`` (even) and ``J_s`` (odd, real)."""

    i_kernel: SampledKernel
    j_kernel: SampledKernel
    hbar: float = 1.0
    side_label: str = "side1"

    def __post_init__(self):
        if self.i_kernel.grid != self.j_kernel.grid:
            raise GridError("I and J must share a lag grid")
        if self.i_kernel.parity != "even" or self.j_kernel.parity != "odd":
            raise GridError("heat kernels must be tagged I even and J odd")
        if np.iscomplexobj(self.i_kernel.values) or np.iscomplexobj(self.j_kernel.values):
            raise GridError("heat kernels are stored real")

    @property
    def grid(self) -> LagGrid:
        return self.i_kernel.grid

    @property
    def j_values(self) -> np.ndarray:
        """The kernel ``J = -i J_s`` itself."""
        return -1j * np.asarray(self.j_kernel.values)


def first_moment(kernels: HeatKernelPair, q, q_prime, grid: TimeGrid) -> complex:
    """``int int_{s<t} [(Q(t)Q'(s) + Q(s)Q'(t)) I + (Q(t)Q'(s) - Q(s)Q'(t)) J](t - s)``."""
    q = np.asarray(q, dtype=float)
    qp = np.asarray(q_prime, dtype=float)
    w = _lower_weights(grid)
    cross = np.outer(q, qp)
    cross_t = np.outer(qp, q)
    i_m = _lag_matrix(kernels.i_kernel, grid)
    j_m = -1j * _lag_matrix(kernels.j_kernel, grid)
    return complex(np.sum(w * ((cross + cross_t) * i_m + (cross - cross_t) * j_m)))


def _even_from_positive(grid: LagGrid, pos: np.ndarray) -> np.ndarray:
    h = grid.center
    out = np.empty(grid.n_points)
    out[h:] = pos
    out[:h] = pos[1:][::-1]
    return out


def heat_kernels_from_cs(k_i_cs: SampledKernel, k_r_cs: SampledKernel, hbar: float = 1.0,
                         side_label: str = "side1") -> HeatKernelPair:
    """Heat kernels by finite differences of the cavity-to-system kernels.

    ``k_i_cs`` is read on ``tau >= 0`` (where the causal kernel lives) and its
    derivative is extended even; ``k_r_cs`` must be even.
    """
    if k_i_cs.grid != k_r_cs.grid:
        raise GridError("k_i and k_r must share a lag grid")
    if np.iscomplexobj(k_i_cs.values) or np.iscomplexobj(k_r_cs.values):
        raise ModelError("cavity-to-system kernels must be real")
    grid = k_i_cs.grid
    h = grid.center
    pos = np.asarray(k_i_cs.values)[h:]
    causal = np.zeros(grid.n_points)
    causal[h:] = pos
    d_i = differentiate(SampledKernel(grid, causal, "none", True))
    i_vals = _even_from_positive(grid, np.asarray(d_i.values)[h:] / hbar)
    kr = k_r_cs if k_r_cs.parity == "even" else k_r_cs.symmetrized("even")
    d_r = differentiate(kr)
    return HeatKernelPair(SampledKernel(grid, i_vals, "even"),
                          d_r.scaled(1.0 / hbar), hbar, side_label)


@dataclass(frozen=True)
class SideConfig:
    """One environment side: a bath seen through a cavity."""

    bath: OhmicBath
    cavity: CavityModel
    label: str = "side1"

    @property
    def beta(self) -> float:
        return self.bath.beta

    @property
    def coupling(self) -> float:
        sch = self.cavity.coupling_sc
        if sch.kind != "constant":
            raise ModelError("closed-form heat kernels need a constant cavity-system coupling")
        return sch.amplitude


def _cl_factors(side: SideConfig, nus: np.ndarray, hbar: float):
    if not isinstance(side.bath, OhmicBath):
        raise ModelError("closed-form heat kernels need an Ohmic bath")
    eta, w = side.bath.eta, side.cavity.omega_c
    c2 = side.coupling**2
    anu = np.abs(nus)
    x = 0.5 * anu * side.beta * hbar
    small = x < 1e-6
    # nu coth(nu beta hbar / 2), finite at nu = 0 and exactly even
    nucoth = np.where(small, 2.0 / (side.beta * hbar) * (1 + x**2 / 3),
                      anu * coth_limit(np.where(small, 1.0, x)))
    den = (w**2 - nus**2) ** 2 + (eta * nus) ** 2
    return eta, w, c2, nucoth, den


def heat_kernels_cl_fourier(side: SideConfig, nus, hbar: float = 1.0
                            ) -> Tuple[Spectrum, Spectrum]:
    """Ohmic closed forms ``(I_hat, J_hat)``.

    ``I_hat = (i nu / 2 hbar) C^2 / (-nu^2 + w^2 + i eta nu)`` and
    ``J_hat = (eta nu^2 / 2 hbar) C^2 coth(nu beta hbar / 2) / ((w^2 - nu^2)^2 + eta^2 nu^2)``.

    Both are half-line transforms: ``2 Re I_hat`` is the transform of the even
    ``I`` and ``2 J_hat(nu)`` is the transform of ``J`` at ``-nu``.
    """
    nus = np.asarray(nus, dtype=float)
    eta, w, c2, nucoth, den = _cl_factors(side, nus, hbar)
    i_hat = 1j * nus / (2 * hbar) * c2 / (-nus**2 + w**2 + 1j * eta * nus)
    j_hat = eta * nus * nucoth / (2 * hbar) * c2 / den
    return Spectrum(nus, i_hat), Spectrum(nus, j_hat.astype(complex))


def heat_kernels_cl_time(side: SideConfig, lags: LagGrid, hbar: float = 1.0) -> HeatKernelPair:
    """Ohmic heat kernels on ``lags`` by exact inversion of their spectra.

    Uses ``F[I](nu) = 2 Re I_hat`` and ``F[J_s](nu) = -2i J_hat(nu)`` on the
    conjugate frequency grid, so discrete sums against spectrally built
    correlation functions obey Parseval exactly.
    """
    nus = lags.frequencies()
    i_hat, j_hat = heat_kernels_cl_fourier(side, nus, hbar)
    fi = Spectrum(nus, 2.0 * i_hat.values.real)
    fj = Spectrum(nus, -2j * j_hat.values.real)
    i_k = inverse_fourier(fi, lags)
    j_k = inverse_fourier(fj, lags)
    i_s = SampledKernel(lags, np.real(i_k.values)).symmetrized("even")
    j_s = SampledKernel(lags, np.real(j_k.values)).symmetrized("odd")
    return HeatKernelPair(i_s, j_s, hbar, side.label)


def combine_sides(pairs: Iterable[HeatKernelPair], label: str = "total") -> HeatKernelPair:
    """Sum of per-side heat kernels on a common lag grid."""
    pairs = list(pairs)
    if not pairs:
        raise ModelError("nothing to combine")
    grid, hbar = pairs[0].grid, pairs[0].hbar
    if any(p.grid != grid for p in pairs) or any(p.hbar != hbar for p in pairs):
        raise GridError("sides must share lag grid and hbar")
    i_v = sum(np.asarray(p.i_kernel.values) for p in pairs)
    j_v = sum(np.asarray(p.j_kernel.values) for p in pairs)
    return HeatKernelPair(SampledKernel(grid, i_v, "even"), SampledKernel(grid, j_v, "odd"),
                          hbar, label)


@dataclass(frozen=True)
class CorrelationSeries:
    """Ingested open-system correlation ``C_Q(tau)`` (complex) on a lag grid."""

    grid: LagGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=complex)
        if v.shape != (self.grid.n_points,):
            raise GridError("correlation samples do not match the lag grid")
        if not np.all(np.isfinite(v)):
            raise GridError("correlation contains NaN or infinite samples")
        object.__setattr__(self, "values", v)

    @classmethod
    def from_kernel(cls, k: SampledKernel) -> "CorrelationSeries":
        return cls(k.grid, np.asarray(k.values, dtype=complex))


@dataclass(frozen=True)
class PowerResult:
    """Thermal power with its ``I`` and ``J`` parts and the symmetrized evaluation."""

    pi: complex
    pi_i_part: complex
    pi_j_part: complex
    pi_symmetrized: complex
    scale: float

    @property
    def relative(self) -> float:
        """``|Pi|`` relative to ``int |C_Q| |I + J| dtau``."""
        return abs(self.pi) / self.scale if self.scale > 0 else 0.0


def quantum_power(c_q: CorrelationSeries, kernels: HeatKernelPair,
                  rule: str = "trapezoid") -> PowerResult:
    """``Pi = int C_Q(tau) (I(tau) + J(tau)) dtau``, also in symmetrized form.

    The symmetrized form is
    ``int (C_Q(tau) + C_Q(-tau)) I / 2 + int_{tau > 0} (C_Q(tau) - C_Q(-tau)) J``.
    ``rule`` is ``"trapezoid"`` or ``"rectangle"`` (plain sum, exact Parseval
    partner of the discrete transform).
    """
    grid = kernels.grid
    if c_q.grid != grid:
        raise GridError("correlation and heat kernels live on different lag grids")
    if rule == "trapezoid":
        w = trapezoid_weights(grid.n_points, grid.dt)
    elif rule == "rectangle":
        w = np.full(grid.n_points, grid.dt)
    else:
        raise ModelError(f"unknown rule {rule!r}")
    c = c_q.values
    i_v = np.asarray(kernels.i_kernel.values)
    j_v = kernels.j_values
    p_i = np.sum(w * c * i_v)
    p_j = np.sum(w * c * j_v)
    c_rev = c[::-1]
    theta = (grid.taus > 0).astype(float)
    sym = np.sum(w * 0.5 * (c + c_rev) * i_v) + np.sum(w * theta * (c - c_rev) * j_v)
    scale = float(np.sum(w * np.abs(c) * np.abs(i_v + j_v)))
    return PowerResult(complex(p_i + p_j), complex(p_i), complex(p_j), complex(sym), scale)


def fdt_pair(im_chi: Spectrum, beta: float, hbar: float = 1.0,
             lags: Optional[LagGrid] = None) -> Tuple[SampledKernel, SampledKernel]:
    """Symmetrized correlation ``S`` and response ``chi`` from ``Im chi_hat``.

    ``S_hat(nu) = 2 coth(beta hbar nu / 2) Im chi_hat(nu)`` (finite limit at
    ``nu = 0`` from the slope of ``Im chi_hat``); ``chi = Theta(tau) g(tau)``
    where ``g`` has transform ``2i Im chi_hat``.  Returns ``(S, chi)`` on the
    conjugate lag grid (``lags`` if given); ``S`` is even, ``chi`` causal.
    """
    if not beta > 0:
        raise ModelError("beta must be positive")
    nus = im_chi.nus
    chi2 = np.asarray(im_chi.values)
    if np.max(np.abs(chi2.imag), initial=0.0) > 1e-12 * max(np.max(np.abs(chi2)), 1e-300):
        raise ModelError("Im chi_hat samples must be real")
    chi2 = chi2.real
    scale = max(np.max(np.abs(chi2)), 1e-300)
    if np.max(np.abs(chi2 + chi2[::-1])) > 1e-10 * scale:
        raise ModelError("Im chi_hat must be odd in nu")
    if np.any(chi2[nus > 0] < -1e-12 * scale):
        raise ModelError("Im chi_hat must be non-negative for nu > 0")
    h = (nus.size - 1) // 2
    x = 0.5 * beta * hbar * nus
    s_hat = np.zeros_like(chi2)
    nz = np.arange(nus.size) != h
    s_hat[nz] = 2.0 * coth_limit(x[nz]) * chi2[nz]
    slope = (chi2[h + 1] - chi2[h - 1]) / (2 * im_chi.dnu)
    s_hat[h] = 4.0 / (beta * hbar) * slope
    s = inverse_fourier(Spectrum(nus, s_hat), lags)
    g = inverse_fourier(Spectrum(nus, 2j * chi2), lags)
    lags = s.grid
    s_k = SampledKernel(lags, np.real(s.values)).symmetrized("even")
    g_odd = SampledKernel(lags, np.real(g.values)).symmetrized("odd")
    chi_v = np.where(lags.taus > 0, np.asarray(g_odd.values), 0.0)
    return s_k, SampledKernel(lags, chi_v, "none", True)


def correlation_from_fdt(s: SampledKernel, chi: SampledKernel) -> CorrelationSeries:
    """``C_Q(tau) = S(tau)/2 + (i/2)(chi(tau) - chi(-tau))``."""
    if s.grid != chi.grid:
        raise GridError("S and chi must share a lag grid")
    chi_v = np.asarray(chi.values)
    return CorrelationSeries(s.grid, 0.5 * np.asarray(s.values) + 0.5j * (chi_v - chi_v[::-1]))
