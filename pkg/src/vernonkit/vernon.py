"""The Vernon transform: cavity-to-system kernels from bath-to-cavity kernels.

Imaginary part (dissipation)::

    k_i^{C->S}(t, s) = C_SC(t) C_SC(s) R_C(t, s) / 2

Real part (noise), bulk term::

    k_r^{C->S}(t', s') = C_SC(t') C_SC(s') int int k_r^{B->C}(t, s) R_C(t, t') R_C(s, s') dt ds

plus two boundary terms set by the initial cavity temperature.

Closed-form spectra here follow the ``R_hat(nu) = 1 / (-nu^2 + w_C^2 + ...)``
convention, which is the forward transform of the stored positive-lag
kernel evaluated at ``-nu`` (see :meth:`Spectrum.reflected`).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from .errors import GridError, ModelError
from .numgrid import (SampledKernel, Spectrum, TwoTimeKernel,
                      simpson_weights, trapezoid_weights)
from .response import (CavityModel, ResponseMatrix, cavity_response_fourier,
                       solve_auxiliary)
from .spectral import coth_limit, sample_coupling

__all__ = [
    "VernonOutput",
    "ActionPair",
    "FourierComparison",
    "vernon_imag_time",
    "vernon_imag_stationary",
    "vernon_imag_fourier",
    "vernon_real_bulk",
    "vernon_real_boundary",
    "vernon_real_fourier",
    "vernon_real_fourier_cl",
    "stationary_reduction",
    "action_eval",
    "fourier_subtlety_compare",
]


@dataclass(frozen=True)
class VernonOutput:
    """Cavity-to-system kernels; the boundary terms are kept apart from the bulk."""

    k_i_cs: TwoTimeKernel
    k_r_cs: TwoTimeKernel
    boundary_1: Optional[TwoTimeKernel] = None
    boundary_2: Optional[TwoTimeKernel] = None


def _check_grid(response: ResponseMatrix, other: TwoTimeKernel) -> None:
    if response.grid != other.grid:
        raise GridError("kernel and response are sampled on different time grids")


def vernon_imag_time(response: ResponseMatrix, coupling_sc) -> TwoTimeKernel:
    """``k_i^{C->S}(t, s) = C(t) C(s) R_C(t, s) / 2`` (nonzero for ``s > t``)."""
    c = sample_coupling(coupling_sc, response.grid)
    return TwoTimeKernel(response.grid, 0.5 * np.outer(c, c) * response.values)


def vernon_imag_stationary(response: SampledKernel, c_sc: float) -> SampledKernel:
    """Stationary ``k_i^{C->S}(tau) = C^2 R_C(tau) / 2``, same support as the response."""
    return response.scaled(0.5 * c_sc**2)


def vernon_imag_fourier(omega_c: float, nus, c_sc: float = 1.0,
                        k_i_hat_bc: Optional[Spectrum] = None,
                        eta: Optional[float] = None) -> Spectrum:
    """``k_i_hat^{C->S}(nu) = (C^2 / 2) / (-nu^2 + w_C^2 - 2 k_i_hat^{B->C}(-nu))``.

    Pass ``eta`` for the Ohmic form ``(C^2/2) / (-nu^2 + w_C^2 + i eta nu)``.
    """
    r = cavity_response_fourier(omega_c, nus, k_i_hat=k_i_hat_bc, eta=eta)
    return Spectrum(r.nus, 0.5 * c_sc**2 * r.values)


def vernon_real_bulk(k_r_bc: TwoTimeKernel, response: ResponseMatrix,
                     coupling_sc) -> TwoTimeKernel:
    """Bulk real-transform kernel by nested trapezoid sums.

    The integration region ``t < t'``, ``s < s'`` is carried by the support
    of ``R_C``, so full-grid weights suffice; the result is ``C C' (R^T W K W R)``.
    """
    _check_grid(response, k_r_bc)
    grid = response.grid
    c = sample_coupling(coupling_sc, grid)
    w = trapezoid_weights(grid.n_points, grid.dt)
    r = response.values
    wr = w[:, None] * r
    inner = wr.T @ k_r_bc.values @ wr
    return TwoTimeKernel(grid, np.outer(c, c) * inner)


def _row_derivative(r: np.ndarray, dt: float) -> np.ndarray:
    """``d/dt R(t, t')`` at ``t = t_i``, using only samples with ``t <= t'``.

    Columns ``t' >= t_2`` use the one-sided second-order stencil; column
    ``t_1`` has two valid rows (first order), and ``t' = t_i`` takes the
    limit ``t' -> t_i+`` by linear extrapolation.
    """
    d = (-3.0 * r[0] + 4.0 * r[1] - r[2]) / (2.0 * dt)
    if r.shape[1] > 1:
        d[1] = (r[1, 1] - r[0, 1]) / dt
    if r.shape[1] > 2:
        d[0] = 2.0 * d[1] - d[2]
    return d


def vernon_real_boundary(cavity: CavityModel, response: ResponseMatrix,
                         coupling_sc=None, hbar: float = 1.0
                         ) -> Tuple[TwoTimeKernel, TwoTimeKernel]:
    """The two boundary kernels from the initial thermal state of the cavity.

    ``(w/2) coth(w beta hbar/2) C C' R(t_i, t') R(t_i, s')`` and
    ``(1/2w) coth(w beta hbar/2) C C' dR(t_i, t') dR(t_i, s')`` where ``dR``
    is the derivative in the first argument.
    """
    if cavity.beta_c is None:
        raise ModelError(
            "boundary kernels need the cavity inverse temperature beta_c "
            "(initial thermal state of the cavity)")
    grid = response.grid
    if grid.n_points < 3:
        raise GridError("boundary kernels need at least 3 time samples")
    c = sample_coupling(cavity.coupling_sc if coupling_sc is None else coupling_sc, grid)
    w = cavity.omega_c
    ct = float(coth_limit(0.5 * w * cavity.beta_c * hbar))
    r0 = c * response.values[0]
    dr0 = c * _row_derivative(response.values, grid.dt)
    k1 = 0.5 * w * ct * np.outer(r0, r0)
    k2 = 0.5 / w * ct * np.outer(dr0, dr0)
    return TwoTimeKernel(grid, k1), TwoTimeKernel(grid, k2)


def vernon_real_fourier(k_r_hat_bc: Spectrum, r_hat: Spectrum, c_sc: float = 1.0,
                        half_prefactor: bool = False) -> Spectrum:
    """``k_r_hat^{C->S}(nu) = C^2 k_r_hat^{B->C}(-nu) R_hat(nu) R_hat(-nu)``.

    This is the stationary Fourier reduction of :func:`vernon_real_bulk`.
    ``half_prefactor=True`` multiplies by an extra 1/2 (the normalization in
    which the Ohmic value at ``eta = 0.1, w_C = nu = 1``, zero temperature, is 5).
    """
    if not k_r_hat_bc.matches(r_hat):
        raise GridError("k_r_hat and R_hat are sampled on different frequency grids")
    kappa = 0.5 if half_prefactor else 1.0
    vals = kappa * c_sc**2 * k_r_hat_bc.reflected().values * r_hat.values * r_hat.reflected().values
    return Spectrum(r_hat.nus, vals)


def vernon_real_fourier_cl(eta: float, omega_c: float, beta: Optional[float], nus,
                           c_sc: float = 1.0, hbar: float = 1.0,
                           half_prefactor: bool = False) -> Spectrum:
    """Ohmic closed form ``kappa C^2 eta nu coth(nu beta hbar/2) / ((w^2-nu^2)^2 + eta^2 nu^2)``.

    ``beta=None`` is the zero-temperature limit (coth -> sign).  ``kappa`` is 1,
    or 1/2 with ``half_prefactor``.  No cutoff is applied.
    """
    nus = np.asarray(nus, dtype=float)
    if beta is None:
        nucoth = np.abs(nus)
    else:
        anu = np.abs(nus)
        x = 0.5 * anu * beta * hbar
        small = x < 1e-6
        nucoth = np.where(small, 2.0 / (beta * hbar) * (1 + x**2 / 3),
                          anu * coth_limit(np.where(small, 1.0, x)))
    kappa = 0.5 if half_prefactor else 1.0
    den = (omega_c**2 - nus**2) ** 2 + (eta * nus) ** 2
    return Spectrum(nus, (kappa * c_sc**2 * eta * nucoth / den).astype(complex))


def stationary_reduction(kernel: TwoTimeKernel, kind: str) -> SampledKernel:
    """Lag function read off the last column ``k(t_f - tau, t_f)``, ``tau >= 0``.

    ``kind="causal"`` zero-extends to negative lag (response-like kernels,
    nonzero for ``s > t``); ``kind="even"`` mirrors (symmetric kernels).
    """
    grid = kernel.grid
    n = grid.n_points
    lags = grid.lag_grid()
    pos = kernel.values[::-1, -1]
    vals = np.zeros(lags.n_points)
    vals[n - 1:] = pos
    if kind == "causal":
        return SampledKernel(lags, vals, "none", True)
    if kind == "even":
        vals[: n - 1] = pos[1:][::-1]
        return SampledKernel(lags, vals, "even")
    raise ModelError(f"unknown reduction kind {kind!r}")


@dataclass(frozen=True)
class ActionPair:
    """The dissipative action evaluated two ways."""

    direct: float
    auxiliary: Optional[float]

    @property
    def relative_gap(self) -> float:
        if self.auxiliary is None:
            return float("nan")
        scale = max(abs(self.direct), abs(self.auxiliary))
        return 0.0 if scale == 0 else abs(self.direct - self.auxiliary) / scale


def _tail_weights(n: int, dt: float) -> np.ndarray:
    """Row ``j`` holds Simpson weights for the interval ``[t_j, t_f]``."""
    w = np.zeros((n, n))
    for j in range(n - 1):
        w[j, j:] = simpson_weights(n - j, dt)
    return w


def action_eval(k_i_cs: TwoTimeKernel, q_bar, dq, cavity: Optional[CavityModel] = None,
                friction: Optional[float] = None,
                memory: Optional[TwoTimeKernel] = None) -> ActionPair:
    """``S_i = int dt int_{s > t} ds Qbar(t) k_i^{C->S}(t, s) dQ(s)``.

    Route (a) is a direct double sum: Simpson in ``s`` on ``[t, t_f]`` for
    every ``t``, then Simpson in ``t``.  Route (b), available when ``cavity``
    is given, solves the auxiliary equation with drive ``dQ`` and evaluates
    ``int C_SC(t) Qbar(t) X(t) / 2 dt``.
    """
    grid = k_i_cs.grid
    n = grid.n_points
    q_bar = np.asarray(q_bar, dtype=float)
    dq = np.asarray(dq, dtype=float)
    if q_bar.shape != (n,) or dq.shape != (n,):
        raise GridError(f"paths must have {n} samples, got {q_bar.shape} and {dq.shape}")
    inner = np.sum(_tail_weights(n, grid.dt) * k_i_cs.values * dq[None, :], axis=1)
    outer = simpson_weights(n, grid.dt)
    direct = float(outer @ (q_bar * inner))
    aux = None
    if cavity is not None:
        sol = solve_auxiliary(cavity, grid, dq, friction=friction, memory=memory)
        c = sample_coupling(cavity.coupling_sc, grid)
        aux = float(outer @ (0.5 * c * q_bar * sol.values))
    return ActionPair(direct, aux)


@dataclass(frozen=True)
class FourierComparison:
    """Per-probe true Fourier transforms against the reference (truncated) one."""

    nus: np.ndarray
    probe_times: np.ndarray
    true_values: np.ndarray      # (n_probes, n_nus)
    truncated: np.ndarray        # (n_nus,)
    reference_time: float

    @property
    def discrepancy(self) -> np.ndarray:
        """``max_nu |true - truncated|`` for every probe."""
        return np.max(np.abs(self.true_values - self.truncated[None, :]), axis=1)

    @property
    def reference_norm(self) -> float:
        return float(np.max(np.abs(self.truncated)))

    def rows(self):
        """Flat ``(t, nu, true, truncated)`` table."""
        for p, t in enumerate(self.probe_times):
            for m, nu in enumerate(self.nus):
                yield float(t), float(nu), complex(self.true_values[p, m]), complex(self.truncated[m])


def _row_transform(kernel: TwoTimeKernel, idx: int, nus: np.ndarray) -> np.ndarray:
    grid = kernel.grid
    tau = grid.times - grid.times[idx]
    w = trapezoid_weights(grid.n_points, grid.dt)
    return np.exp(1j * np.outer(nus, tau)) @ (w * kernel.values[idx])


def fourier_subtlety_compare(kernel: TwoTimeKernel, t_probes: Sequence[float],
                             nus=None, t_ref: Optional[float] = None) -> FourierComparison:
    """True Fourier transform ``int k(t, t + tau) exp(i nu tau) dtau`` at each probe time,
    against the transform of the row at ``t_ref`` (mid-window by default).

    Probe times must lie on the kernel grid.
    """
    grid = kernel.grid
    if nus is None:
        nus = np.linspace(-3.0, 3.0, 301)
    nus = np.asarray(nus, dtype=float)
    if t_ref is None:
        t_ref = grid.times[(grid.n_points - 1) // 2]
    probes = np.asarray(t_probes, dtype=float)
    if probes.size == 0:
        raise ModelError("at least one probe time is required")
    idx = []
    for t in probes:
        i = grid.index_of(float(t))
        if not np.isclose(grid.times[i], t, rtol=0, atol=1e-9 * max(1.0, abs(t))):
            raise GridError(f"probe time {t} is not a grid point")
        idx.append(i)
    ref = _row_transform(kernel, grid.index_of(float(t_ref)), nus)
    true = np.array([_row_transform(kernel, i, nus) for i in idx])
    return FourierComparison(nus, probes, true, ref, float(grid.times[grid.index_of(float(t_ref))]))
