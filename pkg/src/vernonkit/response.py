"""Backward-in-time auxiliary equation and cavity response functions.

The auxiliary coordinate obeys, for ``t < t_f``::

    X'' + w_C^2 X = C_SC(t) dQ(t) + eta X'                 (Ohmic friction)
    X'' + w_C^2 X = C_SC(t) dQ(t) + 2 int_t^{t_f} k_i(s, t) X(s) ds

with ``X(t_f) = X'(t_f) = 0``.  Both are marched backward from ``t_f``; in
the backward time ``u = t_f - t`` the friction term damps the motion.

The response ``R_C(t, s)`` is anti-causal: nonzero only for ``s > t``, so
``X(t) = int_t^{t_f} R_C(t, s) C_SC(s) dQ(s) ds``.  Stationary responses are
stored as functions of ``tau = s - t`` with support on ``tau > 0``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Literal, Optional, Union

import numpy as np

from .errors import GridError, ModelError, NumericalError
from .numgrid import LagGrid, SampledKernel, Spectrum, TimeGrid, TwoTimeKernel
from .spectral import CouplingSchedule, sample_coupling

__all__ = [
    "CavityModel",
    "ResponseMatrix",
    "AuxiliarySolution",
    "mode_response",
    "solve_auxiliary",
    "cavity_response_time",
    "cavity_response_stationary",
    "cavity_response_closed_cl",
    "cavity_response_fourier",
]

OVERFLOW_GUARD = 1e150
RESONANCE_GUARD = 1e-12


@dataclass(frozen=True)
class CavityModel:
    """Cavity mode of frequency ``omega_c`` coupled to the system through ``C_SC(t)``.

    ``beta_c`` is the inverse temperature of the initial cavity state and is
    only needed for the boundary kernels of the real transform.
    """

    omega_c: float
    coupling_sc: CouplingSchedule = CouplingSchedule()
    beta_c: Optional[float] = None

    def __post_init__(self):
        if not (np.isfinite(self.omega_c) and self.omega_c > 0):
            raise ModelError(f"omega_c must be positive, got {self.omega_c}")
        if self.beta_c is not None and not (self.beta_c > 0):
            raise ModelError(f"beta_c must be positive, got {self.beta_c}")


@dataclass(frozen=True)
class ResponseMatrix:
    """``R(t, s)`` on a time grid; zero on and below the diagonal (``s <= t``)."""

    grid: TimeGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        n = self.grid.n_points
        if v.shape != (n, n):
            raise GridError(f"response has shape {v.shape}, grid needs {(n, n)}")
        if not np.all(np.isfinite(v)):
            raise NumericalError("response matrix contains non-finite entries")
        if np.any(np.tril(v) != 0):
            raise GridError("response must vanish for s <= t")
        v = v.copy()
        v.setflags(write=False)
        object.__setattr__(self, "values", v)


@dataclass(frozen=True)
class AuxiliarySolution:
    """``X(t)`` and ``dX/dt`` on ``grid``; both vanish at ``t_f``."""

    grid: TimeGrid
    values: np.ndarray
    derivative: np.ndarray


def mode_response(omega_k: float, grid: TimeGrid) -> ResponseMatrix:
    """Bare oscillator response ``sin(w (s - t)) / w`` for ``s > t``."""
    if not omega_k > 0:
        raise ModelError("omega_k must be positive")
    t = grid.times
    lag = t[None, :] - t[:, None]
    return ResponseMatrix(grid, np.where(lag > 0, np.sin(omega_k * lag) / omega_k, 0.0))


def _midpoint_cubic(f: np.ndarray) -> np.ndarray:
    """Values halfway between consecutive samples (4-point cubic, one-sided at the ends)."""
    n = f.shape[0]
    if n < 4:
        return 0.5 * (f[1:] + f[:-1])
    mid = np.empty((n - 1,) + f.shape[1:], dtype=f.dtype)
    mid[1:-1] = (-f[:-3] + 9 * f[1:-2] + 9 * f[2:-1] - f[3:]) / 16
    mid[0] = (5 * f[0] + 15 * f[1] - 5 * f[2] + f[3]) / 16
    mid[-1] = (5 * f[-1] + 15 * f[-2] - 5 * f[-3] + f[-4]) / 16
    return mid


def _drive_samples(drive, grid: TimeGrid, coupling: np.ndarray, ncols: int):
    """Forcing ``C_SC dQ`` per step: at the upper end, the midpoint and the lower end.

    Callables are evaluated just inside each step (one-sided limits), so a
    drive that jumps at a grid point is integrated without smearing.
    """
    t = grid.times
    if callable(drive):
        tm = 0.5 * (t[1:] + t[:-1])
        eps = 1e-9 * grid.dt
        cm = _midpoint_cubic(coupling) if np.ptp(coupling) else np.full(tm.size, coupling[0])
        f_hi = coupling[1:] * np.asarray(drive(t[1:] - eps), dtype=float)
        f_lo = coupling[:-1] * np.asarray(drive(t[:-1] + eps), dtype=float)
        fm = cm * np.asarray(drive(tm), dtype=float)
        if f_hi.shape != tm.shape or f_lo.shape != tm.shape or fm.shape != tm.shape:
            raise GridError("drive callable must return one value per time")
    else:
        dq = np.asarray(drive, dtype=float)
        if dq.shape[0] != grid.n_points:
            raise GridError(
                f"drive has {dq.shape[0]} samples but the grid has {grid.n_points}")
        c = coupling.reshape((-1,) + (1,) * (dq.ndim - 1))
        f = c * dq
        f_hi, f_lo, fm = f[1:], f[:-1], _midpoint_cubic(f)
    out = []
    for a in (f_hi, fm, f_lo):
        if not np.all(np.isfinite(a)):
            raise ModelError("drive contains non-finite samples")
        if a.ndim == 1:
            a = a[:, None]
        if a.shape[1] != ncols:
            a = np.broadcast_to(a, (a.shape[0], ncols))
        out.append(a)
    return tuple(out)


def _memory_matrix(memory: TwoTimeKernel, grid: TimeGrid) -> np.ndarray:
    if memory.grid != grid:
        raise GridError("memory kernel and drive live on different grids")
    # A[j, m] = 2 w_m k_i(t_m, t_j) for m > j (trapezoid on [t_j, t_f]); k_i(t, t) = 0
    dt = grid.dt
    a = 2.0 * dt * memory.values.T.copy()
    a[:, -1] *= 0.5
    return np.triu(a, 1)


def _march(grid: TimeGrid, omega_c: float, eta: float, amem: Optional[np.ndarray],
           drive: Optional[tuple], ncols: int, kick_columns: bool = False, v0: float = 0.0):
    """RK4 march from ``t_f`` to ``t_start`` in ``u = t_f - t``.

    ``drive`` is ``(upper, mid, lower)`` forcing per step, as built by
    :func:`_drive_samples`.  Returns ``X`` and ``dX/du`` sampled on the
    grid, shape ``(n, ncols)``.
    With ``kick_columns`` column ``c`` receives the jump ``dX/du = 1`` at
    grid index ``c`` (unit impulse placed at ``t_c``); ``v0`` is the
    initial ``dX/du`` at ``t_f``.
    """
    n, h = grid.n_points, grid.dt
    w2 = omega_c**2
    xs = np.zeros((n, ncols))
    vs = np.zeros((n, ncols))
    x = np.zeros(ncols)
    v = np.full(ncols, float(v0))
    mem_next = np.zeros(ncols)
    zero = np.zeros(ncols)

    def accel(x_, v_, force):
        return -w2 * x_ - eta * v_ + force

    t = grid.times
    for j in range(n - 1, 0, -1):
        if kick_columns:
            v[j] = 1.0
        xs[j], vs[j] = x, v
        # forcing at t_j (start of step), t_j - h/2, t_{j-1}
        mem_here = mem_next
        if amem is not None:
            mem_next = amem[j - 1, j:] @ xs[j:]
        else:
            mem_next = zero
        mem_mid = 0.5 * (mem_here + mem_next)
        if drive is None:
            g0, gm, g1 = mem_here, mem_mid, mem_next
        else:
            g0 = drive[0][j - 1] + mem_here
            gm = drive[1][j - 1] + mem_mid
            g1 = drive[2][j - 1] + mem_next
        k1x, k1v = v, accel(x, v, g0)
        k2x, k2v = v + 0.5 * h * k1v, accel(x + 0.5 * h * k1x, v + 0.5 * h * k1v, gm)
        k3x, k3v = v + 0.5 * h * k2v, accel(x + 0.5 * h * k2x, v + 0.5 * h * k2v, gm)
        k4x, k4v = v + h * k3v, accel(x + h * k3x, v + h * k3v, g1)
        x = x + h / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        v = v + h / 6 * (k1v + 2 * k2v + 2 * k3v + k4v)
        if not (np.all(np.isfinite(x)) and np.max(np.abs(x), initial=0.0) < OVERFLOW_GUARD):
            raise NumericalError(
                f"backward march diverged at step {n - j} (t = {t[j - 1]:.6g}); "
                "reduce dt")
    if kick_columns:
        v[0] = 1.0
    xs[0], vs[0] = x, v
    return xs, vs


def _dissipation(friction, memory, grid):
    if friction is not None and memory is not None:
        raise ModelError("pass either a friction constant or a memory kernel, not both")
    eta = 0.0 if friction is None else float(friction)
    if eta < 0 or not np.isfinite(eta):
        raise ModelError(f"friction must be non-negative, got {friction}")
    amem = None if memory is None else _memory_matrix(memory, grid)
    return eta, amem


def solve_auxiliary(cavity: CavityModel, grid: TimeGrid,
                    drive: Union[np.ndarray, Callable[[np.ndarray], np.ndarray]],
                    friction: Optional[float] = None,
                    memory: Optional[TwoTimeKernel] = None) -> AuxiliarySolution:
    """March the auxiliary equation backward from ``t_f``.

    Parameters
    ----------
    cavity : CavityModel
    grid : TimeGrid
    drive : array or callable
        ``dQ`` sampled on ``grid`` (midpoints by cubic interpolation), or a
        function of time evaluated at every Runge-Kutta stage.
    friction : float, optional
        Ohmic friction ``eta``; mutually exclusive with ``memory``.
    memory : TwoTimeKernel, optional
        Bath dissipation kernel ``k_i(t, s)`` on ``grid``.  The memory
        integral is a trapezoid sum, linearly interpolated at half steps.
    """
    eta, amem = _dissipation(friction, memory, grid)
    coupling = sample_coupling(cavity.coupling_sc, grid)
    forcing = _drive_samples(drive, grid, coupling, 1)
    xs, vs = _march(grid, cavity.omega_c, eta, amem, forcing, 1)
    return AuxiliarySolution(grid, xs[:, 0], -vs[:, 0])


def cavity_response_time(cavity: CavityModel, grid: TimeGrid,
                         friction: Optional[float] = None,
                         memory: Optional[TwoTimeKernel] = None,
                         impulse: Literal["jump", "rectangle"] = "jump") -> ResponseMatrix:
    """Response matrix ``R_C(t, s)``, one impulse-driven backward solve per column ``s``.

    ``impulse="jump"`` imposes the exact delta response (``X = 0``,
    ``dX/dt = -1`` at ``t = s``); ``"rectangle"`` drives with a single sample
    of height ``1/dt`` instead.  All columns are marched together.
    """
    eta, amem = _dissipation(friction, memory, grid)
    n = grid.n_points
    if impulse == "jump":
        xs, _ = _march(grid, cavity.omega_c, eta, amem, None, n, kick_columns=True)
    elif impulse == "rectangle":
        f = np.eye(n) / grid.dt
        forcing = (f[1:], 0.5 * (f[1:] + f[:-1]), f[:-1])
        xs, _ = _march(grid, cavity.omega_c, eta, amem, forcing, n)
    else:
        raise ModelError(f"unknown impulse kind {impulse!r}")
    return ResponseMatrix(grid, np.triu(xs, 1))


def cavity_response_stationary(cavity: CavityModel, grid: TimeGrid,
                               friction: Optional[float] = None,
                               memory: Optional[TwoTimeKernel] = None) -> SampledKernel:
    """Stationary ``R_C(tau)`` from a single impulse at ``t_f``, on ``grid.lag_grid()``.

    Only meaningful for constant couplings; the returned kernel is causal.
    """
    eta, amem = _dissipation(friction, memory, grid)
    n = grid.n_points
    xs, _ = _march(grid, cavity.omega_c, eta, amem, None, 1, v0=1.0)
    lags = grid.lag_grid()
    vals = np.zeros(lags.n_points)
    vals[n - 1:] = xs[::-1, 0]
    return SampledKernel(lags, vals, "none", True)


def _sin_over(z: np.ndarray) -> np.ndarray:
    """``sin(sqrt(z)) / sqrt(z)`` continued to ``sinh`` for ``z < 0`` (1 at 0)."""
    z = np.asarray(z, dtype=float)
    pos = np.sqrt(np.clip(z, 0.0, None))
    neg = np.sqrt(np.clip(-z, 0.0, None))
    safe = np.where(neg > 0, neg, 1.0)
    hyper = np.where(neg > 0, np.sinh(safe) / safe, 1.0)
    return np.where(z >= 0, np.sinc(pos / np.pi), hyper)


def cavity_response_closed_cl(omega_c: float, eta: float, lags: LagGrid) -> SampledKernel:
    """Closed-form Ohmic response ``exp(-eta tau / 2) sin(w_d tau) / w_d`` for ``tau > 0``.

    ``w_d^2 = w_C^2 - eta^2 / 4``.  Written as ``tau sin(w_d tau)/(w_d tau)``
    so the critically damped (``tau exp(-eta tau/2)``) and overdamped
    (``sinh``) branches come out of the same expression.
    """
    if not omega_c > 0:
        raise ModelError("omega_c must be positive")
    if not eta >= 0:
        raise ModelError("eta must be non-negative")
    tau = lags.taus
    wd2 = omega_c**2 - 0.25 * eta**2
    tp = np.clip(tau, 0.0, None)
    vals = tp * np.exp(-0.5 * eta * tp) * _sin_over(wd2 * tp**2)
    vals = np.where(tau > 0, vals, 0.0)
    if not np.all(np.isfinite(vals)):
        raise NumericalError("closed-form response overflowed; shorten the lag window")
    return SampledKernel(lags, vals, "none", True)


def cavity_response_fourier(omega_c: float, nus, k_i_hat: Optional[Spectrum] = None,
                            eta: Optional[float] = None) -> Spectrum:
    """``R_hat(nu) = 1 / (-nu^2 + w_C^2 - 2 k_i_hat(-nu))``.

    With ``eta`` instead of ``k_i_hat`` this is the Ohmic form
    ``1 / (-nu^2 + w_C^2 + i eta nu)``.  With neither, the bare cavity.
    """
    nus = np.asarray(nus, dtype=float)
    if k_i_hat is not None and eta is not None:
        raise ModelError("pass either k_i_hat or eta, not both")
    if eta is not None:
        shift = -1j * eta * nus
    elif k_i_hat is not None:
        if k_i_hat.nus.shape != nus.shape or not np.allclose(k_i_hat.nus, nus, rtol=1e-12,
                                                              atol=1e-12):
            raise GridError("k_i_hat is sampled on a different frequency grid")
        shift = 2.0 * k_i_hat.reflected().values
    else:
        shift = np.zeros_like(nus, dtype=complex)
    den = -nus**2 + omega_c**2 - shift
    bad = np.abs(den) < RESONANCE_GUARD
    if np.any(bad):
        raise NumericalError(
            f"response denominator vanishes at nu = {nus[bad][0]:.6g}; "
            "use eta > 0 or shift the frequency grid")
    return Spectrum(nus, 1.0 / den)
