"""First moment of the energy change of the bath alone, seen from the system.

Bath-side kernels (``C = C_CB``)::

    I^{B->C}(t, s) = (1/4) sum_k C(t) C(s) c_k^2 cos(w_k (t - s))
    J^{B->C}(t, s) = (i/2) sum_k C(t) C(s) c_k^2 sin(w_k (t - s)) coth(w_k beta hbar / 2)

``J`` is returned as the real function multiplying ``i``.  The six
composite kernels integrate these against cavity responses ``R_C`` and
``k_r^{B->C}``; all nested trapezoid sums factor into matrix products, so
the cost is O(n^3) rather than the naive O(n^6).
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Literal, Tuple

import numpy as np

from .errors import GridError, ModelError
from .numgrid import TimeGrid, TwoTimeKernel, trapezoid_weights
from .response import ResponseMatrix
from .spectral import DiscreteBath, OhmicBath, coth_limit, discretize_ohmic, sample_coupling

__all__ = [
    "MomentKernelSet",
    "bath_moment_kernels",
    "composite_moment_kernels",
    "first_moment_quadratic_form",
]

# largest grid accepted by composite_moment_kernels (dense n x n products)
MAX_COMPOSITE_POINTS = 4096


def bath_moment_kernels(bath, schedule, grid: TimeGrid, hbar: float = 1.0,
                        n_modes: int = 256) -> Tuple[TwoTimeKernel, TwoTimeKernel]:
    """``(I^{B->C}, J^{B->C}/i)`` on ``grid``.

    An Ohmic bath is replaced by ``n_modes`` midpoint modes first.
    """
    if isinstance(bath, OhmicBath):
        bath = discretize_ohmic(bath, n_modes)
    if not isinstance(bath, DiscreteBath):
        raise ModelError(f"unsupported bath type {type(bath).__name__}")
    c = sample_coupling(schedule, grid)
    t = grid.times
    lag = t[:, None] - t[None, :]
    i_sum = np.zeros_like(lag)
    j_sum = np.zeros_like(lag)
    for w, ck in bath.modes:
        i_sum += ck**2 * np.cos(w * lag)
        j_sum += ck**2 * np.sin(w * lag) * float(coth_limit(0.5 * w * bath.beta * hbar))
    cc = np.outer(c, c)
    return TwoTimeKernel(grid, 0.25 * cc * i_sum), TwoTimeKernel(grid, 0.5 * cc * j_sum)


@dataclass(frozen=True)
class MomentKernelSet:
    """The six composite kernels; the ``l_*`` aggregates are their exact sums.

    Kernels carrying a factor ``i`` are stored complex.
    """

    i_dqdq: TwoTimeKernel
    j_bqdq: TwoTimeKernel
    j_dqdq: TwoTimeKernel
    ibar_bqbq: TwoTimeKernel
    ibar_bqdq: TwoTimeKernel
    ibar_dqdq: TwoTimeKernel
    idqdq_variant: str = "corrected"

    @property
    def l_dqdq(self) -> TwoTimeKernel:
        return TwoTimeKernel(self.i_dqdq.grid,
                             self.i_dqdq.values + self.j_dqdq.values + self.ibar_dqdq.values)

    @property
    def l_bqdq(self) -> TwoTimeKernel:
        return TwoTimeKernel(self.j_bqdq.grid, self.j_bqdq.values + self.ibar_bqdq.values)

    def items(self):
        for name in ("i_dqdq", "j_bqdq", "j_dqdq", "ibar_bqbq", "ibar_bqdq", "ibar_dqdq"):
            yield name, getattr(self, name)
        yield "l_dqdq", self.l_dqdq
        yield "l_bqdq", self.l_bqdq


def composite_moment_kernels(i_bc: TwoTimeKernel, j_bc: TwoTimeKernel, k_r_bc: TwoTimeKernel,
                             response: ResponseMatrix, coupling_sc,
                             idqdq_variant: Literal["corrected", "literal"] = "corrected"
                             ) -> MomentKernelSet:
    """Composite cavity-integrated kernels by nested trapezoid quadrature.

    Parameters
    ----------
    i_bc, j_bc : TwoTimeKernel
        Bath moment kernels from :func:`bath_moment_kernels` (``j_bc`` is
        ``J^{B->C}/i``).
    k_r_bc : TwoTimeKernel
        Bath noise kernel ``k_r^{B->C}(t, s)``.
    response : ResponseMatrix
        Cavity response ``R_C(t, s)``.
    coupling_sc
        Cavity-system coupling (schedule, scalar or samples).
    idqdq_variant : {"corrected", "literal"}
        ``"corrected"`` integrates ``I^{B->C}(r, p)`` against
        ``C(r) C(p) R_C(t, r) R_C(s, p)``; ``"literal"`` keeps ``I^{B->C}(t, s)``
        outside the integral.

    Notes
    -----
    With ``W`` the trapezoid weights and ``R`` the response matrix:

    * ``j_bqdq = (i/2) C C' (R W J W R)``
    * ``j_dqdq = 2i C C' (R^T W K W R W (iJ) W R^T)``
    * ``ibar_bqbq = (1/4) C(t) C(s) [sum_p w R(p,t) I(p,t)] [sum_r w R(r,s)]``
    * ``ibar_bqdq = i C C' (R^T W I W R^T W K W R)``
    * ``ibar_dqdq = 4 C C' (X W I W X^T)`` with ``X = R^T W K W R``
    """
    grid = response.grid
    for k in (i_bc, j_bc, k_r_bc):
        if k.grid != grid:
            raise GridError("bath kernels and response must share one time grid")
    n = grid.n_points
    if n > MAX_COMPOSITE_POINTS:
        est = 8 * n * n * 8 / 2**20
        raise GridError(
            f"composite kernels on n = {n} points need ~{est:.0f} MiB and O(n^3) work; "
            f"limit is n <= {MAX_COMPOSITE_POINTS}")
    if idqdq_variant not in ("corrected", "literal"):
        raise ModelError(f"unknown idqdq variant {idqdq_variant!r}")
    c = sample_coupling(coupling_sc, grid)
    cc = np.outer(c, c)
    w = trapezoid_weights(n, grid.dt)
    r = response.values
    i_m = i_bc.values
    j_m = 1j * j_bc.values
    k_m = k_r_bc.values

    def wdot(a, b):
        # sum_x a[., x] w_x b[x, .]
        return (a * w[None, :]) @ b

    rt = r.T
    if idqdq_variant == "corrected":
        a = r * (w * c)[None, :]
        i_dqdq = a @ i_m @ a.T
    else:
        a = (r * (w * c)[None, :]).sum(axis=1)
        i_dqdq = i_m * np.outer(a, a)
    j_bqdq = 0.5 * cc * wdot(wdot(r, j_m), r)
    x = wdot(wdot(rt, k_m), r)
    j_dqdq = 2j * cc * wdot(wdot(x, j_m), rt)
    b = np.sum(w[:, None] * r * i_m, axis=0)
    a2 = np.sum(w[:, None] * r, axis=0)
    ibar_bqbq = 0.25 * cc * np.outer(b, a2)
    ibar_bqdq = 1j * cc * wdot(wdot(rt, i_m), x)
    ibar_dqdq = 4.0 * cc * wdot(wdot(x, i_m), x.T)

    def mk(v):
        v = np.asarray(v)
        if np.iscomplexobj(v) and not np.any(v.imag):
            v = v.real
        return TwoTimeKernel(grid, v)

    return MomentKernelSet(mk(i_dqdq), mk(j_bqdq), mk(j_dqdq), mk(ibar_bqbq),
                           mk(ibar_bqdq), mk(ibar_dqdq), idqdq_variant)


def first_moment_quadratic_form(kernels: MomentKernelSet, q_bar, dq) -> complex:
    """``int int [dQ dQ' L_dd + Qbar dQ' L_bd + Qbar Qbar' Ibar_bb] ds dt`` (double trapezoid)."""
    grid = kernels.i_dqdq.grid
    n = grid.n_points
    q_bar = np.asarray(q_bar, dtype=float)
    dq = np.asarray(dq, dtype=float)
    if q_bar.shape != (n,) or dq.shape != (n,):
        raise GridError(f"paths must have {n} samples")
    w = trapezoid_weights(n, grid.dt)
    wd, wb = w * dq, w * q_bar
    val = (wd @ kernels.l_dqdq.values @ wd + wb @ kernels.l_bqdq.values @ wd
           + wb @ kernels.ibar_bqbq.values @ wb)
    return complex(val)
