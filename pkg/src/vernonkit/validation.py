"""Cross-module oracle suite: the twelve acceptance checks.

Each check returns a :class:`CheckResult` with the measured figure, the
tolerance it is compared to and a short detail string.  The checks are
shared by the ``validate`` CLI product and the acceptance tests.
"""

from __future__ import annotations

import math
import time
from dataclasses import dataclass
from typing import Callable, List

import numpy as np

from .bathonly import bath_moment_kernels, composite_moment_kernels
from .numgrid import (LagGrid, SampledKernel, Spectrum, TimeGrid, forward_fourier,
                      inverse_fourier)
from .response import (CavityModel, cavity_response_closed_cl, cavity_response_fourier,
                       cavity_response_stationary, cavity_response_time, mode_response)
from .spectral import (CouplingSchedule, DiscreteBath, OhmicBath, discretize_ohmic,
                       kernel_bc_two_time, kernel_i_bc, kernel_i_bc_fourier, kernel_r_bc,
                       kernel_r_bc_fourier)
from .thermo import (SideConfig, correlation_from_fdt, fdt_pair, heat_kernels_cl_fourier,
                     heat_kernels_cl_time, heat_kernels_from_cs, quantum_power,
                     shifted_action_kernels)
from .vernon import (action_eval, fourier_subtlety_compare, stationary_reduction,
                     vernon_imag_fourier, vernon_imag_stationary, vernon_imag_time,
                     vernon_real_bulk, vernon_real_fourier, vernon_real_fourier_cl)

__all__ = ["CheckResult", "CHECKS", "run_all", "format_line"]


@dataclass(frozen=True)
class CheckResult:
    number: int
    name: str
    measured: float
    tolerance: float
    passed: bool
    detail: str = ""
    seconds: float = 0.0


def format_line(r: CheckResult) -> str:
    status = "PASS" if r.passed else "FAIL"
    return (f"[{status}] AC{r.number:02d} {r.name}: measured={r.measured:.3e} "
            f"tolerance={r.tolerance:.1e} ({r.detail}) {r.seconds:.2f}s")


def _norm_rel(a: np.ndarray, ref: np.ndarray) -> float:
    return float(np.max(np.abs(a - ref)) / np.max(np.abs(ref)))


def check_def1_def2() -> CheckResult:
    """Stationary time-domain transform vs closed-form spectrum."""
    eta, w, c = 0.1, 1.0, 1.0
    grid = TimeGrid(0.0, 400.0, 8192)
    resp = cavity_response_stationary(CavityModel(w), grid, friction=eta)
    spec = forward_fourier(vernon_imag_stationary(resp, c)).reflected()
    win = spec.window(5.0)
    ref = vernon_imag_fourier(w, spec.nus, c, eta=eta)
    err = _norm_rel(spec.values[win], ref.values[win])
    pointwise = float(np.max(np.abs(spec.values - ref.values)[win] / np.abs(ref.values[win])))
    return CheckResult(1, "time-domain vs Fourier imaginary transform", err, 1e-3, err < 1e-3,
                       f"max-norm relative on |nu|<=5; pointwise relative {pointwise:.1e}")


def check_response_closed_form() -> CheckResult:
    worst = 0.0
    for eta, w in ((0.0, 1.0), (0.2, 1.0), (1.5, 1.0)):
        grid = TimeGrid(0.0, 20.0, 20001)
        march = cavity_response_stationary(CavityModel(w), grid, friction=eta)
        closed = cavity_response_closed_cl(w, eta, grid.lag_grid())
        worst = max(worst, float(np.max(np.abs(march.values - closed.values))))
    return CheckResult(2, "backward march vs closed-form response", worst, 1e-6, worst < 1e-6,
                       "max abs error, dt=1e-3, tau in [0, 20]")


def check_real_bulk_vs_fourier() -> CheckResult:
    eta, w, beta, cutoff = 0.1, 1.0, 1.0, 10.0
    grid = TimeGrid(0.0, 200.0, 1024)
    bath = OhmicBath(eta, cutoff, beta)
    resp = cavity_response_time(CavityModel(w), grid, friction=eta)
    k_r = kernel_bc_two_time(bath, CouplingSchedule(), grid, "r")
    bulk = stationary_reduction(vernon_real_bulk(k_r, resp, 1.0), "even")
    spec = forward_fourier(bulk)
    win = spec.window(3.0)
    ref = vernon_real_fourier(kernel_r_bc_fourier(bath, spec.nus),
                              cavity_response_fourier(w, spec.nus, eta=eta))
    err = _norm_rel(spec.values[win], ref.values[win])
    return CheckResult(3, "bulk real transform vs Fourier form", err, 1e-2, err < 1e-2,
                       "max-norm relative on |nu|<=3, n=1024")


def check_resonance() -> CheckResult:
    nus = np.round(np.linspace(-3.0, 3.0, 601), 12)
    step = nus[1] - nus[0]
    worst = 0.0
    for ratio in (0.05, 0.1, 0.2):
        w = 1.0
        eta = ratio * w
        ki = np.abs(vernon_imag_fourier(w, nus, 1.0, eta=eta).values)
        bath = OhmicBath(eta, 50.0, 1.0)
        kr = vernon_real_fourier(kernel_r_bc_fourier(bath, nus),
                                 cavity_response_fourier(w, nus, eta=eta)).values.real
        for arr in (ki, kr):
            off = abs(abs(nus[int(np.argmax(arr))]) - w) / step
            worst = max(worst, off)
    return CheckResult(4, "resonant filter peaks at the cavity frequency", worst, 1.0,
                       worst <= 1.0 + 1e-9, "largest argmax offset in grid steps")


def check_high_temperature() -> CheckResult:
    worst = 0.0
    eta = 1.0
    for bh in (1e-2, 1e-3):
        nus = np.linspace(-0.1 / bh, 0.1 / bh, 401)
        bath = OhmicBath(eta, 10.0 / bh, bh)
        vals = kernel_r_bc_fourier(bath, nus).values.real
        worst = max(worst, float(np.max(np.abs(vals / (2 * eta / bh) - 1.0))))
    return CheckResult(5, "high-temperature limit of k_r_hat", worst, 1e-2, worst < 1e-2,
                       "max relative deviation from 2 eta/(beta hbar)")


def check_linearity() -> CheckResult:
    grid = TimeGrid(0.0, 30.0, 301)
    bath = OhmicBath(0.2, 10.0, 1.0)
    resp = cavity_response_time(CavityModel(1.0), grid, friction=0.2)
    k_r = kernel_bc_two_time(bath, CouplingSchedule(), grid, "r")
    base = vernon_real_bulk(k_r, resp, 1.0).values
    lin = 0.0
    for alpha in (0.5, 2.0, 10.0):
        scaled = type(k_r)(grid, alpha * k_r.values)
        out = vernon_real_bulk(scaled, resp, 1.0).values
        lin = max(lin, float(np.max(np.abs(out - alpha * base)) / np.max(np.abs(alpha * base))))
    nus = np.linspace(-2.0, 2.0, 401)
    ki_hat = kernel_i_bc_fourier(bath, nus)
    v1 = vernon_imag_fourier(1.0, nus, 1.0, k_i_hat_bc=ki_hat)
    v2 = vernon_imag_fourier(1.0, nus, 1.0,
                             k_i_hat_bc=Spectrum(nus, 2 * ki_hat.values, True))
    at = int(np.argmin(np.abs(nus - 1.0)))
    dev = abs(v2.values[at] - 2 * v1.values[at]) / abs(2 * v1.values[at])
    ok = lin < 1e-12 and dev > 1e-2
    return CheckResult(6, "W linear, V non-linear", lin, 1e-12, ok,
                       f"V(2k)/2V(k) deviation at nu=w_C: {dev:.2f}")


def check_parity_kappa0() -> CheckResult:
    lags = LagGrid.from_step(0.01, 2000)
    w, eta = 1.0, 0.3
    resp = cavity_response_closed_cl(w, eta, lags)
    k_i = vernon_imag_stationary(resp, 1.0)
    k_r_hat = vernon_real_fourier_cl(eta, w, 1.0, lags.frequencies())
    k_r = SampledKernel(lags, inverse_fourier(k_r_hat, lags).values.real).symmetrized("even")
    pair = heat_kernels_from_cs(k_i, k_r)
    iv, jv = np.asarray(pair.i_kernel.values), np.asarray(pair.j_kernel.values)
    parity_ok = np.array_equal(iv, iv[::-1]) and np.array_equal(jv, -jv[::-1])
    sh = shifted_action_kernels(k_i, k_r, 0.0)
    same = all(np.array_equal(a.values, b.values) for a, b in (
        (sh.k_i_plus, k_i), (sh.k_i_minus, k_i), (sh.k_r_plus, k_r), (sh.k_r_minus, k_r)))
    side = SideConfig(OhmicBath(eta, 10.0, 1.0), CavityModel(w))
    nus = np.array([-0.5, 0.0, 0.5])
    ih, jh = heat_kernels_cl_fourier(side, nus)
    zero = max(abs(ih.values[1]), abs(jh.values[1]))
    ok = parity_ok and same and zero <= 1e-12
    return CheckResult(7, "heat-kernel parity and kappa=0", float(zero), 1e-12, ok,
                       f"parity exact={parity_ok}, kappa=0 identical={same}")


def check_zero_power() -> CheckResult:
    lags = LagGrid.from_step(0.05, 4000)
    nus = lags.frequencies()
    beta = 1.0
    side = SideConfig(OhmicBath(0.5, 50.0, beta), CavityModel(1.0))
    heat = heat_kernels_cl_time(side, lags)
    shapes = {
        "oscillator": 0.3 * nus / ((1.5**2 - nus**2) ** 2 + (0.3 * nus) ** 2),
        "drude": nus / (1.0 + nus**2),
    }
    worst, witness = 0.0, np.inf
    for im_chi in shapes.values():
        s, chi = fdt_pair(Spectrum(nus, im_chi), beta, lags=lags)
        worst = max(worst, quantum_power(correlation_from_fdt(s, chi), heat).relative)
        s2, chi2 = fdt_pair(Spectrum(nus, im_chi), 0.5 * beta, lags=lags)
        witness = min(witness, quantum_power(correlation_from_fdt(s2, chi2), heat).relative)
    return CheckResult(8, "zero power at equal temperature", worst, 1e-6, worst <= 1e-6,
                       f"two Im chi shapes; unequal-temperature power {witness:.1e}")


def check_discrete_vs_continuum() -> CheckResult:
    bath = OhmicBath(1.0, 10.0, 1.0)
    modes = discretize_ohmic(bath, 256)
    lags = LagGrid.from_step(0.01, 500)
    err = 0.0
    for fn in (kernel_i_bc, kernel_r_bc):
        a, b = fn(bath, lags).values, fn(modes, lags).values
        err = max(err, _norm_rel(b, a))
    return CheckResult(9, "256-mode bath vs Ohmic kernels", err, 1e-3, err < 1e-3,
                       "max-norm relative on |tau|<=5")


def _brute_i_dqdq(n: int, t_end: float, w_c: float, w_k: float, c_k: float, c_sc: float):
    dt = t_end / (n - 1)
    t = [k * dt for k in range(n)]
    wt = [dt] * n
    wt[0] = wt[-1] = 0.5 * dt
    resp = [[math.sin(w_c * (t[b] - t[a])) / w_c if b > a else 0.0 for b in range(n)]
            for a in range(n)]
    ib = [[0.25 * c_k * c_k * math.cos(w_k * (t[a] - t[b])) for b in range(n)] for a in range(n)]
    out = [[0.0] * n for _ in range(n)]
    for a in range(n):
        for b in range(n):
            acc = 0.0
            for r in range(n):
                if resp[a][r] == 0.0:
                    continue
                for p in range(n):
                    acc += wt[r] * wt[p] * c_sc * c_sc * resp[a][r] * resp[b][p] * ib[r][p]
            out[a][b] = acc
    return np.array(out)


def check_composite_bruteforce() -> CheckResult:
    n, t_end, w_c, w_k, c_k, c_sc = 32, 8.0, 1.0, 1.3, 0.7, 0.9
    grid = TimeGrid(0.0, t_end, n)
    bath = DiscreteBath(((w_k, c_k),), 1.0)
    i_bc, j_bc = bath_moment_kernels(bath, CouplingSchedule(), grid)
    k_r = kernel_bc_two_time(bath, CouplingSchedule(), grid, "r")
    kset = composite_moment_kernels(i_bc, j_bc, k_r, mode_response(w_c, grid), c_sc)
    ref = _brute_i_dqdq(n, t_end, w_c, w_k, c_k, c_sc)
    err = float(np.max(np.abs(kset.i_dqdq.values - ref)))
    return CheckResult(10, "composite i_dqdq vs nested loops", err, 1e-10, err < 1e-10,
                       "max abs difference, n=32")


def check_ramp_fourier_truncation() -> CheckResult:
    grid = TimeGrid(0.0, 100.0, 1001)
    ramp = CouplingSchedule("smooth-ramp", 1.0, 10.0)
    resp = cavity_response_time(CavityModel(1.0, ramp), grid, friction=0.5)
    kern = vernon_imag_time(resp, ramp)
    cmp_ = fourier_subtlety_compare(kern, [3.0, 40.0], t_ref=50.0)
    in_ramp, mid = cmp_.discrepancy / cmp_.reference_norm
    ok = mid < 1e-3 and in_ramp >= 10 * mid
    return CheckResult(11, "true vs truncated Fourier under a ramp", float(mid), 1e-3, ok,
                       f"in-ramp/mid ratio {in_ramp / mid:.1e}")


def check_action_two_route() -> CheckResult:
    grid = TimeGrid(0.0, 10.0, 2001)
    cav = CavityModel(1.0)
    kern = vernon_imag_time(cavity_response_time(cav, grid), 1.0)
    rng = np.random.default_rng(20240611)
    t = grid.times
    freqs = np.arange(1, 5) * np.pi / 10.0
    worst = 0.0
    for _ in range(20):
        amp = rng.normal(size=(2, 4))
        ph = rng.uniform(0, 2 * np.pi, size=(2, 4))
        q_bar = (amp[0, :, None] * np.sin(freqs[:, None] * t + ph[0, :, None])).sum(0)
        dq = (amp[1, :, None] * np.sin(freqs[:, None] * t + ph[1, :, None])).sum(0)
        worst = max(worst, action_eval(kern, q_bar, dq, cav).relative_gap)
    return CheckResult(12, "action by double sum vs auxiliary route", worst, 1e-6,
                       worst < 1e-6, "20 random smooth path pairs")


CHECKS: List[Callable[[], CheckResult]] = [
    check_def1_def2,
    check_response_closed_form,
    check_real_bulk_vs_fourier,
    check_resonance,
    check_high_temperature,
    check_linearity,
    check_parity_kappa0,
    check_zero_power,
    check_discrete_vs_continuum,
    check_composite_bruteforce,
    check_ramp_fourier_truncation,
    check_action_two_route,
]


def _timed(fn) -> CheckResult:
    start = time.perf_counter()
    r = fn()
    return CheckResult(r.number, r.name, r.measured, r.tolerance, r.passed, r.detail,
                       time.perf_counter() - start)


def run_all() -> List[CheckResult]:
    return [_timed(fn) for fn in CHECKS]
