import numpy as np
import pytest

from vernonkit.errors import GridError, ModelError
from vernonkit.numgrid import Spectrum, TimeGrid, TwoTimeKernel
from vernonkit.response import (CavityModel, cavity_response_fourier, cavity_response_time,
                                mode_response)
from vernonkit.spectral import (CouplingSchedule, DiscreteBath, OhmicBath, kernel_bc_two_time,
                                kernel_r_bc_fourier)
from vernonkit.vernon import (action_eval, fourier_subtlety_compare, stationary_reduction,
                              vernon_imag_fourier, vernon_imag_stationary, vernon_imag_time,
                              vernon_real_boundary, vernon_real_bulk, vernon_real_fourier,
                              vernon_real_fourier_cl)


@pytest.fixture
def grid():
    return TimeGrid(0.0, 10.0, 201)


def test_imag_zero_coupling(grid):
    k = vernon_imag_time(mode_response(1.0, grid), 0.0)
    assert np.all(k.values == 0)


def test_imag_bare_cavity(grid):
    k = vernon_imag_time(mode_response(2.0, grid), 1.0).values
    t = grid.times
    ref = np.triu(np.sin(2.0 * (t[None, :] - t[:, None])) / 4.0, 1)
    assert np.max(np.abs(k - ref)) < 1e-14


def test_imag_time_dependent_coupling(grid):
    sch = CouplingSchedule("linear-ramp", 2.0, 5.0)
    r = mode_response(1.0, grid)
    c = sch.sample(grid)
    np.testing.assert_allclose(vernon_imag_time(r, sch).values,
                               0.5 * np.outer(c, c) * r.values, rtol=1e-15)


def test_imag_nonlinear_in_bath_kernel():
    g = TimeGrid(0.0, 15.0, 301)
    cav = CavityModel(1.0)
    out = []
    for c in (0.4, 0.4 * np.sqrt(2)):      # c^2 doubles the bath kernel
        mem = kernel_bc_two_time(DiscreteBath(((1.5, c),), 1.0), CouplingSchedule(), g, "i")
        base = kernel_bc_two_time(DiscreteBath(((1.5, 0.4),), 1.0), CouplingSchedule(), g, "i")
        assert np.allclose(mem.values, (c / 0.4) ** 2 * base.values)
        out.append(vernon_imag_time(cavity_response_time(cav, g, memory=mem), 1.0).values)
    t, s = 0, 200
    dev = abs(out[1][t, s] - 2 * out[0][t, s]) / abs(2 * out[0][t, s])
    assert dev > 1e-2


def test_imag_fourier_values():
    nus = np.array([-1.0, 0.0, 1.0])
    assert vernon_imag_fourier(2.0, nus).values[1] == pytest.approx(0.125)
    assert vernon_imag_fourier(1.0, np.array([-0.5, 0, 0.5])).values[1] == 0.5
    v = vernon_imag_fourier(2.0, nus, 1.0, eta=0.1).values[2]
    assert v == pytest.approx(0.5 / (3 + 0.1j), rel=1e-15)


@pytest.mark.parametrize("ratio", [0.05, 0.1, 0.2])
def test_imag_fourier_peak(ratio):
    nus = np.arange(-300, 301) * 0.01
    v = np.abs(vernon_imag_fourier(1.0, nus, eta=ratio).values)
    assert abs(abs(nus[np.argmax(v)]) - 1.0) <= 0.01 + 1e-12


def test_imag_stationary():
    lg = TimeGrid(0, 5, 51).lag_grid()
    from vernonkit.response import cavity_response_closed_cl
    r = cavity_response_closed_cl(1.0, 0.1, lg)
    k = vernon_imag_stationary(r, 2.0)
    np.testing.assert_array_equal(k.values, 2.0 * r.values)
    assert k.causal_support


def test_bulk_zero_and_symmetry(grid):
    r = cavity_response_time(CavityModel(1.0), grid, friction=0.2)
    zero = TwoTimeKernel(grid, np.zeros((grid.n_points,) * 2))
    assert np.all(vernon_real_bulk(zero, r, 1.0).values == 0)
    k_r = kernel_bc_two_time(OhmicBath(0.2, 10, 1), CouplingSchedule(), grid, "r")
    out = vernon_real_bulk(k_r, r, CouplingSchedule("smooth-ramp", 1.0, 3.0)).values
    assert np.max(np.abs(out - out.T)) <= 1e-10 * np.max(np.abs(out))


@pytest.mark.parametrize("alpha", [0.5, 2.0, 10.0])
def test_bulk_linear(grid, alpha):
    r = cavity_response_time(CavityModel(1.0), grid, friction=0.2)
    k_r = kernel_bc_two_time(OhmicBath(0.2, 10, 1), CouplingSchedule(), grid, "r")
    a = vernon_real_bulk(TwoTimeKernel(grid, alpha * k_r.values), r, 1.0).values
    b = alpha * vernon_real_bulk(k_r, r, 1.0).values
    assert np.max(np.abs(a - b)) <= 1e-12 * np.max(np.abs(b))


def test_bulk_against_loops():
    g = TimeGrid(0, 3, 13)
    rng = np.random.default_rng(3)
    r = mode_response(1.3, g)
    k = rng.normal(size=(13, 13))
    k = TwoTimeKernel(g, k + k.T)
    c = rng.uniform(0.5, 1.5, size=13)
    w = np.full(13, g.dt)
    w[0] = w[-1] = 0.5 * g.dt
    ref = np.zeros((13, 13))
    for tp in range(13):
        for sp in range(13):
            ref[tp, sp] = c[tp] * c[sp] * sum(
                w[a] * w[b] * k.values[a, b] * r.values[a, tp] * r.values[b, sp]
                for a in range(13) for b in range(13))
    np.testing.assert_allclose(vernon_real_bulk(k, r, c).values, ref, rtol=1e-12, atol=1e-14)


def test_boundary_needs_beta(grid):
    with pytest.raises(ModelError):
        vernon_real_boundary(CavityModel(1.0), mode_response(1.0, grid))


def test_boundary_structure(grid):
    cav = CavityModel(1.0, beta_c=2.0)
    b1, b2 = vernon_real_boundary(cav, cavity_response_time(cav, grid, friction=0.2))
    assert b1.values[0, 0] == 0.0
    rng = np.random.default_rng(0)
    for k in (b1.values, b2.values):
        for _ in range(5):
            t, u, s, v = rng.integers(0, grid.n_points, 4)
            assert abs(k[t, s] * k[u, v] - k[t, v] * k[u, s]) <= 1e-10 * np.max(np.abs(k))**2


def test_boundary_bare_cavity_closed_form():
    # R(t_i, t') = sin(w t') / w, so kernel 1 is (w/2) coth sin sin / w^2
    w, beta = 1.5, 0.7
    ct = 1 / np.tanh(w * beta / 2)
    errs = []
    for n in (601, 1201):
        g = TimeGrid(0, 6, n)
        b1, b2 = vernon_real_boundary(CavityModel(w, beta_c=beta), mode_response(w, g))
        t = g.times
        np.testing.assert_allclose(
            b1.values, 0.5 * ct / w * np.outer(np.sin(w * t), np.sin(w * t)), atol=1e-14)
        # dR(t, t')/dt at t = t_i is -cos(w t'), including the limit t' -> t_i+
        ref2 = 0.5 * ct / w * np.outer(np.cos(w * t), np.cos(w * t))
        errs.append(np.max(np.abs(b2.values - ref2)))
    assert errs[0] < 5e-4
    assert errs[1] < errs[0] / 3.5


def test_boundary_per_unit_time_vanishes():
    cav = CavityModel(1.0, beta_c=1.0)
    per_time = []
    for t_end in (50.0, 200.0):
        g = TimeGrid(0, t_end, int(t_end * 5) + 1)
        b1, b2 = vernon_real_boundary(cav, cavity_response_time(cav, g, friction=0.2))
        w = np.full(g.n_points, g.dt)
        per_time.append(abs(w @ (b1.values + b2.values) @ w) / t_end)
    assert per_time[1] < 0.3 * per_time[0]


def test_real_fourier_closed_form_values():
    nus = np.array([-1.0, 0.0, 1.0])
    assert vernon_real_fourier_cl(0.1, 1.0, None, nus, half_prefactor=True).values[2] == \
        pytest.approx(5.0)
    assert vernon_real_fourier_cl(0.1, 1.0, None, nus).values[2] == pytest.approx(10.0)


def test_real_fourier_matches_closed_form():
    bath = OhmicBath(0.1, 1e3, 1.0)
    nus = np.arange(-200, 201) * 0.01
    a = vernon_real_fourier(kernel_r_bc_fourier(bath, nus),
                            cavity_response_fourier(1.0, nus, eta=0.1))
    b = vernon_real_fourier_cl(0.1, 1.0, 1.0, nus)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-12)


def test_real_fourier_zero_and_real_even():
    nus = np.arange(-100, 101) * 0.03
    r_hat = cavity_response_fourier(1.0, nus, eta=0.3)
    zero = Spectrum(nus, np.zeros(nus.size))
    assert np.all(vernon_real_fourier(zero, r_hat).values == 0)
    k = kernel_r_bc_fourier(OhmicBath(0.3, 10, 0.5), nus)
    v = vernon_real_fourier(k, r_hat).values
    assert np.max(np.abs(v.imag)) <= 1e-10 * np.max(np.abs(v))
    assert np.max(np.abs(v - v[::-1])) <= 1e-10 * np.max(np.abs(v))


def test_real_fourier_grid_mismatch():
    a = Spectrum(np.linspace(-1, 1, 5), np.ones(5))
    b = Spectrum(np.linspace(-2, 2, 5), np.ones(5))
    with pytest.raises(GridError):
        vernon_real_fourier(a, b)


def test_stationary_reduction(grid):
    k = vernon_imag_time(mode_response(1.0, grid), 1.0)
    st = stationary_reduction(k, "causal")
    tau = st.taus
    np.testing.assert_allclose(st.values, np.where(tau > 0, 0.5 * np.sin(tau), 0.0), atol=1e-14)
    with pytest.raises(ModelError):
        stationary_reduction(k, "odd")


def test_action_zero_paths():
    g = TimeGrid(0, 5, 501)
    cav = CavityModel(1.0)
    k = vernon_imag_time(cavity_response_time(cav, g), 1.0)
    q = np.sin(g.times)
    for qb, dq in ((q, np.zeros(501)), (np.zeros(501), q)):
        pair = action_eval(k, qb, dq, cav)
        assert pair.direct == 0.0 and pair.auxiliary == 0.0


def test_action_two_routes_with_friction_and_ramp(rng):
    g = TimeGrid(0, 10, 1001)
    cav = CavityModel(1.2, CouplingSchedule("smooth-ramp", 0.8, 2.0))
    k = vernon_imag_time(cavity_response_time(cav, g, friction=0.3), cav.coupling_sc)
    t = g.times
    for _ in range(3):
        a = rng.normal(size=4)
        qb = a[0] * np.sin(0.5 * t) + a[1] * np.cos(1.1 * t)
        dq = a[2] * np.sin(0.9 * t + 0.3) + a[3]
        assert action_eval(k, qb, dq, cav, friction=0.3).relative_gap < 1e-6


def test_fourier_compare_constant_coupling():
    g = TimeGrid(0, 100, 1001)
    k = vernon_imag_time(cavity_response_time(CavityModel(1.0), g, friction=0.5), 1.0)
    cmp_ = fourier_subtlety_compare(k, [10.0, 30.0, 45.0], t_ref=50.0)
    assert np.all(cmp_.discrepancy < 1e-4 * cmp_.reference_norm)


def test_fourier_compare_ramp():
    g = TimeGrid(0, 100, 1001)
    ramp = CouplingSchedule("smooth-ramp", 1.0, 10.0)
    cav = CavityModel(1.0, ramp)
    k = vernon_imag_time(cavity_response_time(cav, g, friction=0.5), ramp)
    cmp_ = fourier_subtlety_compare(k, [3.0, 40.0], t_ref=50.0)
    in_ramp, mid = cmp_.discrepancy
    assert mid < 1e-3 * cmp_.reference_norm
    assert in_ramp >= 10 * mid
    rows = list(cmp_.rows())
    assert len(rows) == 2 * cmp_.nus.size


def test_fourier_compare_rejects_off_grid_probe():
    g = TimeGrid(0, 10, 11)
    k = vernon_imag_time(mode_response(1.0, g), 1.0)
    with pytest.raises(GridError):
        fourier_subtlety_compare(k, [0.5])
