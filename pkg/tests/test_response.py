import numpy as np
import pytest
from scipy.integrate import solve_ivp

from vernonkit.errors import GridError, ModelError, NumericalError
from vernonkit.numgrid import LagGrid, Spectrum, TimeGrid, forward_fourier
from vernonkit.response import (CavityModel, ResponseMatrix, cavity_response_closed_cl,
                                cavity_response_fourier, cavity_response_stationary,
                                cavity_response_time, mode_response, solve_auxiliary)
from vernonkit.spectral import CouplingSchedule, DiscreteBath, kernel_bc_two_time


def test_mode_response_values():
    g = TimeGrid(0.0, np.pi, 3)   # step pi/2
    r = mode_response(1.0, g).values
    assert r[0, 1] == pytest.approx(1.0, abs=1e-15)
    assert np.all(np.diag(r) == 0)
    assert np.all(np.tril(r) == 0)


def test_response_matrix_requires_causal():
    g = TimeGrid(0, 1, 3)
    with pytest.raises(GridError):
        ResponseMatrix(g, np.ones((3, 3)))


def test_zero_drive():
    g = TimeGrid(0, 10, 101)
    sol = solve_auxiliary(CavityModel(1.3), g, np.zeros(101), friction=0.4)
    assert np.all(sol.values == 0) and np.all(sol.derivative == 0)


def test_terminal_values():
    g = TimeGrid(0, 10, 201)
    sol = solve_auxiliary(CavityModel(1.0), g, np.cos(g.times), friction=0.1)
    assert sol.values[-1] == 0.0 and sol.derivative[-1] == 0.0


def _pulse(t):
    return np.where(t <= 1.0, 1.0, 0.0)


def test_step_halving_pulse():
    cav = CavityModel(1.0)
    g, g2 = TimeGrid(0, 5, 1001), TimeGrid(0, 5, 2001)
    a = solve_auxiliary(cav, g, _pulse, friction=0.2).values
    b = solve_auxiliary(cav, g2, _pulse, friction=0.2).values[::2]
    assert np.max(np.abs(a - b)) < 1e-6


def test_auxiliary_against_ode_oracle():
    # forward-time ODE: X'' = -w^2 X + eta X' + dQ, X(t_f) = X'(t_f) = 0
    w, eta, tf = 1.3, 0.3, 8.0
    g = TimeGrid(0, tf, 801)
    dq = lambda t: np.sin(0.7 * t) + 0.2 * t
    sol = solve_auxiliary(CavityModel(w), g, dq, friction=eta)
    o = solve_ivp(lambda t, y: [y[1], -w**2 * y[0] + eta * y[1] + dq(t)], [tf, 0], [0, 0],
                  t_eval=g.times[::-1], rtol=1e-12, atol=1e-13)
    np.testing.assert_allclose(sol.values, o.y[0][::-1], atol=1e-9)
    np.testing.assert_allclose(sol.derivative, o.y[1][::-1], atol=1e-9)


def test_memory_against_coupled_oscillators():
    # one bath mode eliminated exactly: cavity + mode as a pair of ODEs
    wk, c, wc, tf = 1.3, 0.3, 1.0, 20.0
    bath = DiscreteBath(((wk, c),), 1.0)
    dq = lambda t: np.cos(0.7 * t) + 0.3 * np.sin(2.1 * t)

    def rhs(u, y):
        x, v, yy, z = y
        return [v, -wc**2 * x + dq(tf - u) + c * yy, z, -wk**2 * yy + c * x]

    errs = []
    for n in (401, 801):
        g = TimeGrid(0, tf, n)
        mem = kernel_bc_two_time(bath, CouplingSchedule(), g, "i")
        sol = solve_auxiliary(CavityModel(wc), g, dq, memory=mem)
        o = solve_ivp(rhs, [0, tf], [0, 0, 0, 0], t_eval=tf - g.times[::-1],
                      rtol=1e-12, atol=1e-13)
        errs.append(np.max(np.abs(o.y[0][::-1] - sol.values)))
    assert errs[1] < 1e-3
    assert errs[0] / errs[1] > 3.5   # second order


def test_friction_and_memory_exclusive():
    g = TimeGrid(0, 1, 11)
    mem = kernel_bc_two_time(DiscreteBath(((1, 1),), 1), CouplingSchedule(), g, "i")
    with pytest.raises(ModelError):
        solve_auxiliary(CavityModel(1), g, np.ones(11), friction=0.1, memory=mem)


def test_response_bare_cavity():
    errs = []
    for n in (101, 201):
        g = TimeGrid(0, 5, n)
        r = cavity_response_time(CavityModel(1.0), g).values
        t = g.times
        ref = np.triu(np.sin(t[None, :] - t[:, None]), 1)
        errs.append(np.max(np.abs(r - ref)))
        assert np.all(np.diag(r) == 0)
    assert errs[1] < 1e-5
    assert errs[1] < errs[0] / 3.5   # at least second order


def test_response_reconstruction(rng):
    g = TimeGrid(0, 5, 4001)
    cav = CavityModel(1.2)
    r = cavity_response_time(cav, g, friction=0.3).values
    a = rng.normal(size=3)
    dq = a[0] * np.sin(g.times) + a[1] * np.cos(2.3 * g.times) + a[2]
    sol = solve_auxiliary(cav, g, dq, friction=0.3).values
    w = np.full(g.n_points, g.dt)
    w[0] = w[-1] = 0.5 * g.dt
    recon = r @ (w * dq)
    # the row integral runs over s > t, so the trapezoid end weight is 1/2 at s = t
    assert np.max(np.abs(recon - sol)) < 1e-6


def test_rectangle_impulse_converges():
    cav = CavityModel(1.0)
    errs = []
    for n in (101, 201):
        g = TimeGrid(0, 5, n)
        jump = cavity_response_time(cav, g, friction=0.2).values
        rect = cavity_response_time(cav, g, friction=0.2, impulse="rectangle").values
        # at s = t_f half the rectangle lies outside the window; skip that column
        errs.append(np.max(np.abs(jump - rect)[:, :-1]))
    assert errs[1] < errs[0] / 1.8


def test_closed_form_values():
    lg = LagGrid(np.pi / 2, 3)
    r = cavity_response_closed_cl(1.0, 0.0, lg)
    assert r.values[2] == pytest.approx(1.0, abs=1e-15)
    assert np.all(r.values[:2] == 0)
    assert r.causal_support


@pytest.mark.parametrize("eta", [0.0, 0.2, 1.5, 2.0, 3.0])
def test_closed_form_vs_march(eta):
    g = TimeGrid(0, 10, 10001)
    march = cavity_response_stationary(CavityModel(1.0), g, friction=eta)
    closed = cavity_response_closed_cl(1.0, eta, g.lag_grid())
    assert np.max(np.abs(march.values - closed.values)) < 1e-6


def test_closed_form_at_tau_one():
    g = TimeGrid(0, 2, 2001)
    r = cavity_response_time(CavityModel(1.0), g, friction=0.2)
    col = g.index_of(1.0)
    closed = cavity_response_closed_cl(1.0, 0.2, LagGrid(1.0, 3)).values[2]
    assert r.values[0, col] == pytest.approx(closed, abs=1e-6)


def test_stationary_matches_matrix_row():
    g = TimeGrid(0, 10, 501)
    cav = CavityModel(1.1)
    st = cavity_response_stationary(cav, g, friction=0.3)
    mat = cavity_response_time(cav, g, friction=0.3)
    np.testing.assert_allclose(st.values[g.n_points - 1:], mat.values[0], atol=1e-13)


def test_fourier_values():
    s = cavity_response_fourier(1.0, [-0.5, 0.0, 0.5])
    assert s.values[1] == 1.0
    s = cavity_response_fourier(2.0, [-1.0, 0.0, 1.0], eta=0.1)
    assert s.values[2] == pytest.approx(1 / (3 + 0.1j), rel=1e-15)


def test_fourier_matches_fft_of_closed_form():
    eta = 0.2
    lg = LagGrid.from_step(0.005, 40000)   # window 200 = 40/eta
    spec = forward_fourier(cavity_response_closed_cl(1.0, eta, lg)).reflected()
    m = spec.window(5.0)
    ref = cavity_response_fourier(1.0, spec.nus, eta=eta).values[m]
    assert np.max(np.abs(spec.values[m] - ref) / np.abs(ref)) < 1e-3


def test_fourier_with_bath_spectrum():
    nus = np.linspace(-2, 2, 5)
    k_hat = Spectrum(nus, 0.5j * 0.3 * nus)
    a = cavity_response_fourier(1.0, nus, k_i_hat=k_hat)
    b = cavity_response_fourier(1.0, nus, eta=0.3)
    np.testing.assert_allclose(a.values, b.values, rtol=1e-14)


def test_fourier_pole_rejected():
    with pytest.raises(NumericalError):
        cavity_response_fourier(1.0, [-1.0, 0.0, 1.0])


def test_divergence_reported():
    g = TimeGrid(0, 100, 41)
    with pytest.raises(NumericalError, match="step"):
        cavity_response_stationary(CavityModel(1000.0), g)


def test_cavity_validation():
    with pytest.raises(ModelError):
        CavityModel(0.0)
    with pytest.raises(ModelError):
        CavityModel(1.0, beta_c=-1.0)
