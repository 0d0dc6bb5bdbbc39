import json

import numpy as np
import pytest

from vernonkit.cli import CONVENTIONS, emit_plot_data, main, parse_scenario
from vernonkit.errors import ConfigError
from vernonkit.io import read_kernel_csv, write_kernel_csv
from vernonkit.numgrid import LagGrid, SampledKernel, Spectrum
from vernonkit.thermo import (SideConfig, correlation_from_fdt, fdt_pair, heat_kernels_cl_time,
                              quantum_power)
from vernonkit.response import CavityModel
from vernonkit.spectral import OhmicBath
from vernonkit.vernon import vernon_imag_fourier

BARE = """
grid: {t_end: 30.0, n_points: 3001}
products: [kernels]
sides:
  - cavity: {omega_c: 1.0}
"""

RAMPED = """
grid: {t_start: 0.0, t_end: 20.0, n_points: 201}
products: [kernels, vernon, bath-moments, fourier-compare]
sides:
  - label: left
    bath: {type: ohmic, eta: 0.2, cutoff: 10.0, beta: 1.0}
    cavity: {omega_c: 1.0, beta_c: 1.0}
    coupling_sc: {kind: smooth-ramp, amplitude: 1.0, ramp_time: 5.0}
bath_moments: {n_modes: 64}
fourier_compare: {probes: [2.0, 10.0]}
"""


def _run(tmp_path, text, *extra, name="s.yaml"):
    p = tmp_path / name
    p.write_text(text)
    return main(["--scenario", str(p), "--out", str(tmp_path / "out"), *extra])


def test_bare_cavity_kernel_closed_form(tmp_path):
    assert _run(tmp_path, BARE) == 0
    k = read_kernel_csv(tmp_path / "out" / "k_i_cs.csv")
    ref = np.where(k.taus > 0, 0.5 * np.sin(k.taus), 0.0)
    assert np.max(np.abs(k.values - ref)) < 1e-8
    man = json.loads((tmp_path / "out" / "manifest.json").read_text())
    assert man["conventions"] == CONVENTIONS
    assert "k_i_cs.csv" in man["files"] and "response.csv" in man["files"]


def test_rerun_is_byte_identical(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    a.mkdir(), b.mkdir()
    assert _run(a, BARE) == 0 and _run(b, BARE) == 0
    for f in ("k_i_cs.csv", "k_i_cs_hat.dat", "manifest.json", "run.log"):
        assert (a / "out" / f).read_bytes() == (b / "out" / f).read_bytes()


def test_all_non_power_products(tmp_path):
    # ramped coupling is rejected by the stationary kernels product
    assert _run(tmp_path, RAMPED) == 2
    text = RAMPED.replace("products: [kernels, ", "products: [")
    assert _run(tmp_path, text) == 0
    out = tmp_path / "out"
    for f in ("vernon/k_i_cs.csv", "vernon/k_r_cs.csv", "vernon/boundary_1.csv",
              "vernon/metadata.json", "fourier_compare.csv"):
        assert (out / f).is_file(), f
    assert any((out / "bath_moments").glob("*.csv"))


def test_missing_power_correlation(tmp_path, capsys):
    text = """
grid: {t_end: 30.0, n_points: 301}
products: [power]
sides:
  - bath: {type: ohmic, eta: 0.1, cutoff: 10, beta: 1}
    cavity: {omega_c: 1.0}
"""
    assert _run(tmp_path, text) == 2
    assert "power.correlation" in capsys.readouterr().err


def test_power_from_fdt_correlation(tmp_path):
    lg = LagGrid.from_step(0.05, 2000)
    nus = lg.frequencies()
    c_q = correlation_from_fdt(*fdt_pair(Spectrum(nus, nus / (1 + nus**2)), 1.0, lags=lg))
    write_kernel_csv(tmp_path / "cq.csv", SampledKernel(lg, c_q.values))
    text = """
products: [power]
power: {correlation: cq.csv}
sides:
  - label: hot
    bath: {type: ohmic, eta: 0.3, cutoff: 50, beta: 0.5}
    cavity: {omega_c: 1.0}
  - label: cold
    bath: {type: ohmic, eta: 0.3, cutoff: 50, beta: 2.0}
    cavity: {omega_c: 1.0}
"""
    assert _run(tmp_path, text) == 0
    rows = (tmp_path / "out" / "power.csv").read_text().splitlines()
    assert rows[0] == "side,pi,pi_I_part,pi_J_part"
    vals = {r.split(",")[0]: float(r.split(",")[1]) for r in rows[1:]}
    ref = quantum_power(c_q, heat_kernels_cl_time(
        SideConfig(OhmicBath(0.3, 50, 0.5), CavityModel(1.0)), lg)).pi.real
    assert vals["hot"] == pytest.approx(ref, rel=1e-12)
    assert vals["total"] == pytest.approx(vals["hot"] + vals["cold"], rel=1e-9, abs=1e-15)
    assert np.sign(vals["hot"]) == -np.sign(vals["cold"])


def test_validate_flag(tmp_path):
    assert main(["--validate", "--out", str(tmp_path / "v")]) == 0
    lines = (tmp_path / "v" / "validation.csv").read_text().splitlines()
    assert len(lines) == 13


def test_plot_data_peak(tmp_path):
    nus = np.arange(-300, 301) * 0.01
    spec = vernon_imag_fourier(1.0, nus, eta=0.1)
    path = emit_plot_data(spec, tmp_path / "k.dat")
    data = np.loadtxt(path)
    peak = data[np.argmax(np.hypot(data[:, 1], data[:, 2])), 0]
    assert abs(abs(peak) - 1.0) <= 0.01


def test_plot_data_refuses_unknown(tmp_path):
    with pytest.raises(ConfigError):
        emit_plot_data([1, 2], tmp_path / "e.dat")


def test_empty_products(tmp_path):
    assert _run(tmp_path, "products: []\n") == 2


def test_unwritable_output(tmp_path):
    p = tmp_path / "s.yaml"
    p.write_text(BARE)
    assert main(["--scenario", str(p), "--out", "/proc/vernonkit-nope"]) == 3


@pytest.mark.parametrize("text,needle", [
    ("grid: {t_end: 30.0\n", "line"),
    ("grid: {t_end: 1.0, n_points: 11}\nproducts: [kernels]\nsides:\n"
     "  - cavity: {omega_c: -1.0}\n", "omega"),
    ("bogus: 1\n", "bogus"),
    ("grid: {t_end: 1.0, n_points: 11, colour: 3}\n", "colour"),
    ("- a\n- b\n", "mapping"),
])
def test_parse_errors(tmp_path, capsys, text, needle):
    assert _run(tmp_path, text + ("products: [kernels]\n" if "products" not in text
                                  and not text.startswith("-") else "")) == 2
    assert needle in capsys.readouterr().err


def test_parse_scenario_defaults():
    scen = parse_scenario(BARE)
    assert scen.grid.n_points == 3001 and scen.hbar == 1.0
    assert scen.sides[0].bath is None


def test_parse_scenario_rejects_three_sides():
    text = "sides:\n" + "  - cavity: {omega_c: 1.0}\n" * 3
    with pytest.raises(ConfigError):
        parse_scenario(text)


def test_missing_scenario_file(tmp_path):
    assert main(["--scenario", str(tmp_path / "none.yaml"), "--out", str(tmp_path)]) == 2
