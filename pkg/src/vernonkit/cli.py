"""Batch front-end: scenario parsing, pipeline orchestration and artifact output.

Usage::

    vernonkit --scenario run.yaml --out results/ [--product kernels ...] [--validate]

Exit status is 0 on success, 2 for configuration errors and 3 for numerical
failures or unwritable output.  The scenario grammar is documented in the
README.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path
from typing import List, Optional, Sequence

import numpy as np
import yaml

from . import __version__
from .bathonly import bath_moment_kernels, composite_moment_kernels
from .errors import ConfigError, GridError, ModelError, NumericalError, VernonError
from .io import FMT, read_kernel_csv, write_kernel_csv, write_two_time_csv
from .numgrid import SampledKernel, Spectrum, TimeGrid, forward_fourier
from .response import CavityModel, cavity_response_stationary, cavity_response_time
from .spectral import (CouplingSchedule, DiscreteBath, OhmicBath, kernel_bc_two_time,
                       kernel_i_bc, kernel_r_bc)
from .thermo import (CorrelationSeries, SideConfig, combine_sides, heat_kernels_cl_time,
                     quantum_power)
from .validation import format_line, run_all
from .vernon import (fourier_subtlety_compare, vernon_imag_stationary, vernon_imag_time,
                     vernon_real_boundary, vernon_real_bulk)

PRODUCTS = ("kernels", "vernon", "power", "bath-moments", "fourier-compare", "validate")

# every convention that changes numbers; copied into each manifest
CONVENTIONS = {
    "fourier_sign": "k_hat(nu) = int exp(+i nu tau) k(tau) dtau",
    "inverse_normalization": "1/(2 pi)",
    "closed_form_spectra": "R_hat = 1/(-nu^2 + w_C^2 + i eta nu), i.e. forward transform at -nu",
    "lag_orientation": "tau = s - t (second time minus first)",
    "causal_extension": "zero for tau < 0",
    "impulse": "exact velocity jump",
    "auxiliary_friction_sign": "+eta dX/dt in forward time",
    "real_transform_prefactor": "1",
    "idqdq_variant": "corrected",
    "heat_kernel_J": "stored real and odd; J = -i * stored",
    "quadrature": "trapezoid (kernels), Simpson (actions)",
    "float_format": FMT,
}

_EXIT_OK, _EXIT_CONFIG, _EXIT_NUMERIC = 0, 2, 3


class _Log:
    def __init__(self):
        self.lines: List[str] = []

    def __call__(self, msg: str) -> None:
        self.lines.append(msg)


# --------------------------------------------------------------------------- parsing

def _take(block: dict, key: str, where: str, kind=float, default=None, required=True):
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected a mapping")
    if key not in block:
        if required and default is None:
            raise ConfigError(f"{where}.{key}: missing required key")
        return default
    val = block[key]
    try:
        if kind is float:
            if isinstance(val, bool):
                raise TypeError
            return float(val)
        if kind is int:
            if isinstance(val, bool) or int(val) != val:
                raise TypeError
            return int(val)
        return kind(val)
    except (TypeError, ValueError):
        raise ConfigError(f"{where}.{key}: cannot read {val!r} as {kind.__name__}") from None


def _check_keys(block: dict, allowed: Sequence[str], where: str) -> None:
    if not isinstance(block, dict):
        raise ConfigError(f"{where}: expected a mapping")
    extra = sorted(set(block) - set(allowed))
    if extra:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(map(str, extra))}")


def _schedule(block, where: str) -> CouplingSchedule:
    if block is None:
        return CouplingSchedule()
    _check_keys(block, ("kind", "amplitude", "ramp_time", "t_on"), where)
    try:
        return CouplingSchedule(
            _take(block, "kind", where, str, "constant"),
            _take(block, "amplitude", where, float, 1.0),
            _take(block, "ramp_time", where, float, 0.0),
            _take(block, "t_on", where, float, 0.0))
    except ModelError as exc:
        raise ConfigError(f"{where}: {exc}") from None


def _bath(block, where: str):
    _check_keys(block, ("type", "eta", "cutoff", "beta", "modes"), where)
    kind = _take(block, "type", where, str)
    try:
        if kind == "ohmic":
            return OhmicBath(_take(block, "eta", where), _take(block, "cutoff", where),
                             _take(block, "beta", where))
        if kind == "modes":
            modes = block.get("modes")
            if not isinstance(modes, list) or not modes:
                raise ConfigError(f"{where}.modes: expected a list of [omega, c] pairs")
            pairs = []
            for i, m in enumerate(modes):
                if not (isinstance(m, (list, tuple)) and len(m) == 2):
                    raise ConfigError(f"{where}.modes[{i}]: expected [omega, c]")
                try:
                    pairs.append((float(m[0]), float(m[1])))
                except (TypeError, ValueError):
                    raise ConfigError(f"{where}.modes[{i}]: non-numeric entry") from None
            return DiscreteBath(tuple(pairs), _take(block, "beta", where))
        if kind == "none":
            return None
    except ModelError as exc:
        raise ConfigError(f"{where}: {exc}") from None
    raise ConfigError(f"{where}.type: expected ohmic, modes or none, got {kind!r}")


@dataclass
class Side:
    label: str
    bath: object
    cavity: CavityModel
    coupling_cb: CouplingSchedule
    dissipation: str

    def friction(self) -> Optional[float]:
        if self.dissipation != "friction":
            return None
        return self.bath.eta * self.coupling_cb.amplitude**2

    def memory(self, grid: TimeGrid):
        if self.dissipation != "memory":
            return None
        return kernel_bc_two_time(self.bath, self.coupling_cb, grid, "i")


def _side(block, idx: int) -> Side:
    where = f"sides[{idx}]"
    _check_keys(block, ("label", "bath", "cavity", "coupling_sc", "coupling_cb",
                        "dissipation"), where)
    label = _take(block, "label", where, str, f"side{idx + 1}")
    bath = _bath(block.get("bath", {"type": "none"}), f"{where}.bath")
    cav_b = block.get("cavity")
    if cav_b is None:
        raise ConfigError(f"{where}.cavity: missing required key")
    _check_keys(cav_b, ("omega_c", "beta_c"), f"{where}.cavity")
    sc = _schedule(block.get("coupling_sc"), f"{where}.coupling_sc")
    cb = _schedule(block.get("coupling_cb"), f"{where}.coupling_cb")
    try:
        cav = CavityModel(_take(cav_b, "omega_c", f"{where}.cavity"), sc,
                          _take(cav_b, "beta_c", f"{where}.cavity", float, required=False))
    except ModelError as exc:
        raise ConfigError(f"{where}.cavity: {exc}") from None
    if bath is None:
        diss = "none"
    else:
        default = "friction" if isinstance(bath, OhmicBath) else "memory"
        diss = _take(block, "dissipation", where, str, default)
        if diss not in ("friction", "memory"):
            raise ConfigError(f"{where}.dissipation: expected friction or memory, got {diss!r}")
        if diss == "friction":
            if not isinstance(bath, OhmicBath):
                raise ConfigError(f"{where}.dissipation: friction needs an ohmic bath")
            if cb.kind != "constant":
                raise ConfigError(f"{where}.dissipation: friction needs a constant coupling_cb")
    return Side(label, bath, cav, cb, diss)


@dataclass
class Scenario:
    grid: Optional[TimeGrid]
    sides: List[Side]
    products: List[str]
    hbar: float = 1.0
    base_dir: Path = Path(".")
    output: Optional[str] = None
    power: dict = field(default_factory=dict)
    bath_moments: dict = field(default_factory=dict)
    fourier_compare: dict = field(default_factory=dict)


_TOP_KEYS = ("grid", "sides", "products", "hbar", "output", "power", "bath_moments",
             "fourier_compare")


def parse_scenario(text: str, base_dir: Path = Path(".")) -> Scenario:
    """Parse scenario YAML text; raises :class:`ConfigError` with key or line context."""
    try:
        raw = yaml.safe_load(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        pos = f"line {mark.line + 1}, column {mark.column + 1}: " if mark else ""
        problem = getattr(exc, "problem", None) or str(exc)
        raise ConfigError(f"scenario parse error: {pos}{problem}") from None
    if raw is None:
        raw = {}
    _check_keys(raw, _TOP_KEYS, "scenario")
    products = raw.get("products", [])
    if isinstance(products, str):
        products = [products]
    if not isinstance(products, list):
        raise ConfigError("scenario.products: expected a list")
    for p in products:
        if p not in PRODUCTS:
            raise ConfigError(f"scenario.products: unknown product {p!r}")
    grid = None
    if "grid" in raw:
        g = raw["grid"]
        _check_keys(g, ("t_start", "t_end", "n_points"), "grid")
        try:
            grid = TimeGrid(_take(g, "t_start", "grid", float, 0.0),
                            _take(g, "t_end", "grid"), _take(g, "n_points", "grid", int))
        except GridError as exc:
            raise ConfigError(f"grid: {exc}") from None
    sides_raw = raw.get("sides", [])
    if not isinstance(sides_raw, list) or len(sides_raw) > 2:
        raise ConfigError("scenario.sides: expected a list of one or two sides")
    sides = [_side(b, i) for i, b in enumerate(sides_raw)]
    if len({s.label for s in sides}) != len(sides):
        raise ConfigError("scenario.sides: labels must differ")
    hbar = _take(raw, "hbar", "scenario", float, 1.0)
    if not hbar > 0:
        raise ConfigError("scenario.hbar: must be positive")
    output = raw.get("output")
    blocks = {}
    for key, allowed in (("power", ("correlation", "rule")),
                         ("bath_moments", ("variant", "n_modes")),
                         ("fourier_compare", ("probes", "t_ref", "nu_max", "n_nu"))):
        b = raw.get(key) or {}
        _check_keys(b, allowed, key)
        blocks[key] = b
    return Scenario(grid, sides, list(products), hbar, base_dir,
                    None if output is None else str(output), **blocks)


def load_scenario(path) -> Scenario:
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"scenario file not found: {path}")
    return parse_scenario(path.read_text(), path.parent)


# --------------------------------------------------------------------------- output

def emit_plot_data(obj, path) -> Path:
    """Whitespace-separated series: ``x value`` (real) or ``x re im`` (complex)."""
    if isinstance(obj, Spectrum):
        x, v, name = obj.nus, np.asarray(obj.values), "nu"
    elif isinstance(obj, SampledKernel):
        x, v, name = obj.taus, np.asarray(obj.values), "tau"
    else:
        raise ConfigError(f"cannot emit plot data for {type(obj).__name__}")
    if v.size == 0:
        raise ConfigError("refusing to write an empty product")
    if np.iscomplexobj(v):
        cols, header = np.column_stack([x, v.real, v.imag]), f"{name} re im"
    else:
        cols, header = np.column_stack([x, v]), f"{name} value"
    path = Path(path)
    np.savetxt(path, cols, fmt=FMT, header=header)
    return path


def _side_dir(out: Path, scen: Scenario, side: Side) -> Path:
    d = out if len(scen.sides) == 1 else out / side.label
    d.mkdir(parents=True, exist_ok=True)
    return d


def _need_grid(scen: Scenario, product: str) -> TimeGrid:
    if scen.grid is None:
        raise ConfigError(f"grid: missing required key (needed by product {product})")
    return scen.grid


def _need_sides(scen: Scenario, product: str) -> List[Side]:
    if not scen.sides:
        raise ConfigError(f"sides: missing required key (needed by product {product})")
    return scen.sides


def _constant_sc(side: Side, product: str) -> float:
    if side.cavity.coupling_sc.kind != "constant":
        raise ConfigError(f"{side.label}.coupling_sc: product {product} needs a constant coupling")
    return side.cavity.coupling_sc.amplitude


def _run_kernels(scen: Scenario, out: Path, log: _Log) -> List[Path]:
    grid = _need_grid(scen, "kernels")
    files = []
    for side in _need_sides(scen, "kernels"):
        d = _side_dir(out, scen, side)
        c = _constant_sc(side, "kernels")
        resp = cavity_response_stationary(side.cavity, grid, side.friction(), side.memory(grid))
        k_i = vernon_imag_stationary(resp, c)
        write_kernel_csv(d / "response.csv", resp)
        write_kernel_csv(d / "k_i_cs.csv", k_i)
        files += [d / "response.csv", d / "k_i_cs.csv"]
        files.append(emit_plot_data(forward_fourier(k_i).reflected(), d / "k_i_cs_hat.dat"))
        if side.bath is not None:
            lags = grid.lag_grid()
            a2 = side.coupling_cb.amplitude**2 if side.coupling_cb.kind == "constant" else None
            if a2 is None:
                log(f"{side.label}: stationary bath kernels use unit coupling_cb (ramped schedule)")
                a2 = 1.0
            write_kernel_csv(d / "k_i_bc.csv", kernel_i_bc(side.bath, lags).scaled(a2))
            write_kernel_csv(d / "k_r_bc.csv", kernel_r_bc(side.bath, lags, scen.hbar).scaled(a2))
            files += [d / "k_i_bc.csv", d / "k_r_bc.csv"]
        log(f"{side.label}: kernels on {grid.n_points} points, dissipation {side.dissipation}")
    return files


def _metadata(scen: Scenario, side: Side, extra: dict) -> str:
    bath = side.bath
    meta = {
        "grid": {"t_start": scen.grid.t_start, "t_end": scen.grid.t_end,
                 "n_points": scen.grid.n_points},
        "bath": None if bath is None else (
            {"type": "ohmic", "eta": bath.eta, "cutoff": bath.cutoff, "beta": bath.beta}
            if isinstance(bath, OhmicBath) else
            {"type": "modes", "modes": [list(m) for m in bath.modes], "beta": bath.beta}),
        "cavity": {"omega_c": side.cavity.omega_c, "beta_c": side.cavity.beta_c},
        "coupling_sc": vars(side.cavity.coupling_sc),
        "coupling_cb": vars(side.coupling_cb),
        "dissipation": side.dissipation,
        "hbar": scen.hbar,
        "conventions": CONVENTIONS,
    }
    meta.update(extra)
    return json.dumps(meta, indent=2, sort_keys=True) + "\n"


def _run_vernon(scen: Scenario, out: Path, log: _Log) -> List[Path]:
    grid = _need_grid(scen, "vernon")
    files = []
    for side in _need_sides(scen, "vernon"):
        if side.bath is None:
            raise ConfigError(f"{side.label}.bath: product vernon needs a bath")
        if side.cavity.beta_c is None:
            raise ConfigError(f"{side.label}.cavity.beta_c: missing required key "
                              "(product vernon needs the initial cavity temperature)")
        d = _side_dir(out, scen, side) / "vernon"
        d.mkdir(parents=True, exist_ok=True)
        resp = cavity_response_time(side.cavity, grid, side.friction(), side.memory(grid))
        sc = side.cavity.coupling_sc
        k_r_bc = kernel_bc_two_time(side.bath, side.coupling_cb, grid, "r", scen.hbar)
        b1, b2 = vernon_real_boundary(side.cavity, resp, hbar=scen.hbar)
        for name, k in (("k_i_cs", vernon_imag_time(resp, sc)),
                        ("k_r_cs", vernon_real_bulk(k_r_bc, resp, sc)),
                        ("boundary_1", b1), ("boundary_2", b2)):
            write_two_time_csv(d / f"{name}.csv", k)
            files.append(d / f"{name}.csv")
        (d / "metadata.json").write_text(_metadata(scen, side, {"k_r_cs": "bulk term only"}))
        files.append(d / "metadata.json")
        log(f"{side.label}: Vernon kernels on {grid.n_points} points")
    return files


def _run_power(scen: Scenario, out: Path, log: _Log) -> List[Path]:
    sides = _need_sides(scen, "power")
    rel = scen.power.get("correlation")
    if rel is None:
        raise ConfigError("power.correlation: missing required key (correlation CSV path)")
    path = scen.base_dir / str(rel)
    if not path.is_file():
        raise ConfigError(f"power.correlation: file not found: {path}")
    c_q = CorrelationSeries.from_kernel(read_kernel_csv(path))
    rule = str(scen.power.get("rule", "trapezoid"))
    if rule not in ("trapezoid", "rectangle"):
        raise ConfigError(f"power.rule: expected trapezoid or rectangle, got {rule!r}")
    pairs, rows = [], ["side,pi,pi_I_part,pi_J_part"]
    for side in sides:
        if not isinstance(side.bath, OhmicBath) or side.dissipation != "friction":
            raise ConfigError(f"{side.label}.bath: product power needs an ohmic bath with friction")
        b = side.bath
        eff = OhmicBath(side.friction(), b.cutoff, b.beta)
        _constant_sc(side, "power")
        pair = heat_kernels_cl_time(SideConfig(eff, side.cavity, side.label), c_q.grid, scen.hbar)
        pairs.append(pair)
        res = quantum_power(c_q, pair, rule)
        rows.append(f"{side.label},{FMT % res.pi.real},{FMT % res.pi_i_part.real},"
                    f"{FMT % res.pi_j_part.real}")
        log(f"{side.label}: power {res.pi.real:.6g} (imaginary residue {abs(res.pi.imag):.2e})")
    if len(pairs) == 2:
        res = quantum_power(c_q, combine_sides(pairs), rule)
        rows.append(f"total,{FMT % res.pi.real},{FMT % res.pi_i_part.real},"
                    f"{FMT % res.pi_j_part.real}")
    target = out / "power.csv"
    target.write_text("\n".join(rows) + "\n")
    return [target]


def _run_bath_moments(scen: Scenario, out: Path, log: _Log) -> List[Path]:
    grid = _need_grid(scen, "bath-moments")
    variant = str(scen.bath_moments.get("variant", "corrected"))
    n_modes = _take(scen.bath_moments, "n_modes", "bath_moments", int, 256)
    files = []
    for side in _need_sides(scen, "bath-moments"):
        if side.bath is None:
            raise ConfigError(f"{side.label}.bath: product bath-moments needs a bath")
        d = _side_dir(out, scen, side) / "bath_moments"
        d.mkdir(parents=True, exist_ok=True)
        i_bc, j_bc = bath_moment_kernels(side.bath, side.coupling_cb, grid, scen.hbar, n_modes)
        k_r = kernel_bc_two_time(side.bath, side.coupling_cb, grid, "r", scen.hbar)
        resp = cavity_response_time(side.cavity, grid, side.friction(), side.memory(grid))
        kset = composite_moment_kernels(i_bc, j_bc, k_r, resp, side.cavity.coupling_sc, variant)
        for name, k in kset.items():
            write_two_time_csv(d / f"{name}.csv", k)
            files.append(d / f"{name}.csv")
        (d / "metadata.json").write_text(_metadata(
            scen, side, {"idqdq_variant": variant, "n_modes": n_modes}))
        files.append(d / "metadata.json")
        log(f"{side.label}: bath-moment kernels ({variant} idqdq) on {grid.n_points} points")
    return files


def _run_fourier_compare(scen: Scenario, out: Path, log: _Log) -> List[Path]:
    grid = _need_grid(scen, "fourier-compare")
    fc = scen.fourier_compare
    probes = fc.get("probes")
    if not isinstance(probes, list) or not probes:
        raise ConfigError("fourier_compare.probes: missing required key (list of probe times)")
    nu_max = _take(fc, "nu_max", "fourier_compare", float, 3.0)
    n_nu = _take(fc, "n_nu", "fourier_compare", int, 301)
    t_ref = _take(fc, "t_ref", "fourier_compare", float, required=False)
    nus = np.linspace(-nu_max, nu_max, n_nu)
    files = []
    for side in _need_sides(scen, "fourier-compare"):
        d = _side_dir(out, scen, side)
        resp = cavity_response_time(side.cavity, grid, side.friction(), side.memory(grid))
        kern = vernon_imag_time(resp, side.cavity.coupling_sc)
        try:
            cmp_ = fourier_subtlety_compare(kern, [float(p) for p in probes], nus, t_ref)
        except (TypeError, ValueError) as exc:
            raise ConfigError(f"fourier_compare: {exc}") from None
        rows = ["t,nu,true_re,true_im,truncated_re,truncated_im"]
        for t, nu, tv, tr in cmp_.rows():
            rows.append(",".join(FMT % x for x in (t, nu, tv.real, tv.imag, tr.real, tr.imag)))
        target = d / "fourier_compare.csv"
        target.write_text("\n".join(rows) + "\n")
        files.append(target)
        for t, disc in zip(cmp_.probe_times, cmp_.discrepancy / cmp_.reference_norm):
            log(f"{side.label}: probe t={t:g} relative discrepancy {disc:.3e}")
    return files


def _run_validate(scen: Scenario, out: Path, log: _Log) -> List[Path]:
    results = run_all()
    rows = ["check,name,measured,tolerance,passed"]
    for r in results:
        log(format_line(r))
        rows.append(f"AC{r.number:02d},{r.name},{FMT % r.measured},{FMT % r.tolerance},"
                    f"{int(r.passed)}")
    target = out / "validation.csv"
    target.write_text("\n".join(rows) + "\n")
    failed = [r for r in results if not r.passed]
    if failed:
        raise NumericalError("validation failed: " + ", ".join(f"AC{r.number:02d}" for r in failed))
    return [target]


_RUNNERS = {
    "kernels": _run_kernels,
    "vernon": _run_vernon,
    "power": _run_power,
    "bath-moments": _run_bath_moments,
    "fourier-compare": _run_fourier_compare,
    "validate": _run_validate,
}

_MODULE_OF = {
    "kernels": "spectral/response/vernon",
    "vernon": "vernon",
    "power": "thermo",
    "bath-moments": "bathonly",
    "fourier-compare": "vernon",
    "validate": "validation",
}


def run(scen: Scenario, out: Path, log: Optional[_Log] = None) -> List[Path]:
    """Produce every requested product under ``out`` and write the manifest and log."""
    log = log or _Log()
    if not scen.products:
        raise ConfigError("products: at least one product must be requested")
    out.mkdir(parents=True, exist_ok=True)
    files: List[Path] = []
    manifest = {
        "version": __version__,
        "products": scen.products,
        "conventions": dict(CONVENTIONS,
                            idqdq_variant=str(scen.bath_moments.get("variant", "corrected"))),
        "files": [],
    }
    try:
        for product in scen.products:
            log(f"product {product}")
            try:
                files += _RUNNERS[product](scen, out, log)
            except ConfigError:
                raise
            except (GridError, ModelError, NumericalError) as exc:
                raise type(exc)(f"[{_MODULE_OF[product]}] {product}: {exc}") from exc
    finally:
        manifest["files"] = sorted(str(f.relative_to(out)) for f in files)
        (out / "manifest.json").write_text(json.dumps(manifest, indent=2, sort_keys=True) + "\n")
        (out / "run.log").write_text("\n".join(log.lines) + "\n")
    return files


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="vernonkit",
                                description="Influence-functional kernels and thermal power.")
    p.add_argument("--scenario", help="scenario YAML file")
    p.add_argument("--out", help="artifact directory (overrides scenario 'output')")
    p.add_argument("--product", action="append", choices=PRODUCTS,
                   help="product to compute; repeatable, overrides the scenario list")
    p.add_argument("--validate", action="store_true", help="also run the validation suite")
    p.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.scenario:
            scen = load_scenario(args.scenario)
        elif args.validate or args.product == ["validate"]:
            scen = Scenario(None, [], [])
        else:
            raise ConfigError("--scenario is required unless only validating")
        if args.product:
            scen.products = list(dict.fromkeys(args.product))
        if args.validate and "validate" not in scen.products:
            scen.products.append("validate")
        out = args.out or scen.output
        if out is None:
            raise ConfigError("output: no artifact directory (use --out or the 'output' key)")
        out_path = Path(out) if args.out or not args.scenario else scen.base_dir / out
        log = _Log()
        run(scen, out_path, log)
    except ConfigError as exc:
        print(f"vernonkit: config error: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (GridError, ModelError) as exc:
        print(f"vernonkit: invalid parameters: {exc}", file=sys.stderr)
        return _EXIT_CONFIG
    except (NumericalError, FloatingPointError, OSError, VernonError) as exc:
        print(f"vernonkit: numeric or output failure: {exc}", file=sys.stderr)
        return _EXIT_NUMERIC
    for line in log.lines:
        print(line)
    return _EXIT_OK


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
