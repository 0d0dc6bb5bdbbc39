"""CSV readers and writers for kernels, spectra and two-time matrices.

Every float is written with 17 significant digits so files round-trip exactly.
"""

from __future__ import annotations

import csv
from pathlib import Path

import numpy as np

from .errors import ConfigError, GridError
from .numgrid import LagGrid, SampledKernel, Spectrum, TwoTimeKernel

FMT = "%.17g"


def _fmt(x: float) -> str:
    return FMT % x


def write_kernel_csv(path, k: SampledKernel) -> None:
    """``tau,value`` rows, lags ascending."""
    vals = np.asarray(k.values)
    if np.iscomplexobj(vals):
        rows = ["tau,re,im"]
        rows += [f"{_fmt(t)},{_fmt(v.real)},{_fmt(v.imag)}" for t, v in zip(k.taus, vals)]
    else:
        rows = ["tau,value"] + [f"{_fmt(t)},{_fmt(v)}" for t, v in zip(k.taus, vals)]
    Path(path).write_text("\n".join(rows) + "\n")


def write_spectrum_csv(path, spec: Spectrum) -> None:
    rows = ["nu,re,im"]
    rows += [f"{_fmt(n)},{_fmt(v.real)},{_fmt(v.imag)}" for n, v in zip(spec.nus, spec.values)]
    Path(path).write_text("\n".join(rows) + "\n")


def write_two_time_csv(path, k: TwoTimeKernel) -> None:
    """``t,s,value`` rows, row-major in ``t`` (``t,s,re,im`` if complex)."""
    t = k.grid.times
    if np.iscomplexobj(k.values):
        lines = ["t,s,re,im"]
        for a, ta in enumerate(t):
            lines.extend(f"{_fmt(ta)},{_fmt(sb)},{_fmt(v.real)},{_fmt(v.imag)}"
                         for sb, v in zip(t, k.values[a]))
    else:
        lines = ["t,s,value"]
        for a, ta in enumerate(t):
            lines.extend(f"{_fmt(ta)},{_fmt(sb)},{_fmt(v)}" for sb, v in zip(t, k.values[a]))
    Path(path).write_text("\n".join(lines) + "\n")


def _read_table(path, expected):
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"file not found: {path}")
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        try:
            header = [h.strip() for h in next(reader)]
        except StopIteration:
            raise ConfigError(f"{path} is empty") from None
        if header not in expected:
            raise ConfigError(f"{path}: header {header} not one of {expected}")
        try:
            data = np.array([[float(x) for x in row] for row in reader if row], dtype=float)
        except ValueError as exc:
            raise ConfigError(f"{path}: non-numeric entry ({exc})") from None
    if data.size == 0:
        raise ConfigError(f"{path} has no data rows")
    return header, data


def _lag_grid_from(taus: np.ndarray, path) -> LagGrid:
    n = taus.size
    if n < 3 or n % 2 == 0:
        raise GridError(f"{path}: lag column needs an odd number (>= 3) of samples")
    grid = LagGrid(float(taus[-1]), n)
    if not np.allclose(grid.taus, taus, rtol=0, atol=1e-9 * grid.dt):
        raise GridError(f"{path}: lags are not uniform and symmetric about zero")
    return grid


def read_kernel_csv(path, parity="none") -> SampledKernel:
    """Read ``tau,value`` (real) or ``tau,re,im`` (complex) lag data."""
    header, data = _read_table(path, (["tau", "value"], ["tau", "re", "im"]))
    grid = _lag_grid_from(data[:, 0], path)
    vals = data[:, 1] if header[1] == "value" else data[:, 1] + 1j * data[:, 2]
    if parity != "none":
        return SampledKernel(grid, vals).symmetrized(parity)
    return SampledKernel(grid, vals)


def read_spectrum_csv(path) -> Spectrum:
    _, data = _read_table(path, (["nu", "re", "im"],))
    return Spectrum(data[:, 0], data[:, 1] + 1j * data[:, 2])
