"""Plain-text output: manifests, diagnostics tables, snapshots, spectra and waves.

Numbers are written with ``repr`` of Python floats, the shortest string that
round-trips (at most 17 significant digits, '.' separator in every locale).
Every data file starts with a ``# manifest = ...`` line naming its manifest.
"""

import math
import os
from pathlib import Path

import numpy as np

from .errors import ParameterError
from .solitary import SolitaryWave
from .spectral import make_grid

MANIFEST = "manifest.txt"


def fmt(value):
    """Locale-independent shortest round-trip representation."""
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        value = float(value)
        if math.isnan(value):
            return "nan"
        if math.isinf(value):
            return "inf" if value > 0 else "-inf"
        return repr(value)
    return str(value)


def tag(value):
    """Compact form of a number for file names (``0.5``, ``2``, ``1.1``)."""
    value = float(value)
    return fmt(int(value)) if value == int(value) else fmt(value)


def _open(path, mode="w"):
    try:
        return open(path, mode, encoding="ascii", newline="\n")
    except OSError as exc:
        raise OSError(f"cannot open {path}: {exc.strerror}") from exc


def write_manifest(path, manifest):
    path = Path(path)
    with _open(path) as f:
        for key, value in manifest.items():
            text = fmt(value).replace("\n", " ")
            f.write(f"{key} = {text}\n")
    return path


def read_manifest(path):
    """Manifest entries as strings (convert with ``float``/``int`` as needed)."""
    out = {}
    with _open(path, "r") as f:
        for line in f:
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            out[key.strip()] = value.strip()
    return out


def write_table(path, columns, header, meta=None, manifest=MANIFEST):
    """Write equal-length columns as CSV preceded by ``# key = value`` lines."""
    path = Path(path)
    columns = [np.asarray(c) for c in columns]
    if len({c.shape[0] for c in columns}) > 1:
        raise ParameterError("columns must have equal length")
    with _open(path) as f:
        f.write(f"# manifest = {manifest}\n")
        for key, value in (meta or {}).items():
            f.write(f"# {key} = {fmt(value)}\n")
        f.write(",".join(header) + "\n")
        for row in zip(*columns):
            f.write(",".join(fmt(v) for v in row) + "\n")
    return path


def read_table(path):
    """Return ``(meta, header, data)``; ``data`` has one column per header field."""
    meta, header, rows = {}, None, []
    with _open(path, "r") as f:
        for line in f:
            line = line.strip()
            if not line:
                continue
            if line.startswith("#"):
                key, _, value = line[1:].partition("=")
                meta[key.strip()] = value.strip()
            elif header is None:
                header = line.split(",")
            else:
                rows.append([float(v) for v in line.split(",")])
    if header is None:
        raise ParameterError(f"{path}: no header line")
    data = np.array(rows, dtype=float).reshape(-1, len(header))
    return meta, header, data


# ------------------------------------------------------------------ waves

def write_wave(out, wave, manifest=MANIFEST):
    """``wave_c<c>.csv`` (x, eta, zeta, u) and ``wave_c<c>_spec.csv`` (j, k_j, |eta_j|)."""
    out = Path(out)
    grid = wave.grid
    meta = {"c": wave.c, "N": grid.N, "L": grid.L, "model": wave.model,
            "backend": wave.backend, "residual_norm": wave.residual_norm,
            "iterations": wave.newton_iterations}
    name = f"wave_c{tag(wave.c)}"
    path = write_table(out / f"{name}.csv", [grid.x, wave.eta, wave.zeta, wave.u],
                       ["x", "eta", "zeta", "u"], meta, manifest)
    j = np.arange(grid.N // 2 + 1)
    write_table(out / f"{name}_spec.csv", [j, grid.kr, np.abs(grid.fft(wave.eta))],
                ["j", "k", "abs_eta"], meta, manifest)
    return path


def read_wave(path):
    meta, header, data = read_table(path)
    cols = dict(zip(header, data.T))
    grid = make_grid(int(meta["N"]), float(meta["L"]))
    wave = SolitaryWave.from_eta(cols["eta"], float(meta["c"]), grid, model=meta.get("model", "WGN"),
                                 backend=meta.get("backend", "file"),
                                 residual_norm=float(meta.get("residual_norm", "nan")),
                                 newton_iterations=int(float(meta.get("iterations", 0))))
    return wave


def read_state_file(path):
    """``(meta, zeta, u)`` from any table with ``zeta`` and ``u`` columns."""
    meta, header, data = read_table(path)
    cols = dict(zip(header, data.T))
    if "zeta" not in cols or "u" not in cols:
        raise ParameterError(f"{path}: state files need 'zeta' and 'u' columns")
    return meta, cols["zeta"], cols["u"]


# ---------------------------------------------------------------- reports

def emit_plot_data(report, out, which=("series", "snapshot", "spectrum"), manifest=MANIFEST):
    """Write report series and snapshots under ``out``; returns the written paths.

    ``series``: ``diagnostics.csv`` (t, I1..I4, drifts, norms, min h) and
    ``linf.csv`` (t, |zeta|inf, |u|inf).  ``snapshot``: ``snap_t<t>.csv``
    (x, zeta, u).  ``spectrum``: ``spec_t<t>.csv`` (j, k_j, moduli and their
    log10).
    """
    if isinstance(which, str):
        which = (which,)
    unknown = set(which) - {"series", "snapshot", "spectrum"}
    if unknown:
        raise ParameterError(f"unknown plot data kinds {sorted(unknown)}")
    out = Path(out)
    os.makedirs(out, exist_ok=True)
    written = []
    if "series" in which and report.times:
        I = report.I
        drift = report.relative_drift
        cols = [report.t, *I.T, *drift.T, report.linf_zeta, report.linf_u,
                report.linf_dzeta, report.min_h]
        header = ["t", "I1", "I2", "I3", "I4", "drift1", "drift2", "drift3", "drift4",
                  "linf_zeta", "linf_u", "linf_dzeta", "min_h"]
        meta = {"aborted": report.aborted, "steps_completed": report.steps_completed}
        written.append(write_table(out / "diagnostics.csv", cols, header, meta, manifest))
        written.append(write_table(out / "linf.csv",
                                   [report.t, report.linf_zeta, report.linf_u],
                                   ["t", "linf_zeta", "linf_u"], None, manifest))
    grid = report.final.grid if report.final is not None else None
    for snap in report.snapshots:
        if "snapshot" in which:
            written.append(write_table(out / f"snap_t{tag(snap.t)}.csv",
                                       [grid.x, snap.zeta, snap.u], ["x", "zeta", "u"],
                                       {"t": snap.t}, manifest))
        if "spectrum" in which:
            az = np.abs(grid.fft(snap.zeta))
            au = np.abs(grid.fft(snap.u))
            with np.errstate(divide="ignore"):
                lz, lu = np.log10(az), np.log10(au)
            written.append(write_table(
                out / f"spec_t{tag(snap.t)}.csv",
                [np.arange(grid.N // 2 + 1), grid.kr, az, au, lz, lu],
                ["j", "k", "abs_zeta", "abs_u", "log10_zeta", "log10_u"],
                {"t": snap.t}, manifest))
    return written
