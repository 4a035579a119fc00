"""Command-line front end.

    sgnwgn solitary   --c 1.1 --N 512 --L 20 --backend gmres --out waves
    sgnwgn evolve     --state waves/wave_c2.csv --model WGN --T 1 --nt 2000 --out run
    sgnwgn experiment cavitation --out cav
    sgnwgn check      --size small

Exit status: 0 on success, 1 on numerical failure, 2 on usage errors.
"""

import argparse
import configparser
import logging
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from datetime import datetime, timezone
from pathlib import Path

import numpy as np
import scipy

from . import __version__, io
from .errors import CavitationError, ConvergenceError, ParameterError
from .evolution import PRECONDITIONERS, evolve, make_state
from .experiments import DEFAULTS, SCENARIOS, Scenario, run_scenario
from .solitary import continuation, newton_solve, sgn_solitary
from .spectral import KRASNY_THRESHOLD, Model, make_grid

EXIT_OK, EXIT_NUMERIC, EXIT_USAGE = 0, 1, 2


class UsageError(Exception):
    pass


def _build_id():
    return f"sgnwgn {__version__} (numpy {np.__version__}, scipy {scipy.__version__})"


def _floats(text):
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected a list of numbers, got {text!r}") from exc


def _parser():
    p = argparse.ArgumentParser(prog="sgnwgn", description="SGN/WGN pseudospectral solvers")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    s = sub.add_parser("solitary", help="construct solitary waves")
    g = s.add_mutually_exclusive_group()
    g.add_argument("--c", type=float)
    g.add_argument("--c-list", type=_floats, help="ascending velocities for continuation")
    s.add_argument("--model", default="WGN", type=str.upper, choices=("SGN", "WGN"))
    s.add_argument("--N", type=int, default=512)
    s.add_argument("--L", type=float, default=20.0)
    s.add_argument("--backend", default="gmres", choices=("gmres", "lu"))
    s.add_argument("--precond", default="sgn", choices=("sgn", "large_c"))
    s.add_argument("--krasny", type=float, default=KRASNY_THRESHOLD)
    s.add_argument("--tol", type=float, default=1e-12)
    s.add_argument("--max-newton", type=int, default=25)
    s.add_argument("--out", default="waves")

    e = sub.add_parser("evolve", help="integrate an initial-value problem")
    e.add_argument("--state", help="table with zeta and u columns (default: SGN wave, c=2)")
    e.add_argument("--model", default="SGN", type=str.upper, choices=("SGN", "WGN"))
    e.add_argument("--delta", type=float, default=1.0)
    e.add_argument("--N", type=int)
    e.add_argument("--L", type=float)
    e.add_argument("--T", type=float, default=1.0)
    e.add_argument("--nt", type=int, default=2000)
    e.add_argument("--dealias", action="store_true")
    e.add_argument("--precond", default="flat", choices=PRECONDITIONERS)
    e.add_argument("--amplitude", type=float, default=1.0)
    e.add_argument("--record-every", type=int)
    e.add_argument("--snapshots", type=_floats, default=None)
    e.add_argument("--out", default="run")

    x = sub.add_parser("experiment", help="run named scenarios")
    x.add_argument("names", nargs="+", metavar="scenario", help=", ".join(SCENARIOS))
    x.add_argument("--config", help="key = value file with one [section] per scenario")
    x.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                   help="override any scenario parameter")
    for key, kind in (("model", str.upper), ("delta", float), ("N", int), ("L", float),
                      ("T", float), ("c", float), ("lam", float), ("a", float),
                      ("mode", str), ("shift", float), ("x0", float), ("precond", str),
                      ("amplitude", float), ("backend", str), ("record-every", int)):
        x.add_argument(f"--{key}", type=kind, dest=key.replace("-", "_"))
    x.add_argument("--nt", type=int, dest="Nt")
    x.add_argument("--dealias", action=argparse.BooleanOptionalAction, default=None)
    x.add_argument("--snapshots", type=str)
    x.add_argument("--out", default="experiments")
    x.add_argument("--jobs", type=int, default=1, help="run scenarios in parallel")

    c = sub.add_parser("check", help="run the invariant suite")
    c.add_argument("--size", choices=("small", "medium"), default="small")
    return p, {"solitary": s, "evolve": e, "experiment": x, "check": c}


def _base_manifest(argv, command):
    return {"command": command, "argv": argv, "build": _build_id(),
            "started": datetime.now(timezone.utc).isoformat(timespec="seconds")}


# ---------------------------------------------------------------- solitary

def cmd_solitary(a, argv):
    if a.c is None and not a.c_list:
        raise UsageError("give --c or --c-list")
    grid = make_grid(a.N, a.L)
    targets = a.c_list or [a.c]
    if any(c <= 1 for c in targets):
        raise UsageError("velocities must exceed 1")
    out = Path(a.out)
    os.makedirs(out, exist_ok=True)
    manifest = _base_manifest(argv, "solitary")
    manifest.update({"model": a.model, "N": a.N, "L": a.L, "backend": a.backend,
                     "precond": a.precond, "krasny": a.krasny, "tol": a.tol,
                     "c_list": " ".join(io.fmt(c) for c in targets)})
    started = time.perf_counter()
    opts = dict(precond=a.precond, krasny=a.krasny, tol=a.tol, max_newton=a.max_newton)
    try:
        if a.model == "SGN" and a.c is not None:
            waves = [sgn_solitary(a.c, grid)]
        elif len(targets) == 1:
            waves = [newton_solve(targets[0], grid, backend=a.backend, model=a.model, **opts)]
        else:
            waves = continuation(targets, grid, backend=a.backend, model=a.model, **opts)
    except (ConvergenceError, CavitationError) as exc:
        for w in getattr(exc, "waves", []):
            io.write_wave(out, w)
        manifest.update({"status": "failed", "message": str(exc),
                         "wall_seconds": time.perf_counter() - started})
        io.write_manifest(out / io.MANIFEST, manifest)
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    for w in waves:
        io.write_wave(out, w)
        print(f"c={io.fmt(w.c)} iterations={w.newton_iterations} "
              f"residual={w.residual_norm:.3e} history="
              + " ".join(f"{r:.1e}" for r in w.residual_history))
    manifest.update({"status": "ok", "wall_seconds": time.perf_counter() - started})
    io.write_manifest(out / io.MANIFEST, manifest)
    return EXIT_OK


# ------------------------------------------------------------------ evolve

def cmd_evolve(a, argv):
    if a.nt < 0:
        raise UsageError("--nt must be nonnegative")
    if a.nt > 0 and not a.T > 0:
        raise UsageError("--T must be positive")
    model = Model(a.model, a.delta)
    if a.state:
        meta, zeta, u = io.read_state_file(a.state)
        N = a.N or int(meta.get("N", zeta.size))
        L = a.L or float(meta.get("L", "nan"))
        if N != zeta.size:
            raise UsageError(f"--N {N} does not match the {zeta.size} rows of {a.state}")
        if not L > 0:
            raise UsageError("--L is required when the state file does not record L")
        grid = make_grid(N, L)
        source = a.state
    else:
        grid = make_grid(a.N or 512, a.L or 10.0)
        wave = sgn_solitary(2.0, grid)
        zeta, u = wave.zeta, wave.u
        source = "sgn_solitary c=2"
    snaps = a.snapshots if a.snapshots is not None else [a.T]
    out = Path(a.out)
    os.makedirs(out, exist_ok=True)
    state = make_state(grid, zeta, u, model, dealias=a.dealias)
    opts = {}
    if a.record_every:
        opts["record_every"] = a.record_every
    report = evolve(state, a.T, a.nt, model, precond=a.precond, amplitude=a.amplitude,
                    dealias=a.dealias, snapshot_times=snaps, **opts)
    return _finish(report, out, _base_manifest(argv, "evolve") | {"source": source})


def _finish(report, out, manifest):
    manifest = manifest | report.manifest
    manifest["aborted"] = report.aborted
    if report.message:
        manifest["message"] = report.message
    for key, value in report.derived.items():
        if np.ndim(value) == 0 and not isinstance(value, dict):
            manifest[f"derived.{key}"] = value
    if report.times:
        manifest["max_drift"] = " ".join(io.fmt(v) for v in report.max_drift)
    io.write_manifest(out / io.MANIFEST, manifest)
    io.emit_plot_data(report, out)
    if report.aborted:
        print(f"run aborted: {report.message}", file=sys.stderr)
        return EXIT_NUMERIC
    print(f"{out}: {report.steps_completed} steps, max drift "
          + " ".join(f"{v:.2e}" for v in report.max_drift))
    return EXIT_OK


# -------------------------------------------------------------- experiment

_FLAG_KEYS = ("model", "delta", "N", "L", "T", "Nt", "c", "lam", "a", "mode", "shift", "x0",
              "precond", "amplitude", "backend", "record_every", "dealias", "snapshots")


def _scenario_params(a, name):
    params = {}
    if a.config:
        cfg = configparser.ConfigParser()
        cfg.optionxform = str
        if not cfg.read(a.config, encoding="utf-8"):
            raise UsageError(f"cannot read config file {a.config}")
        if cfg.has_section(name):
            params.update(dict(cfg.items(name)))
    allowed = set(DEFAULTS[name]) | {"model", "delta", "N", "L", "T", "Nt", "dealias",
                                     "precond", "amplitude", "record_every", "snapshots"}
    for key in _FLAG_KEYS:
        value = getattr(a, key, None)
        if value is not None:
            if key not in allowed:
                raise UsageError(f"--{key} does not apply to scenario {name}")
            params[key] = value
    for item in a.set:
        key, sep, value = item.partition("=")
        if not sep:
            raise UsageError(f"--set expects KEY=VALUE, got {item!r}")
        params[key.strip()] = value.strip()
    if "precond" in params and params["precond"] not in PRECONDITIONERS:
        raise UsageError(f"unknown preconditioner {params['precond']!r}")
    return params


def _run_one(name, params, out, argv):
    s = Scenario(name, params)
    report = run_scenario(s)
    return _finish(report, Path(out), _base_manifest(argv, f"experiment {name}"))


def cmd_experiment(a, argv):
    for name in a.names:
        if name not in SCENARIOS:
            raise UsageError(f"unknown scenario {name!r}; choose from {', '.join(SCENARIOS)}")
    if a.jobs < 1:
        raise UsageError("--jobs must be at least 1")
    jobs = []
    for name in a.names:
        params = _scenario_params(a, name)
        Scenario(name, params)  # validate everything before any compute
        out = Path(a.out) / name if len(a.names) > 1 else Path(a.out)
        os.makedirs(out, exist_ok=True)
        jobs.append((name, params, out))
    if a.jobs == 1 or len(jobs) == 1:
        codes = [_run_one(n, p, o, argv) for n, p, o in jobs]
    else:
        with ProcessPoolExecutor(max_workers=a.jobs) as pool:
            codes = list(pool.map(_run_one, *zip(*jobs), [argv] * len(jobs)))
    return max(codes)


# ------------------------------------------------------------------ check

def cmd_check(a, argv):
    from .checks import run_checks

    results = run_checks(a.size)
    for name, ok, detail in results:
        print(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")
    return EXIT_OK if all(ok for _, ok, _ in results) else EXIT_NUMERIC


COMMANDS = {"solitary": cmd_solitary, "evolve": cmd_evolve, "experiment": cmd_experiment,
            "check": cmd_check}


def main(argv=None):
    parser, subparsers = _parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code) if exc.code is not None else EXIT_OK
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    sub = subparsers[args.command]
    try:
        return COMMANDS[args.command](args, " ".join(argv))
    except (UsageError, ParameterError) as exc:
        sub.print_usage(sys.stderr)
        print(f"{sub.prog}: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConvergenceError, CavitationError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
