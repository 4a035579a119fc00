"""Named scenarios: initial data builders, runners and derived diagnostics.

Every scenario is a :class:`Scenario` (a name plus a flat parameter record)
and :func:`run_scenario` turns it into a :class:`~sgnwgn.evolution.RunReport`
whose ``derived`` dict carries the scenario-specific series.
"""

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import least_squares, minimize_scalar

from .errors import CavitationError, ConvergenceError, ParameterError
from .evolution import RunReport, evolve, make_state
from .solitary import newton_solve, sgn_solitary
from .spectral import Model, dx, make_grid

SCENARIOS = ("solitary_validation", "perturbed_solitary", "simple_wave", "camassa_holm",
             "cavitation")

_COMMON = {"model": "SGN", "delta": 1.0, "N": 512, "L": 10.0, "T": 1.0, "Nt": 2000,
           "dealias": False, "precond": "flat", "amplitude": 1.0, "record_every": 0,
           "snapshots": ""}

DEFAULTS = {
    "solitary_validation": {"c": 2.0, "backend": "gmres"},
    "perturbed_solitary": {"c": 2.0, "mode": "scale_u", "lam": 0.99, "a": 0.01,
                           "shift": 0.0, "N": 1024, "T": 10.0, "backend": "gmres"},
    "simple_wave": {"x0": -3.0, "delta": 0.1, "N": 1024, "L": 3.0, "T": 5.0, "Nt": 10000},
    "camassa_holm": {"delta": math.sqrt(0.1), "N": 2048, "L": 5.0, "T": 10.0,
                     "Nt": 10000, "dealias": True},
    "cavitation": {"N": 4096, "L": 2.5, "T": 3.0, "Nt": 10000, "dealias": True,
                   "precond": "scaled"},
}

PERTURBATIONS = ("scale_u", "scale_zeta", "gauss_u", "gauss_zeta")


@dataclass
class Scenario:
    """A named run configuration; unspecified parameters take the scenario defaults."""

    name: str
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.name not in SCENARIOS:
            raise ParameterError(f"unknown scenario {self.name!r}; choose from {SCENARIOS}")
        allowed = {**_COMMON, **DEFAULTS[self.name]}
        unknown = set(self.params) - set(allowed)
        if unknown:
            raise ParameterError(f"unknown parameters for {self.name}: {sorted(unknown)}")
        resolved = dict(allowed)
        for key, value in self.params.items():
            resolved[key] = _coerce(key, value, allowed[key])
        self.params = resolved
        self.validate()

    def validate(self):
        p = self.params
        Model(p["model"], p["delta"])
        make_grid(p["N"], p["L"])
        if p["Nt"] < 0 or (p["Nt"] > 0 and not p["T"] > 0):
            raise ParameterError("need Nt >= 0 and T > 0")
        if "c" in p and not p["c"] > 1:
            raise ParameterError(f"solitary velocity must exceed 1, got {p['c']}")
        if p.get("mode", "scale_u") not in PERTURBATIONS:
            raise ParameterError(f"unknown perturbation {p['mode']!r}")
        if self.name == "camassa_holm" and not p["delta"] ** 2 <= 0.5:
            raise ParameterError("camassa_holm data needs delta^2 <= 0.5")

    @property
    def grid(self):
        return make_grid(self.params["N"], self.params["L"])

    @property
    def model(self):
        return Model(self.params["model"], self.params["delta"])

    @property
    def snapshot_times(self):
        text = str(self.params["snapshots"]).strip()
        return [float(t) for t in text.replace(",", " ").split()] if text else []


def _coerce(key, value, default):
    if isinstance(default, bool):
        if isinstance(value, str):
            low = value.strip().lower()
            if low not in ("1", "0", "true", "false", "yes", "no", "on", "off"):
                raise ParameterError(f"{key} expects a boolean, got {value!r}")
            return low in ("1", "true", "yes", "on")
        return bool(value)
    if isinstance(default, int):
        number = float(value)
        if number != int(number):
            raise ParameterError(f"{key} expects an integer, got {value!r}")
        return int(number)
    if isinstance(default, float):
        return float(value)
    return str(value).strip() if isinstance(value, str) else value


# ---------------------------------------------------------------- initial data

def _shifted(values, grid, shift):
    # f(x + shift) by a spectral phase factor; exact for resolved periodic data
    if shift == 0:
        return values
    return grid.ifft(grid.fft(values) * np.exp(1j * grid.kr * shift))


def solitary_wave(c, grid, model, backend="gmres", **opts):
    """Base wave: explicit for SGN, Newton-constructed for WGN."""
    model = Model(model) if isinstance(model, str) else model
    if model.kind == "SGN":
        return sgn_solitary(c, grid)
    if model.delta != 1.0:
        raise ParameterError("WGN solitary waves are built for delta = 1 only")
    if "precond" not in opts and c > 5:
        opts["precond"] = "large_c"
    return newton_solve(c, grid, backend=backend, model="WGN", **opts)


def ic_perturbed_solitary(c, grid, mode="scale_u", lam=1.0, a=0.0, model=Model(),
                          shift=0.0, wave=None):
    """Solitary wave with exactly one field perturbed.

    ``scale_u``: ``u = lam u_c``; ``scale_zeta``: ``zeta = lam zeta_c``;
    ``gauss_u``/``gauss_zeta``: add ``a exp(-x^2)``.  With ``shift = s`` the
    data are evaluated at ``x + s``, i.e. centered at ``x = -s``.
    """
    if wave is None:
        wave = solitary_wave(c, grid, model)
    zeta, u = wave.zeta.copy(), wave.u.copy()
    bump = np.exp(-grid.x**2)
    if mode == "scale_u":
        u = lam * u
    elif mode == "scale_zeta":
        zeta = lam * zeta
    elif mode == "gauss_u":
        u = u + a * bump
    elif mode == "gauss_zeta":
        zeta = zeta + a * bump
    else:
        raise ParameterError(f"unknown perturbation {mode!r}")
    zeta, u = _shifted(zeta, grid, shift), _shifted(u, grid, shift)
    return make_state(grid, zeta, u, model)


def riemann_invariant(zeta, u):
    """``r = u + 2 sqrt(1 + zeta) - 2``."""
    h = 1.0 + np.asarray(zeta)
    if np.min(h) <= 0:
        raise CavitationError("riemann invariant needs 1 + zeta > 0", float(np.min(h)))
    return np.asarray(u) + 2.0 * np.sqrt(h) - 2.0


def simple_wave_data(x, x0=-3.0, amplitude=1.0):
    zeta = amplitude * np.exp(-(x - x0) ** 2)
    return zeta, 2.0 * np.sqrt(1.0 + zeta) - 2.0


def ic_simple_wave(x0, delta, grid, model="SGN", amplitude=1.0):
    """Gaussian surface with the right-moving Riemann velocity datum."""
    zeta, u = simple_wave_data(grid.x, x0, amplitude)
    return make_state(grid, zeta, u, Model(getattr(model, "kind", model), delta))


def camassa_holm_data(grid, delta):
    """``(zeta0, u0)`` from the odd datum ``w0 = -x exp(-x^2)`` (time derivative eliminated)."""
    d2 = delta**2
    x = grid.x
    w = -x * np.exp(-x**2)
    wxx = dx(dx(w, grid), grid)
    u = w + d2 / 12.0 * wxx + d2 / 6.0 * w * wxx
    ux = dx(u, grid)
    uxx = dx(ux, grid)
    zeta = (u + 0.25 * u**2 - d2 / 6.0 * dx(dx(u + 0.75 * u**2, grid), grid)
            - d2 / 6.0 * u * uxx - 5.0 * d2 / 48.0 * ux**2)
    return zeta, u


def ic_camassa_holm(delta, grid, model="SGN", dealias=True):
    if not delta**2 <= 0.5:
        raise ParameterError("camassa_holm data needs delta^2 <= 0.5")
    zeta, u = camassa_holm_data(grid, delta)
    return make_state(grid, zeta, u, Model(getattr(model, "kind", model), delta),
                      dealias=dealias)


def cavitation_data(x):
    return -0.9 * np.exp(-x**2), -x * np.exp(-x**2)


def ic_cavitation(grid, model="SGN", dealias=True):
    zeta, u = cavitation_data(grid.x)
    return make_state(grid, zeta, u, Model(getattr(model, "kind", model), 1.0),
                      dealias=dealias)


# ------------------------------------------------------------------ iB oracle

class TrigInterpolant:
    """Trigonometric interpolant of grid samples, evaluable anywhere."""

    def __init__(self, grid, values, chunk=256):
        self.grid = grid
        n = grid.N
        coeffs = np.fft.rfft(np.asarray(values, dtype=float)) / n
        weights = np.full(coeffs.shape, 2.0)
        weights[0] = 1.0
        weights[-1] = 1.0  # Nyquist counted once
        self._c = coeffs * weights
        self._k = grid.kr
        self._x0 = grid.x[0]  # sample with DFT index 0
        self._chunk = chunk

    def _eval(self, xq, factor):
        xq = np.atleast_1d(np.asarray(xq, dtype=float))
        out = np.empty(xq.shape)
        flat, res = xq.ravel(), out.ravel()
        for i in range(0, flat.size, self._chunk):
            phase = np.exp(1j * np.outer(flat[i:i + self._chunk] - self._x0, self._k))
            res[i:i + self._chunk] = (phase @ (self._c * factor)).real
        return out

    def __call__(self, xq):
        return self._eval(xq, 1.0)

    def derivative(self, xq):
        fac = 1j * self._k
        fac[-1] = 0.0
        return self._eval(xq, fac)


@dataclass
class CharacteristicSolution:
    shock_time: float
    t: float
    x: np.ndarray
    r: np.ndarray = None
    past_shock: bool = False


def ib_shock_time(r0, grid):
    """Breaking time ``-1/min(3/4 r0')`` of the iB equation (``inf`` if none)."""
    interp = r0 if isinstance(r0, TrigInterpolant) else TrigInterpolant(grid, r0)
    d = dx(interp(grid.x), grid)
    i = int(np.argmin(d))
    if d[i] >= 0:
        return math.inf
    lo, hi = grid.x[i] - grid.dx, grid.x[i] + grid.dx
    best = minimize_scalar(lambda s: interp.derivative(s)[0], bounds=(lo, hi),
                           method="bounded", options={"xatol": 1e-13})
    slope = min(float(best.fun), float(d[i]))
    if slope >= 0:
        return math.inf
    return -1.0 / (0.75 * slope)


def ib_characteristic_oracle(r0, t, grid, x=None, iterations=64):
    """Solution at time ``t`` of ``r_t + (1 + 3/4 r) r_x = 0`` by characteristics.

    ``r0`` is a callable or samples on ``grid`` (then its trigonometric
    interpolant is used).  For ``t`` below the breaking time the foot
    ``x0`` of the characteristic through each point of ``x`` (default: the
    grid) is found by bisection of the monotone map
    ``x0 -> x0 + (1 + 3/4 r0(x0)) t``.
    """
    if isinstance(r0, TrigInterpolant):
        interp = r0
    else:
        samples = r0(grid.x) if callable(r0) else np.asarray(r0, dtype=float)
        interp = TrigInterpolant(grid, samples)
    x = grid.x if x is None else np.asarray(x, dtype=float)
    ts = ib_shock_time(interp, grid)
    if t >= ts:
        return CharacteristicSolution(ts, t, x, None, True)
    if t == 0:
        return CharacteristicSolution(ts, t, x, interp(x))
    samples = interp(grid.x)
    lo = x - (1.0 + 0.75 * samples.max()) * t
    hi = x - (1.0 + 0.75 * samples.min()) * t
    for _ in range(iterations):
        mid = 0.5 * (lo + hi)
        ahead = mid + (1.0 + 0.75 * interp(mid)) * t > x
        hi = np.where(ahead, mid, hi)
        lo = np.where(ahead, lo, mid)
        if np.max(hi - lo) < 1e-15 * max(1.0, grid.length):
            break
    foot = 0.5 * (lo + hi)
    return CharacteristicSolution(ts, t, x, interp(foot))


# ------------------------------------------------------------ diagnostics

def settling_statistics(t, series, window=1.0, transient=None):
    """Oscillation amplitude of ``series`` over consecutive windows of width ``window``.

    Returns a dict with window centers and peak-to-peak amplitudes, the
    transient amplitude (first window, or the first ``transient`` time
    units), the standard deviation over the last quarter, and ``settled``:
    last-quarter deviation below 10% of the transient amplitude.
    """
    t = np.asarray(t, dtype=float)
    y = np.asarray(series, dtype=float)
    if t.size < 2:
        raise ParameterError("need at least two records")
    edges = np.arange(t[0], t[-1] + window * 0.5, window)
    centers, amps = [], []
    for a, b in zip(edges[:-1], edges[1:]):
        sel = (t >= a) & (t <= b)
        if sel.sum() >= 2:
            centers.append(0.5 * (a + b))
            amps.append(float(np.ptp(y[sel])))
    first = t <= t[0] + (window if transient is None else transient)
    transient_amp = float(np.ptp(y[first]))
    last = t >= t[0] + 0.75 * (t[-1] - t[0])
    tail_std = float(np.std(y[last]))
    return {"centers": np.array(centers), "amplitudes": np.array(amps),
            "transient": transient_amp, "tail_std": tail_std,
            "settled": bool(tail_std < 0.1 * transient_amp) if transient_amp > 0 else True}


def fit_solitary(x, zeta, center=None, width=None, c0=None):
    """Least-squares fit of an SGN solitary profile to ``zeta`` on a window.

    Returns ``(c, x0, misfit)`` with the misfit relative to the max of
    ``zeta`` on the window.
    """
    x = np.asarray(x, dtype=float)
    zeta = np.asarray(zeta, dtype=float)
    if center is None:
        center = x[np.argmax(zeta)]
    if width is None:
        width = 0.1 * (x[-1] - x[0])
    sel = np.abs(x - center) <= width
    xs, zs = x[sel], zeta[sel]
    peak = float(np.max(np.abs(zs)))
    if c0 is None:
        c0 = math.sqrt(1.0 + max(float(np.max(zs)), 1e-6))

    def profile(p):
        c, x0 = p
        amp = c**2 - 1.0
        alpha = 0.5 * math.sqrt(3.0) * math.sqrt(max(amp, 0.0)) / c
        return amp / np.cosh(np.clip(alpha * (xs - x0), -350, 350)) ** 2

    fit = least_squares(lambda p: profile(p) - zs, [c0, center],
                        bounds=([1.0 + 1e-9, xs[0]], [np.inf, xs[-1]]))
    misfit = float(np.max(np.abs(fit.fun))) / peak if peak > 0 else 0.0
    return float(fit.x[0]), float(fit.x[1]), misfit


def translate(values, grid, distance):
    """``f(x - distance)``, spectrally exact."""
    return _shifted(values, grid, -distance)


# ------------------------------------------------------------------ runner

def _initial_state(s, wave_holder):
    p, grid, model = s.params, s.grid, s.model
    if s.name in ("solitary_validation", "perturbed_solitary"):
        wave = solitary_wave(p["c"], grid, model, backend=p["backend"])
        wave_holder.append(wave)
        if s.name == "solitary_validation":
            return make_state(grid, wave.zeta, wave.u, model)
        return ic_perturbed_solitary(p["c"], grid, p["mode"], p["lam"], p["a"], model,
                                     p["shift"], wave=wave)
    if s.name == "simple_wave":
        return ic_simple_wave(p["x0"], p["delta"], grid, model.kind)
    if s.name == "camassa_holm":
        return ic_camassa_holm(p["delta"], grid, model.kind, dealias=p["dealias"])
    return ic_cavitation(grid, model.kind, dealias=p["dealias"])


def run_scenario(s, hooks=(), **evolve_opts):
    """Build, run and post-process a scenario.  Failed runs come back flagged ``aborted``."""
    if not isinstance(s, Scenario):
        raise ParameterError("run_scenario expects a Scenario")
    p, grid, model = s.params, s.grid, s.model
    waves = []
    opts = {"precond": p["precond"], "amplitude": p["amplitude"], "dealias": p["dealias"],
            "snapshot_times": s.snapshot_times, "hooks": hooks}
    if p["record_every"] > 0:
        opts["record_every"] = p["record_every"]
    step_min_h = []
    if s.name == "cavitation":
        opts["step_hooks"] = (lambda st: step_min_h.append(float(np.min(st.h))),)
    opts.update(evolve_opts)

    try:
        initial = _initial_state(s, waves)
    except (ConvergenceError, CavitationError) as exc:
        return RunReport(manifest={"scenario": s.name, **p}, aborted=True, message=str(exc))
    report = evolve(initial, p["T"], p["Nt"], model, **opts)
    report.manifest = {"scenario": s.name, **p, **report.manifest}
    d = report.derived

    if s.name in ("solitary_validation", "perturbed_solitary") and waves:
        wave = waves[0]
        d["wave_c"] = wave.c
        d["wave_residual"] = wave.residual_norm
        d["wave_newton_iterations"] = wave.newton_iterations
    if s.name == "solitary_validation" and waves and not report.aborted:
        wave, final = waves[0], report.final
        shift = wave.c * final.t
        d["error_zeta"] = float(np.max(np.abs(final.zeta - translate(wave.zeta, grid, shift))))
        d["error_u"] = float(np.max(np.abs(report.final_u - translate(wave.u, grid, shift))))
        d["error"] = max(d["error_zeta"], d["error_u"])
    if s.name == "perturbed_solitary" and len(report.times) > 1:
        d["settling_zeta"] = settling_statistics(report.t, report.linf_zeta)
        d["settling_u"] = settling_statistics(report.t, report.linf_u)
    if s.name == "simple_wave":
        d["riemann_final"] = riemann_invariant(report.final.zeta, report.final_u)
        d["riemann_snapshots"] = [(sn.t, riemann_invariant(sn.zeta, sn.u))
                                  for sn in report.snapshots]
    if s.name in ("camassa_holm", "cavitation", "simple_wave") and report.times:
        d["max_linf_dzeta"] = float(np.max(report.linf_dzeta))
        d["blowup"] = bool(not np.all(np.isfinite(report.linf_dzeta)) or report.aborted)
    if s.name == "cavitation" and report.times:
        lz = np.asarray(report.linf_zeta)
        i = int(np.argmax(lz))
        d["step_min_h"] = np.array(step_min_h)
        d["min_h"] = float(min([*report.min_h, *step_min_h]))
        d["max_linf_zeta"] = float(lz[i])
        d["t_max_linf_zeta"] = float(report.times[i])
        d["decreasing_after_max"] = bool(i < len(lz) - 1 and lz[-1] < lz[i])
    return report


def scenario(name, **params):
    return Scenario(name, params)


__all__ = [
    "Scenario", "SCENARIOS", "DEFAULTS", "scenario", "run_scenario", "solitary_wave",
    "ic_perturbed_solitary", "ic_simple_wave", "ic_camassa_holm", "ic_cavitation",
    "simple_wave_data", "camassa_holm_data", "cavitation_data", "riemann_invariant",
    "TrigInterpolant", "CharacteristicSolution", "ib_shock_time", "ib_characteristic_oracle",
    "settling_statistics", "fit_solitary", "translate",
]
