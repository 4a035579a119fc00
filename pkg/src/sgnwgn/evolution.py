"""Time integration of the SGN/WGN systems in the ``(zeta, v)`` form.

    d_t zeta + d_x(h u) = 0,
    d_t v + d_x(zeta + u v - u^2/2 - delta^2/2 h^2 (DF u)^2) = 0,
    v = u - delta^2/(3h) DF(h^3 DF u),          h = 1 + zeta,

with ``DF = d/dx F(delta |D|)`` for WGN and ``d/dx`` for SGN.  The state is
advanced with classical RK4 on its Fourier coefficients; ``u`` is recovered
at every stage with preconditioned GMRES, warm-started from the latest
velocity.
"""

import logging
import time
import warnings
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from . import krylov
from .errors import CavitationError, ConvergenceError, ParameterError
from .spectral import (Grid, Model, as_model, dealias_mask, dx_symbol, dxF_symbol,
                       whitham_symbol)

log = logging.getLogger(__name__)

ELLIPTIC_TOL = 1e-13
ELLIPTIC_ACCEPT = 1e-10
RK4_STABILITY = 2.8

# equispaced extrapolation to the next step from the last m values (newest first)
_EXTRAPOLATION = {1: (1.0,), 2: (2.0, -1.0), 3: (3.0, -3.0, 1.0), 4: (4.0, -6.0, 4.0, -1.0)}


@dataclass
class State:
    """Evolution unknowns stored as rfft coefficients."""

    grid: Grid
    zeta_hat: np.ndarray
    v_hat: np.ndarray
    t: float = 0.0

    @classmethod
    def from_values(cls, grid, zeta, v, t=0.0):
        return cls(grid, grid.fft(np.asarray(zeta, dtype=float)),
                   grid.fft(np.asarray(v, dtype=float)), float(t))

    @property
    def zeta(self):
        return self.grid.ifft(self.zeta_hat)

    @property
    def v(self):
        return self.grid.ifft(self.v_hat)

    @property
    def h(self):
        return 1.0 + self.zeta

    def copy(self):
        return State(self.grid, self.zeta_hat.copy(), self.v_hat.copy(), self.t)


@dataclass
class ConservedSet:
    mass: float
    momentum: float
    energy: float
    tangential: float

    def as_array(self):
        return np.array([self.mass, self.momentum, self.energy, self.tangential])


def _check_depth(h):
    hmin = float(np.min(h))
    if not hmin > 0:
        raise CavitationError(f"cavitation: min h = {hmin!r} <= 0", hmin)


def elliptic_symbol(grid, model):
    """Symbol of the elliptic operator about the flat state, ``1 - delta^2 (DF)^2 / 3``."""
    m = as_model(model)
    d = dxF_symbol(grid, m)
    sym = 1.0 - m.delta**2 * (d * d).real / 3.0
    # the Nyquist entry of an odd symbol is zeroed; keep the even symbol there
    kn = grid.kr[-1]
    if m.kind == "WGN":
        sym[-1] = 1.0 + m.delta**2 * kn**2 * whitham_symbol(m.delta * kn) ** 2 / 3.0
    else:
        sym[-1] = 1.0 + m.delta**2 * kn**2 / 3.0
    return sym


def preconditioner_symbol(grid, model, kind="flat", amplitude=1.0):
    """Diagonal preconditioner for the elliptic solve.

    ``"flat"``: the operator linearized about ``zeta = 0`` (this is
    ``1 + delta^2 k^2/3`` for SGN).  ``"sgn"``: ``1 + delta^2 k^2/3`` for
    either model.  ``"amplitude"``: ``1 + amplitude delta^2 k^2/3``.
    For ``"scaled"`` this returns the constant-coefficient part only; see
    :class:`ScaledPreconditioner`.
    """
    m = as_model(model)
    if kind in ("flat", "scaled"):
        return elliptic_symbol(grid, m)
    if kind == "sgn":
        return 1.0 + m.delta**2 * grid.kr**2 / 3.0
    if kind == "amplitude":
        return 1.0 + amplitude * m.delta**2 * grid.kr**2 / 3.0
    raise ParameterError(f"unknown preconditioner {kind!r}")


class ScaledPreconditioner:
    """Depth-scaled inverse ``h^{-3/2} Q^{-1} h^{-1/2}`` for the elliptic operator.

    ``Q`` is the multiplier ``1/hbar^2 + (elliptic symbol - 1)`` with ``hbar``
    the geometric mean depth.  It matches the dispersive part of the operator
    for every local depth, which keeps the iteration count low when ``h``
    varies by an order of magnitude.
    """

    def __init__(self, grid, base_symbol, h):
        self.grid = grid
        hbar = np.exp(np.mean(np.log(h)))
        self._inv = 1.0 / (base_symbol - 1.0 + hbar**-2)
        self._left = h**-1.5
        self._right = h**-0.5

    def __call__(self, r):
        return self._left * self.grid.ifft(self._inv * self.grid.fft(self._right * r))


PRECONDITIONERS = ("flat", "sgn", "amplitude", "scaled")


class System:
    """Spatial discretization of one model on one grid."""

    def __init__(self, grid, model=Model(), precond="flat", amplitude=1.0, dealias=False,
                 tol=ELLIPTIC_TOL, maxiter=100, extrapolation=4):
        self.grid = grid
        self.model = as_model(model)
        self.delta = self.model.delta
        self.ik = dx_symbol(grid)
        self.ikF = dxF_symbol(grid, self.model)
        self.precond_kind = precond
        self.amplitude = amplitude
        if precond not in PRECONDITIONERS:
            raise ParameterError(f"unknown preconditioner {precond!r}")
        self._base_symbol = preconditioner_symbol(grid, self.model, precond, amplitude)
        self.M = krylov.SpectralPreconditioner(grid, self._base_symbol)
        self.dealias = bool(dealias)
        self.mask = dealias_mask(grid)
        self.tol = tol
        self.maxiter = maxiter
        self.last_u = None
        self.last_stats = None
        self.gmres_iterations = 0
        self.extrapolation = extrapolation
        self._last_dt = None
        self.reset_history()

    def DF(self, f):
        return self.grid.ifft(self.ikF * self.grid.fft(f))

    def u_to_v(self, zeta, u):
        h = 1.0 + np.asarray(zeta, dtype=float)
        _check_depth(h)
        return u - self.delta**2 / (3.0 * h) * self.DF(h**3 * self.DF(u))

    def elliptic_operator(self, zeta):
        h = 1.0 + np.asarray(zeta, dtype=float)
        _check_depth(h)
        h3 = h**3
        c = self.delta**2 / (3.0 * h)
        grid, ikF = self.grid, self.ikF

        def apply(u):
            du = grid.ifft(ikF * grid.fft(u))
            return u - c * grid.ifft(ikF * grid.fft(h3 * du))

        return krylov.as_operator(apply, grid.N)

    def elliptic_solve(self, zeta, v, guess=None):
        A = self.elliptic_operator(zeta)
        if guess is None:
            guess = self.last_u
        M = self.M
        if self.precond_kind == "scaled":
            M = ScaledPreconditioner(self.grid, self._base_symbol, 1.0 + np.asarray(zeta))
        u, stats = krylov.gmres(A, v, M=M, x0=guess, tol=self.tol, maxiter=self.maxiter)
        self.gmres_iterations += stats.iterations
        self.last_stats = stats
        if not stats.converged and stats.relative_residual > ELLIPTIC_ACCEPT:
            raise ConvergenceError(
                f"elliptic GMRES failed: relative residual {stats.relative_residual:.3e} "
                f"after {stats.iterations} iterations ({stats.reason})",
                stats.residual_history, stats)
        self.last_u = u
        return u

    def rhs_hat(self, zeta_hat, v_hat, guess=None):
        grid = self.grid
        zeta = grid.ifft(zeta_hat)
        v = grid.ifft(v_hat)
        u = self.elliptic_solve(zeta, v, guess)
        h = 1.0 + zeta
        du = self.DF(u)
        flux = zeta + u * v - 0.5 * u**2 - 0.5 * self.delta**2 * h**2 * du**2
        dzeta = -self.ik * grid.fft(h * u)
        dv = -self.ik * grid.fft(flux)
        if self.dealias:
            dzeta *= self.mask
            dv *= self.mask
        return dzeta, dv, u

    def rhs(self, state):
        dzeta, dv, _ = self.rhs_hat(state.zeta_hat, state.v_hat)
        return self.grid.ifft(dzeta), self.grid.ifft(dv)

    def _guess(self, stage, fallback):
        hist = self._stage_history[stage]
        if not hist:
            return fallback
        weights = _EXTRAPOLATION[len(hist)]
        return sum(w * u for w, u in zip(weights, reversed(hist)))

    def _stage(self, stage, zeta_hat, v_hat, fallback):
        dz, dv, u = self.rhs_hat(zeta_hat, v_hat, self._guess(stage, fallback))
        self._stage_history[stage].append(u)
        return dz, dv, u

    def reset_history(self):
        self._stage_history = [deque(maxlen=self.extrapolation) for _ in range(4)]

    def rk4_step(self, state, dt):
        """One classical RK4 step.

        Each stage's GMRES is seeded by polynomial extrapolation of the same
        stage's velocity over the previous steps, so consecutive calls must use
        the same ``dt`` (call :meth:`reset_history` otherwise).
        """
        if dt != self._last_dt:
            self.reset_history()
            self._last_dt = dt
        z0, v0 = state.zeta_hat, state.v_hat
        k1z, k1v, u = self._stage(0, z0, v0, self.last_u)
        k2z, k2v, u = self._stage(1, z0 + 0.5 * dt * k1z, v0 + 0.5 * dt * k1v, u)
        k3z, k3v, u = self._stage(2, z0 + 0.5 * dt * k2z, v0 + 0.5 * dt * k2v, u)
        k4z, k4v, u = self._stage(3, z0 + dt * k3z, v0 + dt * k3v, u)
        zn = z0 + dt / 6.0 * (k1z + 2.0 * k2z + 2.0 * k3z + k4z)
        vn = v0 + dt / 6.0 * (k1v + 2.0 * k2v + 2.0 * k3v + k4v)
        return State(self.grid, zn, vn, state.t + dt)

    def densities(self, zeta, u, v):
        h = 1.0 + zeta
        du = self.DF(u)
        return np.array([
            zeta,
            h * u,
            zeta**2 + h * u**2 + self.delta**2 / 3.0 * h**3 * du**2,
            v,
        ])

    def conserved(self, state, u=None):
        zeta, v = state.zeta, state.v
        if u is None:
            u = self.elliptic_solve(zeta, v)
        return ConservedSet(*self.grid.integrate(self.densities(zeta, u, v)))

    def stable_dt(self, state, u=None):
        """Advisory RK4 step bound from the largest transport eigenvalue."""
        if u is None:
            u = self.elliptic_solve(state.zeta, state.v)
        speed = np.max(np.abs(u)) + np.sqrt(np.max(np.abs(state.h)))
        return RK4_STABILITY / (self.grid.kr[-1] * speed)


def make_state(grid, zeta, u, model=Model(), t=0.0, dealias=False):
    """Build a state from ``(zeta, u)`` samples; ``v`` comes from the elliptic map."""
    system = System(grid, model)
    zeta = np.asarray(zeta, dtype=float)
    v = system.u_to_v(zeta, np.asarray(u, dtype=float))
    state = State.from_values(grid, zeta, v, t)
    if dealias:
        state.zeta_hat *= dealias_mask(grid)
        state.v_hat *= dealias_mask(grid)
    return state


def u_to_v(zeta, u, grid, model=Model()):
    return System(grid, model).u_to_v(zeta, u)


def elliptic_solve(zeta, v, grid, model=Model(), precond="flat", amplitude=1.0, guess=None,
                   tol=ELLIPTIC_TOL, maxiter=100):
    system = System(grid, model, precond=precond, amplitude=amplitude, tol=tol, maxiter=maxiter)
    return system.elliptic_solve(np.asarray(zeta, dtype=float), np.asarray(v, dtype=float), guess)


def rhs(state, model=Model(), dealias=False):
    return System(state.grid, model, dealias=dealias).rhs(state)


def rk4_step(state, dt, model=Model(), dealias=False):
    if not dt > 0:
        raise ParameterError("dt must be positive")
    return System(state.grid, model, dealias=dealias).rk4_step(state, dt)


def conserved(state, model=Model()):
    return System(state.grid, model).conserved(state)


@dataclass
class RunReport:
    """Time series recorded during :func:`evolve`."""

    times: list = field(default_factory=list)
    invariants: list = field(default_factory=list)
    linf_zeta: list = field(default_factory=list)
    linf_u: list = field(default_factory=list)
    linf_dzeta: list = field(default_factory=list)
    min_h: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)
    manifest: dict = field(default_factory=dict)
    scales: np.ndarray = None
    final: State = None
    final_u: np.ndarray = None
    steps_completed: int = 0
    aborted: bool = False
    message: str = ""
    derived: dict = field(default_factory=dict)

    @property
    def t(self):
        return np.asarray(self.times)

    @property
    def I(self):  # noqa: E743
        return np.asarray(self.invariants)

    @property
    def relative_drift(self):
        """``(I(t) - I(0)) / int |f_i| dx`` at ``t = 0``, shape ``(records, 4)``."""
        I = self.I
        return (I - I[0]) / self.scales

    @property
    def max_drift(self):
        return np.max(np.abs(self.relative_drift), axis=0)


@dataclass
class Snapshot:
    t: float
    zeta: np.ndarray
    u: np.ndarray


def evolve(initial, T, Nt, model=Model(), *, precond="flat", amplitude=1.0, dealias=False,
           record_every=None, snapshot_times=(), hooks=(), step_hooks=(), tol=ELLIPTIC_TOL,
           maxiter=100, extrapolation=4, check_stability=True):
    """Advance ``initial`` by ``Nt`` RK4 steps of size ``T/Nt``.

    Diagnostics are recorded every ``record_every`` steps (default: about 200
    records per run) and at the final time; ``snapshot_times`` are rounded to
    the nearest step.  ``hooks`` are called as ``hook(state, u)`` at each
    record and must not modify their arguments; ``step_hooks`` are called as
    ``hook(state)`` after every step (no elliptic solve).  Numerical failures end the
    run and return a partial report with ``aborted=True``.
    """
    if int(Nt) != Nt or Nt < 0:
        raise ParameterError(f"Nt must be a nonnegative integer, got {Nt}")
    if Nt > 0 and not T > 0:
        raise ParameterError("T must be positive")
    Nt = int(Nt)
    model = as_model(model)
    grid = initial.grid
    system = System(grid, model, precond=precond, amplitude=amplitude, dealias=dealias,
                    tol=tol, maxiter=maxiter, extrapolation=extrapolation)
    dt = T / Nt if Nt else 0.0
    if record_every is None:
        record_every = max(1, Nt // 200)
    snap_steps = {}
    for ts in snapshot_times:
        step = int(round(ts / dt)) if dt else 0
        snap_steps.setdefault(min(max(step, 0), Nt), float(ts))

    report = RunReport(manifest={
        "model": model.kind, "delta": model.delta, "N": grid.N, "L": grid.L,
        "T": float(T), "Nt": Nt, "dt": dt, "dealias": bool(dealias),
        "preconditioner": precond, "amplitude": float(amplitude),
        "elliptic_tol": tol, "elliptic_maxiter": maxiter, "record_every": record_every,
        "extrapolation": extrapolation,
    })
    started = time.perf_counter()

    def record(state, step):
        u = system.elliptic_solve(state.zeta, state.v)
        zeta = state.zeta
        dens = system.densities(zeta, u, state.v)
        if report.scales is None:
            scales = grid.integrate(np.abs(dens))
            report.scales = np.where(scales > 0, scales, 1.0)
        report.times.append(state.t)
        report.invariants.append(grid.integrate(dens))
        report.linf_zeta.append(float(np.max(np.abs(zeta))))
        report.linf_u.append(float(np.max(np.abs(u))))
        report.linf_dzeta.append(float(np.max(np.abs(grid.ifft(system.ik * state.zeta_hat)))))
        report.min_h.append(float(np.min(1.0 + zeta)))
        if step in snap_steps:
            report.snapshots.append(Snapshot(state.t, zeta.copy(), u.copy()))
        for hook in hooks:
            hook(state, u)
        return u

    state = initial.copy()
    try:
        u0 = record(state, 0)
        if check_stability and Nt:
            dt_max = system.stable_dt(state, u0)
            if dt > dt_max:
                warnings.warn(f"time step {dt:.3e} exceeds the advisory RK4 bound {dt_max:.3e}",
                              RuntimeWarning, stacklevel=2)
        for n in range(1, Nt + 1):
            new = system.rk4_step(state, dt)
            new.t = n * dt
            state = new
            report.steps_completed = n
            for hook in step_hooks:
                hook(state)
            if n % record_every == 0 or n == Nt or n in snap_steps:
                record(state, n)
    except (CavitationError, ConvergenceError) as exc:
        report.aborted = True
        report.message = str(exc)
        log.warning("run aborted at t=%g: %s", state.t, exc)
    report.final = state
    report.final_u = system.last_u
    report.manifest["gmres_iterations"] = system.gmres_iterations
    report.manifest["wall_seconds"] = time.perf_counter() - started
    return report
