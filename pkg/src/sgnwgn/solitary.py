"""Solitary waves of the SGN and WGN systems.

Traveling waves are computed in the variable ``eta = u/c = zeta/(1+zeta)``
from

    -(1-eta)^2/3 DF( DF eta / (1-eta)^3 ) + (DF eta)^2 / (2 (1-eta)^2)
        + eta - eta / (c^2 (1-eta)) - eta^2/2 = 0,

with ``DF = d/dx F`` (WGN) or ``d/dx`` (SGN), by Newton's method.  The
Newton correction is obtained either with preconditioned GMRES or with a
dense LU factorization of the Jacobian.
"""

from dataclasses import dataclass, field

import numpy as np
from scipy.sparse.linalg import LinearOperator

from . import krylov
from .errors import CavitationError, ConvergenceError, ParameterError
from .spectral import KRASNY_THRESHOLD, Grid, dx, dxF_symbol, krasny_filter

GUARD = 1e-6
# a converged profile smaller than this fraction of the seed is the trivial solution
TRIVIAL = 1e-3


@dataclass
class SolitaryWave:
    c: float
    grid: Grid
    eta: np.ndarray
    zeta: np.ndarray
    u: np.ndarray
    h: np.ndarray
    model: str = "WGN"
    residual_norm: float = np.nan
    newton_iterations: int = 0
    backend: str = "exact"
    residual_history: list = field(default_factory=list)
    linear_stats: list = field(default_factory=list)

    @classmethod
    def from_eta(cls, eta, c, grid, **kwargs):
        zeta, u, h = eta_to_fields(eta, c)
        return cls(c=c, grid=grid, eta=np.asarray(eta, dtype=float), zeta=zeta, u=u, h=h, **kwargs)


class ContinuationError(ConvergenceError):
    """Continuation stopped at velocity ``c``; ``waves`` holds the earlier results."""

    def __init__(self, message, c, waves, history=()):
        super().__init__(message, history)
        self.c = c
        self.waves = waves


def _check_c(c):
    if not c > 1:
        raise ParameterError(f"solitary waves need a supercritical velocity c > 1, got {c}")


def _check_eta(eta, guard):
    top = float(np.max(eta))
    if not top < 1.0 - guard:
        raise CavitationError(f"near cavitation: max eta = {top!r} >= 1 - {guard}", top)


def sgn_solitary(c, grid):
    """Explicit SGN solitary wave sampled on ``grid``."""
    _check_c(c)
    amp = c**2 - 1.0
    alpha = 0.5 * np.sqrt(3.0) * np.sqrt(amp / c**2)
    e = np.exp(-2.0 * np.abs(alpha * grid.x))
    sech2 = 4.0 * e / (1.0 + e) ** 2
    zeta = amp * sech2
    h = 1.0 + zeta
    eta = zeta / h
    wave = SolitaryWave(c=c, grid=grid, eta=eta, zeta=zeta, u=c * eta, h=h, model="SGN")
    wave.residual_norm = float(np.max(np.abs(wgn_residual(eta, c, grid, "SGN"))))
    return wave


def eta_to_fields(eta, c, guard=0.0):
    """Return ``(zeta, u, h)`` from ``eta``."""
    eta = np.asarray(eta, dtype=float)
    _check_eta(eta, guard)
    s = 1.0 - eta
    return eta / s, c * eta, 1.0 / s


def wgn_residual(eta, c, grid, model="WGN", guard=GUARD):
    """Traveling-wave residual in the ``eta`` formulation, evaluated pointwise."""
    eta = np.asarray(eta, dtype=float)
    _check_eta(eta, guard)
    sym = dxF_symbol(grid, model)
    s = 1.0 - eta
    p = grid.ifft(sym * grid.fft(eta))
    dq = grid.ifft(sym * grid.fft(p / s**3))
    return (-(s**2) / 3.0 * dq + p**2 / (2.0 * s**2)
            + eta - eta / (c**2 * s) - 0.5 * eta**2)


class JacobianOperator(LinearOperator):
    """Action of the residual's Jacobian at ``eta``, plus an optional rank-one term.

    With ``beta > 0`` the operator is ``J + beta w w^T / |w|^2`` where ``w``
    is the translation mode ``d eta/dx``.
    """

    def __init__(self, eta, c, grid, model="WGN", beta=0.0, guard=GUARD):
        eta = np.asarray(eta, dtype=float)
        _check_eta(eta, guard)
        super().__init__(dtype=float, shape=(grid.N, grid.N))
        self.grid = grid
        self.c = c
        self.eta = eta
        self.sym = dxF_symbol(grid, model)
        s = 1.0 - eta
        self.s = s
        self.p = grid.ifft(self.sym * grid.fft(eta))
        self.Dq = grid.ifft(self.sym * grid.fft(self.p / s**3))
        self.beta = beta
        w = dx(eta, grid)
        nw = np.linalg.norm(w)
        self.w = w / nw if nw > 0 else np.zeros_like(w)

    def _D(self, v):
        return self.grid.ifft(self.sym * self.grid.fft(v))

    def _apply(self, e):
        s, p, c, eta = self.s, self.p, self.c, self.eta
        De = self._D(e)
        dq = De / s**3 + 3.0 * p * e / s**4
        out = (2.0 * s * e / 3.0 * self.Dq - s**2 / 3.0 * self._D(dq)
               + p * De / s**2 + p**2 * e / s**3
               + e - e / (c**2 * s**2) - eta * e)
        if self.beta:
            out = out + self.beta * np.multiply.outer(e @ self.w, self.w)
        return out

    def _matvec(self, v):
        return self._apply(np.ravel(v))

    def _matmat(self, X):
        # columns of X are directions; work row-wise for the FFT axis
        return self._apply(np.asarray(X).T).T


def jacobian_action(eta, deta, c, grid, model="WGN", guard=GUARD):
    """Directional derivative of :func:`wgn_residual` at ``eta`` along ``deta``."""
    return JacobianOperator(eta, c, grid, model, guard=guard)._apply(np.asarray(deta, dtype=float))


def preconditioner_symbol(grid, kind="sgn", c=1.0):
    """Fourier multiplier used as preconditioner for the Newton correction.

    ``"sgn"`` is ``1 + k^2/3``; ``"large_c"`` is ``1 + c^4 k^2/3``.
    """
    if isinstance(kind, str):
        if kind == "sgn":
            return 1.0 + grid.kr**2 / 3.0
        if kind == "large_c":
            return 1.0 + c**4 * grid.kr**2 / 3.0
        raise ParameterError(f"unknown preconditioner {kind!r}")
    return np.asarray(kind, dtype=float)


def _clean(eta, grid, krasny, symmetrize):
    if symmetrize:
        eta = grid.even_part(eta)
    if krasny:
        eta = krasny_filter(eta, grid, krasny)
    return eta


def newton_solve(c, grid, backend="gmres", initial=None, model="WGN", tol=1e-12,
                 max_newton=25, precond="sgn", krasny=KRASNY_THRESHOLD, projection=True,
                 gmres_tol=1e-11, gmres_maxiter=100, accept_tol=1e-6, guard=GUARD,
                 symmetrize=True, floor_ratio=0.5):
    """Newton iteration for the traveling-wave equation at velocity ``c``.

    Each iterate is replaced by its even part and Krasny filtered.  Iteration
    stops when the max-norm residual is below ``tol`` or stops decreasing (a
    step-halving fallback is tried first).  Below ``accept_tol`` a step that
    fails to reduce the residual by ``floor_ratio`` marks the roundoff floor
    and ends the iteration; a stagnated result is accepted if its residual
    is below ``accept_tol``.
    """
    _check_c(c)
    if backend not in ("gmres", "lu"):
        raise ParameterError(f"backend must be 'gmres' or 'lu', got {backend!r}")
    if initial is None:
        initial = sgn_solitary(c, grid).eta
    eta = _clean(np.asarray(initial, dtype=float), grid, krasny, symmetrize)
    r = wgn_residual(eta, c, grid, model, guard)
    res = float(np.max(np.abs(r)))
    history = [res]
    linear_stats = []
    M = None
    if backend == "gmres":
        M = krylov.SpectralPreconditioner(grid, preconditioner_symbol(grid, precond, c))

    it = 0
    while res > tol:
        if it >= max_newton:
            raise ConvergenceError(
                f"Newton did not converge for c={c} after {max_newton} iterations "
                f"(residual {res:.3e})", history)
        if backend == "lu":
            J = JacobianOperator(eta, c, grid, model, guard=guard)
            A = krylov.assemble_dense(J)
            if projection:
                beta = np.max(np.abs(np.diag(A)))
                A += beta * np.outer(J.w, J.w)
            step = krylov.lu_solve(A, r)
        else:
            J = JacobianOperator(eta, c, grid, model, beta=1.0 if projection else 0.0,
                                 guard=guard)
            step, stats = krylov.gmres(J, r, M=M, tol=gmres_tol, maxiter=gmres_maxiter)
            linear_stats.append(stats)

        lam = 1.0
        trial_res = np.inf
        while lam >= 1.0 / 64:
            trial = _clean(eta - lam * step, grid, krasny, symmetrize)
            try:
                trial_r = wgn_residual(trial, c, grid, model, guard)
                trial_res = float(np.max(np.abs(trial_r)))
            except CavitationError:
                trial_res = np.inf
            if trial_res < res:
                break
            lam *= 0.5
        if not trial_res < res:
            break
        floor_reached = res <= accept_tol and trial_res > floor_ratio * res
        eta, r, res = trial, trial_r, trial_res
        history.append(res)
        it += 1
        if floor_reached:
            break

    if res > max(tol, accept_tol):
        raise ConvergenceError(
            f"Newton stagnated for c={c} at residual {res:.3e}", history)
    if np.max(eta) < TRIVIAL * np.max(np.abs(initial)):
        raise ConvergenceError(
            f"Newton collapsed to the rest state for c={c} (max eta {np.max(eta):.3e})",
            history)
    return SolitaryWave.from_eta(
        eta, c, grid, model=as_kind(model), residual_norm=res, newton_iterations=it,
        backend=backend, residual_history=history, linear_stats=linear_stats)


def as_kind(model):
    return getattr(model, "kind", str(model).upper())


def _lagrange_extrapolate(cs, etas, c):
    cs = np.asarray(cs, dtype=float)
    out = np.zeros_like(etas[0])
    for i, ci in enumerate(cs):
        others = np.delete(cs, i)
        out += np.prod((c - others) / (ci - others)) * etas[i]
    return out


def continuation(c_targets, grid, backend="gmres", model="WGN", guard=GUARD, **opts):
    """Solve for an ascending list of velocities, seeding each by extrapolation.

    The seed for a new velocity is the SGN wave at that velocity plus the
    Lagrange extrapolation (in ``c``, degree <= 3) of the differences between
    the last up-to-four converged profiles and their SGN counterparts.  The
    plain extrapolation of the profiles and the SGN wave itself are kept as
    fallbacks; candidates are tried in order of increasing residual.
    """
    c_targets = [float(c) for c in c_targets]
    if any(b <= a for a, b in zip(c_targets, c_targets[1:])):
        raise ParameterError("continuation velocities must be strictly ascending")
    waves = []
    for c in c_targets:
        base = sgn_solitary(c, grid).eta
        seeds = [base]
        if waves:
            recent = waves[-4:]
            cs = [w.c for w in recent]
            diffs = [w.eta - sgn_solitary(w.c, grid).eta for w in recent]
            seeds += [base + _lagrange_extrapolate(cs, diffs, c),
                      _lagrange_extrapolate(cs, [w.eta for w in recent], c)]
        ranked = []
        for seed in seeds:
            try:
                res = float(np.max(np.abs(wgn_residual(seed, c, grid, model, guard))))
            except CavitationError:
                continue
            if np.isfinite(res):
                ranked.append((res, len(ranked), seed))
        ranked.sort(key=lambda item: item[:2])
        last_error = ConvergenceError(f"no admissible seed for c={c}")
        for _, _, seed in ranked:
            try:
                wave = newton_solve(c, grid, backend=backend, initial=seed, model=model,
                                    guard=guard, **opts)
                break
            except (ConvergenceError, CavitationError) as exc:
                last_error = exc
        else:
            raise ContinuationError(
                f"continuation failed at c={c}: {last_error}", c, waves,
                getattr(last_error, "history", ())) from last_error
        waves.append(wave)
    return waves


def zeta_residual_check(zeta, c, grid, model="WGN", guard=GUARD):
    """Residual of the single equation for ``zeta`` (independent cross-check)."""
    zeta = np.asarray(zeta, dtype=float)
    h = 1.0 + zeta
    if not np.min(h) > guard:
        raise CavitationError(f"near cavitation: min(1+zeta) = {np.min(h)!r}", np.min(h))
    sym = dxF_symbol(grid, model)
    D = lambda f: grid.ifft(sym * grid.fft(f))  # noqa: E731
    ratio = zeta / h
    Dr = D(ratio)
    return (-1.0 / (3.0 * h**2) * D(h**3 * Dr) + 0.5 * h**2 * Dr**2
            + ratio - zeta / c**2 - zeta**2 / (2.0 * h**2))
