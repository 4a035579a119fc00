"""Quick self-checks of the numerical kernels, used by ``sgnwgn check``."""

import numpy as np

from . import krylov
from .evolution import System, evolve, make_state
from .solitary import JacobianOperator, newton_solve, sgn_solitary, wgn_residual
from .spectral import Field, dxF, make_grid, transform, whitham_symbol

SIZES = {"small": (256, 10.0, 200), "medium": (512, 10.0, 1000)}


def _check(results, name, value, limit):
    results.append((name, bool(value <= limit), f"{value:.2e} (limit {limit:.0e})"))


def run_checks(size="small"):
    """Return a list of ``(name, passed, detail)``."""
    N, L, Nt = SIZES[size]
    rng = np.random.default_rng(12345)
    grid = make_grid(N, L)
    out = []

    f = rng.standard_normal(N)
    back = transform(transform(Field(grid, values=f)), "inverse").values
    _check(out, "transform round trip", np.max(np.abs(back - f)) / np.max(np.abs(f)), 1e-13)

    kappa = 2.0 ** np.arange(-20, 21)
    F = whitham_symbol(kappa)
    mono = bool(np.all(np.diff(F) < 0) and np.all((F > 0) & (F <= 1)))
    out.append(("whitham symbol monotone in (0, 1]", mono, f"{F.min():.3e}..{F.max():.3e}"))

    even = np.exp(-grid.x**2)
    odd = dxF(even, grid, "WGN")
    _check(out, "dxF maps even to odd", np.max(np.abs(odd + grid.reflect(odd))), 1e-12)

    n = 64
    Q, _ = np.linalg.qr(rng.standard_normal((n, n)))
    A = Q @ np.diag(np.linspace(1.0, 100.0, n)) @ Q.T + 0.1 * rng.standard_normal((n, n))
    b = rng.standard_normal(n)
    x_lu = krylov.lu_solve(A, b)
    x_gm, _ = krylov.gmres(A, b, tol=1e-14, maxiter=n)
    _check(out, "gmres vs lu", np.linalg.norm(x_gm - x_lu) / np.linalg.norm(x_lu), 1e-9)

    wave = sgn_solitary(1.5, grid)
    d = np.exp(-(grid.x - 0.3) ** 2) * np.cos(grid.x)
    J = JacobianOperator(wave.eta, 1.5, grid, "WGN")
    eps = 1e-6
    fd = (wgn_residual(wave.eta + eps * d, 1.5, grid) - wgn_residual(wave.eta - eps * d, 1.5, grid))
    fd /= 2 * eps
    jd = J.matvec(d)
    _check(out, "jacobian vs finite differences", np.max(np.abs(jd - fd)) / np.max(np.abs(jd)),
           1e-6)

    w = newton_solve(1.5, grid, model="WGN")
    _check(out, "newton residual (WGN, c=1.5)", w.residual_norm, 1e-11)

    system = System(grid, "WGN")
    zeta = 0.3 * np.exp(-grid.x**2)
    u = np.sin(grid.x / L) + 0.2 * np.exp(-(grid.x - 1) ** 2)
    u2 = system.elliptic_solve(zeta, system.u_to_v(zeta, u))
    _check(out, "elliptic forward/inverse pair", np.max(np.abs(u2 - u)) / np.max(np.abs(u)),
           1e-11)

    state = make_state(grid, wave.zeta, wave.u, "SGN")
    report = evolve(state, 0.1 * Nt / 200, Nt, "SGN", check_stability=False)
    drift = report.max_drift
    _check(out, "mass and tangential invariants", max(drift[0], drift[3]), 1e-14)
    _check(out, "momentum and energy drift", max(drift[1], drift[2]), 1e-10)
    return out
