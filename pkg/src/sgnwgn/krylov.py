"""Preconditioned GMRES, dense assembly by column probing, and LU solves.

Operators are anything :func:`scipy.sparse.linalg.aslinearoperator` accepts
(dense arrays, :class:`~scipy.sparse.linalg.LinearOperator`), or a bare
callable ``v -> A v`` together with the dimension.
"""

import warnings
from dataclasses import dataclass, field

import numpy as np
import scipy.linalg
from scipy.sparse.linalg import LinearOperator, aslinearoperator

from .errors import ParameterError, SingularMatrixError

DEFAULT_TOL = 1e-14


@dataclass
class SolveStats:
    iterations: int
    relative_residual: float
    converged: bool
    residual_history: list = field(default_factory=list)
    reason: str = ""


def as_operator(A, n=None, dtype=float):
    if callable(A) and not isinstance(A, LinearOperator):
        if n is None:
            raise ParameterError("dimension n is required for a callable operator")
        return LinearOperator((n, n), matvec=lambda v: A(np.ravel(v)), dtype=dtype)
    return aslinearoperator(A)


class SpectralPreconditioner:
    """Diagonal Fourier multiplier ``m(k)`` applied as ``M^{-1}``.

    ``symbol`` is sampled on the rfft half spectrum of ``grid``.
    """

    def __init__(self, grid, symbol):
        symbol = np.asarray(symbol, dtype=float)
        if symbol.shape != grid.kr.shape:
            raise ParameterError("preconditioner symbol must live on the rfft half spectrum")
        if np.any(symbol == 0):
            raise ParameterError("preconditioner symbol has a zero entry")
        self.grid = grid
        self.symbol = symbol
        self._inv = 1.0 / symbol

    def __call__(self, r):
        return self.grid.ifft(self._inv * self.grid.fft(r))

    def apply_forward(self, v):
        return self.grid.ifft(self.symbol * self.grid.fft(v))


def _givens(a, b):
    if b == 0.0:
        return 1.0, 0.0
    r = np.hypot(a, b)
    return a / r, b / r


def gmres(A, b, M=None, x0=None, tol=DEFAULT_TOL, maxiter=100, restart=None,
          stagnation_window=20, stagnation_gain=1e-3, callback=None):
    """Left-preconditioned GMRES for ``A x = b``.

    Iterates on ``M^{-1} A x = M^{-1} b`` with a full Krylov basis of up to
    ``maxiter`` vectors (no restart unless ``restart`` is given) and stops
    once the preconditioned relative residual drops below ``tol``.  If the
    residual estimate improves by less than a fraction ``stagnation_gain``
    over ``stagnation_window`` iterations the best iterate is returned with
    ``converged=False``.

    Returns ``(x, SolveStats)``; ``stats.relative_residual`` is the true
    unpreconditioned ``||b - A x|| / ||b||`` recomputed on the returned ``x``.
    """
    b = np.asarray(b, dtype=float)
    n = b.shape[0]
    A = as_operator(A, n)
    if A.shape != (n, n):
        raise ParameterError(f"operator shape {A.shape} does not match rhs length {n}")
    if not tol > 0:
        raise ParameterError("tol must be positive")
    precond = (lambda r: r) if M is None else (
        M.matvec if isinstance(M, LinearOperator) else M)
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=float)

    bnorm = np.linalg.norm(b)
    if bnorm == 0.0:
        return np.zeros(n), SolveStats(0, 0.0, True, [0.0], "zero rhs")
    pb_norm = np.linalg.norm(precond(b))

    m = maxiter if restart is None else min(restart, maxiter)
    history = []
    total = 0
    converged = False
    reason = "maxiter"
    while total < maxiter:
        r = precond(b - A.matvec(x))
        beta = np.linalg.norm(r)
        rel = beta / pb_norm
        if not history:
            history.append(rel)
        if rel <= tol:
            converged, reason = True, "tol"
            break
        steps = min(m, maxiter - total)
        V = np.empty((steps + 1, n))
        H = np.zeros((steps + 1, steps))
        cs = np.empty(steps)
        sn = np.empty(steps)
        g = np.zeros(steps + 1)
        g[0] = beta
        V[0] = r / beta
        j_done = 0
        stop = False
        for j in range(steps):
            w = precond(A.matvec(V[j]))
            # classical Gram-Schmidt, applied twice
            h = V[: j + 1] @ w
            w = w - h @ V[: j + 1]
            h2 = V[: j + 1] @ w
            w = w - h2 @ V[: j + 1]
            h = h + h2
            hn = np.linalg.norm(w)
            H[: j + 1, j] = h
            H[j + 1, j] = hn
            for i in range(j):
                t = cs[i] * H[i, j] + sn[i] * H[i + 1, j]
                H[i + 1, j] = -sn[i] * H[i, j] + cs[i] * H[i + 1, j]
                H[i, j] = t
            cs[j], sn[j] = _givens(H[j, j], H[j + 1, j])
            H[j, j] = cs[j] * H[j, j] + sn[j] * H[j + 1, j]
            H[j + 1, j] = 0.0
            g[j + 1] = -sn[j] * g[j]
            g[j] = cs[j] * g[j]
            j_done = j + 1
            total += 1
            est = abs(g[j + 1]) / pb_norm
            history.append(est)
            if callback is not None:
                callback(est)
            breakdown = hn <= 1e-14 * max(1.0, abs(H[j, j]))
            if est <= tol:
                converged, reason, stop = True, "tol", True
                break
            if breakdown:
                converged, reason, stop = True, "breakdown", True
                break
            if (len(history) > stagnation_window
                    and est > (1.0 - stagnation_gain) * history[-1 - stagnation_window]):
                reason, stop = "stagnation", True
                break
            if j + 1 < steps:
                V[j + 1] = w / hn
        y = scipy.linalg.solve_triangular(H[:j_done, :j_done], g[:j_done])
        x = x + y @ V[:j_done]
        if stop:
            break

    true_rel = np.linalg.norm(b - A.matvec(x)) / bnorm
    return x, SolveStats(total, float(true_rel), converged, history, reason)


def assemble_dense(A, n=None):
    """Dense matrix of ``A`` whose column ``j`` is ``A e_j``."""
    A = as_operator(A, n)
    n = A.shape[1]
    try:
        eye = np.eye(n)
        return np.asarray(A.matmat(eye))
    except MemoryError as exc:
        raise MemoryError(f"cannot allocate a dense {n}x{n} operator") from exc


class LUFactorization:
    """Partial-pivoting LU of a square matrix, reusable for several solves."""

    def __init__(self, matrix, pivot_tol=None):
        matrix = np.asarray(matrix, dtype=float)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ParameterError(f"LU needs a square matrix, got shape {matrix.shape}")
        n = matrix.shape[0]
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", scipy.linalg.LinAlgWarning)
            self.lu, self.piv = scipy.linalg.lu_factor(matrix, check_finite=True)
        pivots = np.abs(np.diag(self.lu))
        if pivot_tol is None:
            pivot_tol = n * np.finfo(float).eps * max(pivots.max(), np.finfo(float).tiny)
        if pivots.min() <= pivot_tol:
            raise SingularMatrixError(
                f"matrix is singular to working precision (min pivot {pivots.min():.3e})")
        self.n = n

    def solve(self, b):
        b = np.asarray(b, dtype=float)
        if b.shape[0] != self.n:
            raise ParameterError(f"rhs length {b.shape[0]} does not match matrix size {self.n}")
        return scipy.linalg.lu_solve((self.lu, self.piv), b, check_finite=False)


def lu_solve(matrix, b):
    return LUFactorization(matrix).solve(b)
