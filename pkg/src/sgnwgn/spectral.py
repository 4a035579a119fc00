"""Periodic Fourier collocation on ``L*[-pi, pi)``.

Real fields are plain numpy arrays of length ``N`` (or stacks of them along
the last axis).  Multipliers act on the half spectrum returned by
``numpy.fft.rfft``; odd multipliers always zero the Nyquist mode so that a
real input produces a real output.
"""

from dataclasses import dataclass
from functools import cached_property, lru_cache

import numpy as np

from .errors import ParameterError

KRASNY_THRESHOLD = 1e-14

# Taylor coefficients of F(k)^2 = 3/(k tanh k) - 3/k^2 in powers of k^2
# (3 * 4^m * B_2m / (2m)!, m = 1..8).  Truncation error < 1e-16 for k < 1/4.
_F2_SERIES = np.array([
    1.0,
    -6.6666666666666667e-02,
    6.3492063492063492e-03,
    -6.3492063492063492e-04,
    6.4133397466730800e-05,
    -6.4932128424191916e-06,
    6.5777843555621333e-07,
    -6.6643826369939037e-08,
])
_SERIES_SWITCH = 0.25


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid with ``N`` nodes on ``L*[-pi, pi)``.

    Nodes are ``x_n = -pi*L + n*2*pi*L/N`` for ``n = 1..N`` so that ``x = 0``
    and ``x = pi*L`` are both nodes and the grid is mirror symmetric.
    """

    N: int
    L: float

    @property
    def dx(self):
        return 2 * np.pi * self.L / self.N

    @property
    def length(self):
        return 2 * np.pi * self.L

    @cached_property
    def x(self):
        n = np.arange(1, self.N + 1)
        return -np.pi * self.L + n * self.dx

    @cached_property
    def modes(self):
        """Mode ladder ``j = -N/2+1, ..., N/2``."""
        return np.arange(-self.N // 2 + 1, self.N // 2 + 1)

    @cached_property
    def k(self):
        """Wavenumbers ``j/L`` on the ladder ``j = -N/2+1, ..., N/2``."""
        return self.modes / self.L

    @cached_property
    def kr(self):
        """Nonnegative wavenumbers of the rfft half spectrum, ``0..N/2``."""
        return np.arange(self.N // 2 + 1) / self.L

    def fft(self, values):
        return np.fft.rfft(values, axis=-1)

    def ifft(self, coeffs):
        return np.fft.irfft(coeffs, n=self.N, axis=-1)

    def integrate(self, values):
        """Trapezoidal (spectrally exact) integral over one period."""
        return self.dx * np.sum(values, axis=-1)

    def reflect(self, values):
        """Return ``f(-x)`` sampled on the grid."""
        return np.roll(np.asarray(values)[..., ::-1], -1, axis=-1)

    def even_part(self, values):
        return 0.5 * (values + self.reflect(values))

    def odd_part(self, values):
        return 0.5 * (values - self.reflect(values))


def make_grid(N, L):
    if int(N) != N or N % 2 or N < 8:
        raise ParameterError(f"N must be an even integer >= 8, got {N}")
    if not L > 0:
        raise ParameterError(f"L must be positive, got {L}")
    return Grid(int(N), float(L))


class Field:
    """Grid samples with a lazily computed spectrum.

    ``spectrum`` holds the unnormalized DFT coefficients ``fft(values)``
    ordered along ``grid.modes`` (the "Fourier coefficients" used throughout
    for plots and for the Krasny filter).
    """

    def __init__(self, grid, values=None, spectrum=None):
        if (values is None) == (spectrum is None):
            raise ParameterError("give exactly one of values or spectrum")
        self.grid = grid
        if values is not None:
            values = np.asarray(values, dtype=float)
            _check_length(grid, values)
        else:
            spectrum = np.asarray(spectrum, dtype=complex)
            _check_length(grid, spectrum)
        self._values = values
        self._spectrum = spectrum

    @property
    def values(self):
        if self._values is None:
            self._values = _ladder_to_values(self.grid, self._spectrum)
        return self._values

    @property
    def spectrum(self):
        if self._spectrum is None:
            self._spectrum = _values_to_ladder(self.grid, self._values)
        return self._spectrum

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.values, dtype=dtype)

    def __repr__(self):
        return f"Field(N={self.grid.N}, L={self.grid.L})"


def _check_length(grid, arr):
    if arr.shape[-1] != grid.N:
        raise ParameterError(f"length {arr.shape[-1]} does not match grid N={grid.N}")


def _values_to_ladder(grid, values):
    full = np.fft.fft(values)
    return full[grid.modes % grid.N]


def _ladder_to_values(grid, spectrum):
    full = np.empty(grid.N, dtype=complex)
    full[grid.modes % grid.N] = spectrum
    return np.fft.ifft(full).real


def transform(field, direction="forward"):
    """Fill the spectrum from values (forward) or values from spectrum (inverse)."""
    if direction == "forward":
        return Field(field.grid, spectrum=_values_to_ladder(field.grid, field.values))
    if direction == "inverse":
        return Field(field.grid, values=_ladder_to_values(field.grid, field.spectrum))
    raise ParameterError(f"unknown direction {direction!r}")


def whitham_symbol(kappa):
    """Whitham multiplier ``F(k) = sqrt(3/(k tanh k) - 3/k^2)`` for ``k >= 0``.

    Uses a Taylor series of ``F^2`` below ``k = 1/4`` where the closed form
    loses digits to cancellation.
    """
    kappa = np.abs(np.asarray(kappa, dtype=float))
    small = kappa < _SERIES_SWITCH
    out = np.empty_like(kappa)
    ks = kappa[small] ** 2
    out[small] = np.sqrt(np.polynomial.polynomial.polyval(ks, _F2_SERIES))
    kb = kappa[~small]
    out[~small] = np.sqrt(3.0 / (kb * np.tanh(kb)) - 3.0 / kb**2)
    return out if out.ndim else out[()]


@dataclass(frozen=True)
class Model:
    """Which system and which shallowness parameter ``delta`` (``g = d = 1``)."""

    kind: str = "SGN"
    delta: float = 1.0

    def __post_init__(self):
        kind = str(self.kind).upper()
        if kind not in ("SGN", "WGN"):
            raise ParameterError(f"model kind must be SGN or WGN, got {self.kind!r}")
        if not self.delta > 0:
            raise ParameterError(f"delta must be positive, got {self.delta}")
        object.__setattr__(self, "kind", kind)
        object.__setattr__(self, "delta", float(self.delta))


def as_model(model, delta=1.0):
    if isinstance(model, Model):
        return model
    return Model(model, delta)


@lru_cache(maxsize=64)
def _dx_symbol(grid):
    sym = 1j * grid.kr
    sym[-1] = 0.0
    sym.flags.writeable = False
    return sym


@lru_cache(maxsize=64)
def _dxF_symbol(grid, kind, delta):
    sym = 1j * grid.kr
    if kind == "WGN":
        sym = sym * whitham_symbol(delta * grid.kr)
    sym[-1] = 0.0
    sym.flags.writeable = False
    return sym


def dx_symbol(grid):
    """Half-spectrum symbol of ``d/dx`` (Nyquist zeroed)."""
    return _dx_symbol(grid)


def dxF_symbol(grid, model="SGN", delta=1.0):
    """Half-spectrum symbol of ``d/dx F^delta`` (``F = 1`` for SGN)."""
    m = as_model(model, delta)
    return _dxF_symbol(grid, m.kind, m.delta)


def apply_symbol(values, symbol, grid):
    return grid.ifft(symbol * grid.fft(values))


def dx(values, grid):
    return apply_symbol(values, _dx_symbol(grid), grid)


def dxF(values, grid, model="SGN", delta=1.0):
    """Apply ``i k F(delta |k|)`` (WGN) or ``i k`` (SGN) to a real field."""
    return apply_symbol(values, dxF_symbol(grid, model, delta), grid)


def krasny_filter(values, grid, threshold=KRASNY_THRESHOLD):
    """Zero every (unnormalized) Fourier coefficient of modulus below ``threshold``."""
    if threshold < 0:
        raise ParameterError("threshold must be nonnegative")
    if threshold == 0:
        return np.array(values, dtype=float, copy=True)
    coeffs = grid.fft(values)
    coeffs[np.abs(coeffs) < threshold] = 0.0
    return grid.ifft(coeffs)


def krasny_filter_spectrum(spectrum, threshold=KRASNY_THRESHOLD):
    """Filter an explicit coefficient array (no normalization applied)."""
    spectrum = np.array(spectrum, copy=True)
    spectrum[np.abs(spectrum) < threshold] = 0.0
    return spectrum


@lru_cache(maxsize=64)
def dealias_mask(grid):
    """Boolean mask over the rfft half spectrum keeping ``|j| <= N/3``."""
    j = np.arange(grid.N // 2 + 1)
    mask = 3 * j <= grid.N
    mask.flags.writeable = False
    return mask


def dealias_two_thirds(values, grid):
    coeffs = grid.fft(values)
    coeffs[~dealias_mask(grid)] = 0.0
    return grid.ifft(coeffs)


def abs_spectrum(values, grid):
    """Moduli of the unnormalized Fourier coefficients for ``j = 0..N/2``."""
    return np.abs(grid.fft(values))


def decay_rate(values, grid, floor=1e-12, top=1e-3):
    """Fitted exponential decay rate of ``|coefficient|`` in ``k``.

    Least-squares slope of ``-log|c_k|`` over the modes whose relative
    magnitude lies between ``floor`` and ``top``.
    """
    a = abs_spectrum(values, grid)
    rel = a / a.max()
    sel = (rel < top) & (rel > floor)
    if sel.sum() < 3:
        raise ParameterError("too few resolved modes to fit a decay rate")
    slope, _ = np.polyfit(grid.kr[sel], np.log(a[sel]), 1)
    return -slope
