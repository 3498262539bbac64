"""Periodic grids, Fourier differentiation, quadrature and Sobolev norms.

Every other module works on samples over a :class:`Grid`, a uniform
periodic box standing in for the real line.  Fields are plain numpy
arrays of length ``grid.n``; the grid carries the wavenumber table.

Conventions fixed here:

* nodes ``x_j = -L/2 + j L/n`` for ``j = 0 .. n-1``;
* wavenumbers in numpy FFT order, ``kappa = 2 pi p / L`` with
  ``p in {-n/2, .., n/2 - 1}`` (the Nyquist mode carries ``-n/2``);
* odd-order derivatives zero the Nyquist coefficient, even orders keep it;
* quadrature is the uniform rule ``spacing * sum``.
"""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

MAX_ORDER = 8


def _frozen(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid on ``[-L/2, L/2)``."""

    n: int
    length: float
    spacing: float = field(init=False)
    nodes: np.ndarray = field(init=False, repr=False, compare=False)
    wavenumbers: np.ndarray = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        n, length = self.n, self.length
        if not isinstance(n, (int, np.integer)) or isinstance(n, bool):
            raise TypeError(f"n must be an integer, got {n!r}")
        if n < 8 or n % 2:
            raise ValueError(f"n must be even and >= 8, got {n}")
        if not np.isfinite(length) or length <= 0:
            raise ValueError(f"length must be positive, got {length}")
        object.__setattr__(self, "n", int(n))
        object.__setattr__(self, "length", float(length))
        object.__setattr__(self, "spacing", self.length / self.n)
        x = -0.5 * self.length + self.length * np.arange(n) / n
        object.__setattr__(self, "nodes", _frozen(x))
        kappa = 2.0 * np.pi * np.fft.fftfreq(n, d=1.0 / n) / self.length
        object.__setattr__(self, "wavenumbers", _frozen(kappa))

    @property
    def half_width(self) -> float:
        return 0.5 * self.length

    @property
    def kmax(self) -> float:
        """Largest resolved wavenumber magnitude (the Nyquist one)."""
        return np.pi * self.n / self.length

    def integrate(self, values) -> complex | float:
        return self.spacing * np.sum(values)

    def derivative(self, values, order: int = 1) -> np.ndarray:
        return spectral_derivative(self, values, order)


def make_grid(n: int, length: float) -> Grid:
    return Grid(n, length)


def grid_for_decay(rate: float, n: int, *, decay_lengths: float = 40.0,
                   center_span: float = 0.0) -> Grid:
    """Grid whose half-width holds ``decay_lengths / rate`` plus *center_span*.

    A profile decaying like ``exp(-rate |x|)`` then sits below
    ``exp(-decay_lengths)`` at the box edge.
    """
    if rate <= 0:
        raise ValueError(f"decay rate must be positive, got {rate}")
    half = decay_lengths / rate + abs(center_span)
    return Grid(n, 2.0 * half)


def _check(grid: Grid, values) -> np.ndarray:
    values = np.asarray(values)
    if values.shape != (grid.n,):
        raise ValueError(f"field has shape {values.shape}, grid expects ({grid.n},)")
    return values


def derivative_multiplier(grid: Grid, order: int) -> np.ndarray:
    """Fourier multiplier ``(i kappa)^order`` with the Nyquist convention."""
    if order < 0 or order > MAX_ORDER:
        raise ValueError(f"derivative order must be in [0, {MAX_ORDER}], got {order}")
    mult = (1j * grid.wavenumbers) ** order
    if order % 2:
        mult[grid.n // 2] = 0.0
    return mult


def spectral_derivative(grid: Grid, values, order: int = 1) -> np.ndarray:
    """Derivative of a periodic field by multiplication with ``(i kappa)^order``.

    Real input yields real output; complex input stays complex.
    """
    values = _check(grid, values)
    mult = derivative_multiplier(grid, order)
    if order == 0:
        return values.copy()
    out = np.fft.ifft(mult * np.fft.fft(values))
    if np.isrealobj(values):
        return out.real
    return out


def ramp_derivative(grid: Grid, values, order: int = 1, jump: float | None = None) -> np.ndarray:
    """Derivative of a field with different limits at the two box edges.

    The jump between the edges is removed by a linear ramp, which leaves a
    smooth periodic remainder when the field is flat near both edges.
    With ``jump=None`` it is read off the edge samples.
    """
    values = _check(grid, values)
    if jump is None:
        jump = float(np.real(values[-1] - values[0]))
    if jump == 0.0:
        return spectral_derivative(grid, values, order)
    ramp = jump * grid.nodes / grid.length
    out = spectral_derivative(grid, values - ramp, order)
    if order == 1:
        out = out + jump / grid.length
    elif order == 0:
        out = out + ramp
    return out


def sobolev_norm(grid: Grid, values, s: int, homogeneous: bool = False) -> float:
    """Discrete ``H^s`` norm, or ``Hdot^s`` when *homogeneous* is set.

    ``|f|^2_{Hdot^s} = sum_p |kappa_p|^{2s} |f_p|^2`` with the Plancherel
    weight of the uniform quadrature; the full norm sums the homogeneous
    squares over ``0 <= sigma <= s``.
    """
    return float(np.sqrt(sobolev_norm_sq(grid, values, s, homogeneous)))


def sobolev_norm_sq(grid: Grid, values, s: int, homogeneous: bool = False) -> float:
    if s < 0 or s > MAX_ORDER:
        raise ValueError(f"Sobolev index must be in [0, {MAX_ORDER}], got {s}")
    values = _check(grid, values)
    power = np.abs(np.fft.fft(values)) ** 2 * (grid.length / grid.n**2)
    k2 = grid.wavenumbers**2
    if homogeneous:
        weight = k2**s
    else:
        weight = sum(k2**sigma for sigma in range(s + 1))
    return float(np.sum(weight * power))


def linf_norm(values) -> float:
    values = np.asarray(values)
    if values.size == 0:
        return 0.0
    return float(np.max(np.abs(values)))


def l2_inner(grid: Grid, f, g) -> float:
    """Real quadrature inner product ``int Re(f conj(g))``."""
    f = _check(grid, f)
    g = _check(grid, g)
    return float(grid.spacing * np.sum(np.real(f * np.conj(g))))


def l2_norm(grid: Grid, values) -> float:
    values = _check(grid, values)
    return float(np.sqrt(grid.spacing * np.sum(np.abs(values) ** 2)))


def spectral_shift(grid: Grid, values, shift: float) -> np.ndarray:
    """Samples of ``f(x - shift)`` by Fourier phase rotation."""
    values = _check(grid, values)
    phase = np.exp(-1j * grid.wavenumbers * shift)
    phase[grid.n // 2] = np.cos(grid.wavenumbers[grid.n // 2] * shift)
    out = np.fft.ifft(phase * np.fft.fft(values))
    if np.isrealobj(values):
        return out.real
    return out


def sech(z):
    """``1/cosh`` without overflow for large ``|z|``."""
    e = np.exp(-np.abs(z))
    return 2.0 * e / (1.0 + e * e)
