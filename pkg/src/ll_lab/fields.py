"""Magnetization and wavefield types and the change of variables between them.

For ``0 < eps < 1`` a magnetization ``m`` with ``m2 > 0`` and the complex
field ``psi`` are related by::

    psi = eps**-0.5 * (m1 + i m3) * exp(i t / eps)
    m   = (sqrt(eps) Re(exp(-i t/eps) psi), sqrt(1 - eps |psi|^2),
           sqrt(eps) Im(exp(-i t/eps) psi))
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .spectral import Grid, _check, ramp_derivative, spectral_derivative

DEFAULT_SIGMA = 0.9


class ValidityError(ValueError):
    """``sqrt(eps) * max|psi|`` reached the admissible bound."""

    def __init__(self, message, *, margin=None, bound=None):
        super().__init__(message)
        self.margin = margin
        self.bound = bound


class SphereError(ValueError):
    pass


def check_eps(eps: float) -> float:
    eps = float(eps)
    if not 0.0 < eps < 1.0:
        raise ValueError(f"eps must lie in (0, 1), got {eps}")
    return eps


@dataclass(frozen=True, eq=False)
class Magnetization:
    grid: Grid
    m1: np.ndarray
    m2: np.ndarray
    m3: np.ndarray

    def __post_init__(self):
        for name in ("m1", "m2", "m3"):
            a = np.array(_check(self.grid, getattr(self, name)), dtype=np.float64)
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @classmethod
    def uniform(cls, grid: Grid, direction=(0.0, 1.0, 0.0)) -> "Magnetization":
        d = np.asarray(direction, dtype=float)
        d = d / np.linalg.norm(d)
        return cls(grid, *(np.full(grid.n, c) for c in d))

    @classmethod
    def from_array(cls, grid: Grid, m) -> "Magnetization":
        return cls(grid, m[0], m[1], m[2])

    def as_array(self) -> np.ndarray:
        return np.stack([self.m1, self.m2, self.m3])

    @property
    def mcheck(self) -> np.ndarray:
        """The complex combination ``m1 + i m3``."""
        return self.m1 + 1j * self.m3

    def derivative(self, order: int = 1) -> np.ndarray:
        """Componentwise spatial derivative, shape ``(3, n)``.

        ``m2`` may approach different limits at the two edges (kinks), so
        it is differentiated with a ramp correction.
        """
        return magnetization_derivative(self.grid, self.as_array(), order)


def edge_jump(m2: np.ndarray) -> float:
    """Jump of ``m2`` across the box: +-2 for a kink between the poles, else 0."""
    a, b = m2[0], m2[-1]
    if abs(a) > 0.5 and abs(b) > 0.5 and np.sign(a) != np.sign(b):
        return float(np.sign(b) - np.sign(a))
    return 0.0


def magnetization_derivative(grid: Grid, m: np.ndarray, order: int = 1) -> np.ndarray:
    out = np.empty_like(m)
    out[0] = spectral_derivative(grid, m[0], order)
    out[1] = ramp_derivative(grid, m[1], order, jump=edge_jump(m[1]))
    out[2] = spectral_derivative(grid, m[2], order)
    return out


@dataclass(frozen=True, eq=False)
class WaveField:
    grid: Grid
    psi: np.ndarray

    def __post_init__(self):
        a = np.array(_check(self.grid, self.psi), dtype=np.complex128)
        a.setflags(write=False)
        object.__setattr__(self, "psi", a)

    @classmethod
    def zeros(cls, grid: Grid) -> "WaveField":
        return cls(grid, np.zeros(grid.n, dtype=complex))

    def margin(self, eps: float) -> float:
        """``sqrt(eps) * max|psi|``; admissible while below 1."""
        return float(np.sqrt(eps) * np.max(np.abs(self.psi)))


def check_validity(psi, eps: float, sigma: float = DEFAULT_SIGMA) -> float:
    """Return the margin ``sqrt(eps)*max|psi|`` or raise if it exceeds *sigma*."""
    values = psi.psi if isinstance(psi, WaveField) else np.asarray(psi)
    margin = float(np.sqrt(eps) * np.max(np.abs(values)))
    if not np.isfinite(margin) or margin > sigma:
        raise ValidityError(
            f"validity bound violated: sqrt(eps)*max|psi| = {margin:.6g} > {sigma}"
            f" (max|psi| = {np.max(np.abs(values)):.6g}, eps = {eps})",
            margin=margin, bound=sigma)
    return margin


def magnetization_from_wavefield(psi: WaveField, eps: float, t: float = 0.0,
                                 sigma: float = DEFAULT_SIGMA) -> Magnetization:
    eps = check_eps(eps)
    check_validity(psi, eps, sigma)
    rotated = np.sqrt(eps) * np.exp(-1j * t / eps) * psi.psi
    m2 = np.sqrt(1.0 - eps * np.abs(psi.psi) ** 2)
    return Magnetization(psi.grid, rotated.real, m2, rotated.imag)


def wavefield_from_magnetization(m: Magnetization, eps: float, t: float = 0.0) -> WaveField:
    eps = check_eps(eps)
    if np.any(m.m2 <= 0.0):
        j = int(np.argmin(m.m2))
        raise SphereError(
            f"m2 must be positive everywhere; min m2 = {m.m2[j]:.6g} at x = {m.grid.nodes[j]:.6g}")
    return WaveField(m.grid, m.mcheck * np.exp(1j * t / eps) / np.sqrt(eps))


def check_sphere_constraint(m: Magnetization) -> float:
    return float(np.max(np.abs(m.m1**2 + m.m2**2 + m.m3**2 - 1.0)))


def renormalize(m: Magnetization, floor: float = 0.5) -> Magnetization:
    arr = m.as_array()
    norm = np.sqrt(np.sum(arr**2, axis=0))
    if np.min(norm) < floor or not np.all(np.isfinite(norm)):
        j = int(np.nanargmin(norm))
        raise SphereError(
            f"pointwise norm collapsed to {norm[j]:.3g} at x = {m.grid.nodes[j]:.6g}")
    return Magnetization.from_array(m.grid, arr / norm)


def scaled_energy_densities(m: Magnetization, psi: WaveField, eps: float):
    """The two sides of the scaled energy density identity, pointwise."""
    grid = m.grid
    dm = m.derivative(1)
    lhs = np.sum(dm**2, axis=0) + (m.m1**2 + m.m3**2) / eps
    p = psi.psi
    dp = spectral_derivative(grid, p, 1)
    inner = np.real(p * np.conj(dp))
    rhs = np.abs(p) ** 2 + eps * np.abs(dp) ** 2 + eps**2 * inner**2 / (1.0 - eps * np.abs(p) ** 2)
    return lhs, rhs


def scaled_energy_identity_residual(m: Magnetization, psi: WaveField, eps: float) -> float:
    lhs, rhs = scaled_energy_densities(m, psi, eps)
    return float(np.max(np.abs(lhs - rhs)))
