"""Right-hand sides and residual diagnostics of the three evolution equations.

Sign convention for Landau-Lifshitz (easy axis along e2 for positive
anisotropy)::

    dm/dt = -m x (m_xx - lambda1 m1 e1 - lambda3 m3 e3)

This is the convention under which ``psi = eps^-1/2 (m1 + i m3) e^{it/eps}``
solves the anisotropic NLS equation below and the closed-form traveling
waves propagate exactly.

Anisotropic NLS, for ``rho = sqrt(1 - eps |psi|^2)``::

    i psi_t + rho psi_xx + |psi|^2 psi / (1 + rho)
        + eps (Re(psi conj(psi_x)) / rho)_x psi = 0

Cubic NLS::

    i psi_t + psi_xx + |psi|^2 psi / 2 = 0
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Magnetization, WaveField, check_validity, magnetization_derivative
from .spectral import Grid, l2_norm, spectral_derivative


@dataclass(frozen=True)
class AnisotropyParams:
    lambda1: float
    lambda3: float

    def __post_init__(self):
        if self.lambda1 < 0 or self.lambda3 < 0:
            raise ValueError(
                f"anisotropy constants must be non-negative, got ({self.lambda1}, {self.lambda3})")

    @classmethod
    def uniaxial(cls, lam: float) -> "AnisotropyParams":
        return cls(lam, lam)

    @classmethod
    def from_eps(cls, eps: float) -> "AnisotropyParams":
        return cls(1.0 / eps, 1.0 / eps)

    @property
    def max(self) -> float:
        return max(self.lambda1, self.lambda3)


def _as_array(m) -> tuple[Grid, np.ndarray]:
    if isinstance(m, Magnetization):
        return m.grid, m.as_array()
    raise TypeError(f"expected Magnetization, got {type(m).__name__}")


def effective_field(grid: Grid, m: np.ndarray, a: AnisotropyParams, gauge: float = 0.0) -> np.ndarray:
    """``m_xx - lambda1 m1 e1 - lambda3 m3 e3 + gauge * m``."""
    h = magnetization_derivative(grid, m, 2)
    h[0] -= a.lambda1 * m[0]
    h[2] -= a.lambda3 * m[2]
    if gauge:
        h += gauge * m
    return h


def ll_rhs_array(grid: Grid, m: np.ndarray, a: AnisotropyParams, gauge: float = 0.0) -> np.ndarray:
    h = effective_field(grid, m, a, gauge)
    return -np.cross(m, h, axis=0)


def ll_rhs(m: Magnetization, a: AnisotropyParams, gauge: float = 0.0) -> np.ndarray:
    """Time derivative of *m* under Landau-Lifshitz, shape ``(3, n)``.

    *gauge* adds a multiple of the identity to the anisotropy matrix; the
    result does not depend on it.
    """
    grid, arr = _as_array(m)
    return ll_rhs_array(grid, arr, a, gauge)


def _values(psi):
    if isinstance(psi, WaveField):
        return psi.grid, psi.psi
    raise TypeError(f"expected WaveField, got {type(psi).__name__}")


def _rho(p: np.ndarray, eps: float) -> np.ndarray:
    return np.sqrt(np.maximum(1.0 - eps * np.abs(p) ** 2, 0.0))


def _divergence_term(grid: Grid, p: np.ndarray, rho: np.ndarray) -> np.ndarray:
    dp = spectral_derivative(grid, p, 1)
    return spectral_derivative(grid, np.real(p * np.conj(dp)) / rho, 1)


def nls_eps_nonlinear(grid: Grid, p: np.ndarray, eps: float, d2p: np.ndarray | None = None) -> np.ndarray:
    """Everything in the anisotropic NLS right-hand side except ``i psi_xx``."""
    if d2p is None:
        d2p = spectral_derivative(grid, p, 2)
    a2 = np.abs(p) ** 2
    rho = _rho(p, eps)
    stiff = -eps * a2 / (1.0 + rho) * d2p          # (rho - 1) psi_xx
    local = a2 / (1.0 + rho) * p
    div = eps * _divergence_term(grid, p, rho) * p
    return 1j * (stiff + local + div)


def nls_eps_rhs_array(grid: Grid, p: np.ndarray, eps: float) -> np.ndarray:
    d2p = spectral_derivative(grid, p, 2)
    return 1j * d2p + nls_eps_nonlinear(grid, p, eps, d2p)


def nls_eps_rhs(psi: WaveField, eps: float, sigma: float = 0.9) -> WaveField:
    """``d psi / dt`` for the anisotropic NLS equation."""
    grid, p = _values(psi)
    check_validity(p, eps, sigma)
    return WaveField(grid, nls_eps_rhs_array(grid, p, eps))


def cs_nonlinear(grid: Grid, p: np.ndarray) -> np.ndarray:
    return 0.5j * np.abs(p) ** 2 * p


def cs_rhs_array(grid: Grid, p: np.ndarray) -> np.ndarray:
    return 1j * spectral_derivative(grid, p, 2) + cs_nonlinear(grid, p)


def cs_rhs(psi: WaveField) -> WaveField:
    grid, p = _values(psi)
    return WaveField(grid, cs_rhs_array(grid, p))


def remainder_R_eps(psi: WaveField, eps: float, sigma: float = 0.9) -> WaveField:
    """Remainder of the cubic NLS operator applied to an anisotropic NLS solution, divided by eps."""
    grid, p = _values(psi)
    check_validity(p, eps, sigma)
    a2 = np.abs(p) ** 2
    rho = _rho(p, eps)
    d2p = spectral_derivative(grid, p, 2)
    first = a2 / (1.0 + rho) * d2p
    second = -a2**2 / (2.0 * (1.0 + rho) ** 2) * p
    third = -_divergence_term(grid, p, rho) * p
    return WaveField(grid, first + second + third)


def consistency_residual(psi: WaveField, eps: float, sigma: float = 0.9) -> float:
    """Max modulus of ``i psi_t + psi_xx + |psi|^2 psi/2 - eps R_eps``.

    ``psi_t`` is the anisotropic NLS right-hand side, so the result
    vanishes up to rounding for every admissible field.
    """
    grid, p = _values(psi)
    dt = nls_eps_rhs(psi, eps, sigma).psi
    cs_op = 1j * dt + spectral_derivative(grid, p, 2) + 0.5 * np.abs(p) ** 2 * p
    return float(np.max(np.abs(cs_op - eps * remainder_R_eps(psi, eps, sigma).psi)))


# ---------------------------------------------- second-order LL reformulation

def f_eps(m: Magnetization, eps: float) -> np.ndarray:
    """Source term of the second-order LL equation (``lambda1 = lambda3 = 1/eps``)."""
    grid, v = _as_array(m)
    d1 = magnetization_derivative(grid, v, 1)
    lap = magnetization_derivative(grid, v, 2)
    g2 = np.sum(d1**2, axis=0)
    m1, m2, m3 = v
    t1 = np.stack([spectral_derivative(grid, g2 * d1[i], 1) for i in range(3)])
    t2 = -2.0 * np.stack([spectral_derivative(grid, g2 * v[i], 2) for i in range(3)])
    s = m1**2 + m3**2
    ds = spectral_derivative(grid, s, 1)
    t3 = np.zeros_like(v)
    t3[0] = (m1**2 + 3 * m3**2) * lap[0] - 2 * m1 * m3 * lap[2] - g2 * m1
    t3[2] = (3 * m1**2 + m3**2) * lap[2] - 2 * m1 * m3 * lap[0] - g2 * m3
    t3[1] = s * lap[1]
    t3 += ds * d1
    t4 = np.zeros_like(v)
    t4[0] = s * m1
    t4[2] = s * m3
    return t1 + t2 - t3 / eps + t4 / eps**2


def second_order_ll_operator(m: Magnetization, dttm: np.ndarray, eps: float) -> np.ndarray:
    """``m_tt + m_xxxx - (2/eps)(m1_xx e1 + m3_xx e3) + (m1 e1 + m3 e3)/eps^2 - F_eps(m)``."""
    grid, v = _as_array(m)
    lap = magnetization_derivative(grid, v, 2)
    bilap = magnetization_derivative(grid, v, 4)
    out = np.asarray(dttm, dtype=float) + bilap - f_eps(m, eps)
    out[0] += -2.0 / eps * lap[0] + v[0] / eps**2
    out[2] += -2.0 / eps * lap[2] + v[2] / eps**2
    return out


def second_order_ll_residual(m: Magnetization, dttm: np.ndarray, eps: float) -> float:
    r = second_order_ll_operator(m, dttm, eps)
    return float(np.sqrt(sum(l2_norm(m.grid, r[i]) ** 2 for i in range(3))))
