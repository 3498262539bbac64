"""Energies, energy hierarchies, invariants and the initial-data quantity K_eps.

Time derivatives entering the order-k energies always come from the
equations' right-hand sides (:func:`ll_rhs`, :func:`nls_eps_rhs`); nothing
here differences trajectories in time.
"""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np

from .equations import AnisotropyParams, ll_rhs, nls_eps_rhs
from .fields import (DEFAULT_SIGMA, Magnetization, WaveField, check_validity,
                     magnetization_from_wavefield, magnetization_derivative,
                     wavefield_from_magnetization)
from .spectral import sobolev_norm, sobolev_norm_sq, spectral_derivative

MAX_HIERARCHY_ORDER = 8


def _hdot2(grid, values, s):
    return sobolev_norm_sq(grid, values, s, homogeneous=True)


def _check_order(order):
    if not 2 <= order <= MAX_HIERARCHY_ORDER:
        raise ValueError(f"hierarchy order must be in [2, {MAX_HIERARCHY_ORDER}], got {order}")


def landau_lifshitz_energy(m: Magnetization, a: AnisotropyParams) -> float:
    grid = m.grid
    d1 = m.derivative(1)
    density = np.sum(d1**2, axis=0) + a.lambda1 * m.m1**2 + a.lambda3 * m.m3**2
    return float(0.5 * grid.integrate(density))


def e_ll_k(m: Magnetization, dtm: np.ndarray, order: int, a: AnisotropyParams) -> float:
    """Order-*order* Landau-Lifshitz energy; norms are ``Hdot^{order-2}``."""
    _check_order(order)
    grid, s = m.grid, order - 2
    v = m.as_array()
    lap = magnetization_derivative(grid, v, 2)
    d1 = spectral_derivative(grid, v[0], 1), spectral_derivative(grid, v[2], 1)
    total = sum(_hdot2(grid, dtm[i], s) for i in range(3))
    total += sum(_hdot2(grid, lap[i], s) for i in range(3))
    total += (a.lambda1 + a.lambda3) * (_hdot2(grid, d1[0], s) + _hdot2(grid, d1[1], s))
    total += a.lambda1 * a.lambda3 * (_hdot2(grid, v[0], s) + _hdot2(grid, v[2], s))
    return 0.5 * total


def nls_energy_eps(psi: WaveField, eps: float, sigma: float = DEFAULT_SIGMA) -> float:
    """Conserved energy of the anisotropic NLS equation."""
    grid, p = psi.grid, psi.psi
    check_validity(p, eps, sigma)
    dp = spectral_derivative(grid, p, 1)
    a2 = np.abs(p) ** 2
    inner = np.real(p * np.conj(dp))
    density = a2 + eps * np.abs(dp) ** 2 + eps**2 * inner**2 / (1.0 - eps * a2)
    return float(0.5 * grid.integrate(density))


def _rho_parts(grid, p, eps):
    rho = np.sqrt(1.0 - eps * np.abs(p) ** 2)
    dp = spectral_derivative(grid, p, 1)
    dt_rho = eps * spectral_derivative(grid, np.real(1j * p * np.conj(dp)), 1)
    lap_rho = spectral_derivative(grid, rho, 2)
    return dp, dt_rho, lap_rho


def frak_e_k(psi: WaveField, dtpsi: WaveField, eps: float, order: int,
             sigma: float = DEFAULT_SIGMA) -> float:
    """Order-*order* anisotropic NLS energy."""
    _check_order(order)
    grid, p = psi.grid, psi.psi
    check_validity(p, eps, sigma)
    s = order - 2
    dp, dt_rho, lap_rho = _rho_parts(grid, p, eps)
    d2p = spectral_derivative(grid, p, 2)
    total = (_hdot2(grid, p, s)
             + _hdot2(grid, eps * dtpsi.psi - 1j * p, s)
             + eps**2 * _hdot2(grid, d2p, s)
             + eps * (_hdot2(grid, dt_rho, s) + _hdot2(grid, lap_rho, s) + 2 * _hdot2(grid, dp, s)))
    return 0.5 * total


@dataclass(frozen=True)
class BoundRecord:
    """Two-sided comparison of an order-l energy with its Sobolev combination."""

    order: int
    lower_combo: float
    frak_e_l: float
    ratio: float
    lower_holds: bool

    @property
    def upper_constant(self) -> float:
        """Empirical constant ``C`` of the upper bound (the combination without 1/2)."""
        return 0.5 * self.ratio


def norm_equivalence_check(psi: WaveField, dtpsi: WaveField | None, eps: float, order: int,
                           sigma: float = DEFAULT_SIGMA) -> BoundRecord:
    grid, p = psi.grid, psi.psi
    check_validity(p, eps, sigma)
    if order == 1:
        lower = 0.5 * (sobolev_norm_sq(grid, p, 0) + eps * _hdot2(grid, p, 1))
        value = nls_energy_eps(psi, eps, sigma)
    else:
        if dtpsi is None:
            dtpsi = nls_eps_rhs(psi, eps, sigma)
        s = order - 2
        lower = 0.5 * (_hdot2(grid, p, s) + eps * _hdot2(grid, p, s + 1) + eps**2 * _hdot2(grid, p, s + 2))
        value = frak_e_k(psi, dtpsi, eps, order, sigma)
    ratio = value / lower if lower > 0 else (1.0 if value == 0 else math.inf)
    # the lower combination is a sub-sum of the energy's terms: exact up to rounding
    holds = lower <= value * (1 + 1e-13) + 1e-300
    return BoundRecord(order, lower, value, ratio, bool(holds))


def cs_invariants(psi: WaveField) -> tuple[float, float]:
    """Mass ``int |psi|^2`` and energy ``int |psi_x|^2 / 2 - int |psi|^4 / 4``."""
    grid, p = psi.grid, psi.psi
    dp = spectral_derivative(grid, p, 1)
    mass = grid.integrate(np.abs(p) ** 2)
    energy = 0.5 * grid.integrate(np.abs(dp) ** 2) - 0.25 * grid.integrate(np.abs(p) ** 4)
    return float(mass), float(energy)


def cs_hamiltonian(psi: WaveField) -> float:
    """Conserved energy ``int |psi_x|^2 / 2 - int |psi|^4 / 8`` of the cubic NLS flow.

    With the ``1/2`` in front of the nonlinearity this, not ``E_CS``, is the Hamiltonian.
    The two agree on the kinetic part and differ by ``int |psi|^4 / 8``.
    """
    grid, p = psi.grid, psi.psi
    dp = spectral_derivative(grid, p, 1)
    return float(0.5 * grid.integrate(np.abs(dp) ** 2) - 0.125 * grid.integrate(np.abs(p) ** 4))


@dataclass(frozen=True)
class KEpsReport:
    k_eps_0: float
    condition_lhs: float
    t_eps_lower: float
    A: float
    k: int

    @property
    def condition_holds(self) -> bool:
        return self.condition_lhs <= 1.0


def k_eps_0(psi0: WaveField, psi_eps0: WaveField, eps: float, k: int = 3, A: float = 1.0) -> KEpsReport:
    """Initial-data size controlling both the horizon and the error constant."""
    if k < 3:
        raise ValueError(f"k must be >= 3 in one dimension, got {k}")
    grid = psi0.grid
    q = psi_eps0.psi
    value = (sobolev_norm(grid, psi0.psi, k) + sobolev_norm(grid, q, k)
             + math.sqrt(eps) * sobolev_norm(grid, q, k + 1, homogeneous=True)
             + eps * sobolev_norm(grid, q, k + 2, homogeneous=True))
    horizon = math.inf if value == 0 else 1.0 / (A * value**2)
    return KEpsReport(value, A * math.sqrt(eps) * value, horizon, A, k)


@dataclass
class EnergyReport:
    e_ll: float | None = None
    e_ll_k: dict[int, float] | None = None
    frak_e: float | None = None
    frak_e_k: dict[int, float] | None = None
    m2_mass: float | None = None
    e_cs: float | None = None
    cs_hamiltonian: float | None = None

    def to_dict(self) -> dict:
        out = asdict(self)
        for key in ("e_ll_k", "frak_e_k"):
            if out[key] is not None:
                out[key] = {str(k): v for k, v in out[key].items()}
        return out


def energy_report(field, *, eps: float | None = None, anisotropy: AnisotropyParams | None = None,
                  t: float = 0.0, orders=(2, 3, 4, 5)) -> EnergyReport:
    """Every energy that makes sense for *field*.

    A magnetization needs *anisotropy* (or *eps*, meaning ``1/eps`` on both
    axes); with *eps* it is also mapped to its wavefield at time *t*.
    """
    rep = EnergyReport()
    m = psi = None
    if isinstance(field, Magnetization):
        m = field
        if anisotropy is None and eps is not None:
            anisotropy = AnisotropyParams.from_eps(eps)
        if eps is not None and np.all(m.m2 > 0):
            psi = wavefield_from_magnetization(m, eps, t)
    elif isinstance(field, WaveField):
        psi = field
        if eps is not None:
            m = magnetization_from_wavefield(psi, eps, t)
            anisotropy = anisotropy or AnisotropyParams.from_eps(eps)
    else:
        raise TypeError(f"cannot report energies of {type(field).__name__}")
    if m is not None and anisotropy is not None:
        rep.e_ll = landau_lifshitz_energy(m, anisotropy)
        dtm = ll_rhs(m, anisotropy)
        rep.e_ll_k = {k: e_ll_k(m, dtm, k, anisotropy) for k in orders}
    if psi is not None:
        rep.m2_mass, rep.e_cs = cs_invariants(psi)
        rep.cs_hamiltonian = cs_hamiltonian(psi)
        if eps is not None:
            rep.frak_e = nls_energy_eps(psi, eps)
            dtpsi = nls_eps_rhs(psi, eps)
            rep.frak_e_k = {k: frak_e_k(psi, dtpsi, eps, k) for k in orders}
    return rep
