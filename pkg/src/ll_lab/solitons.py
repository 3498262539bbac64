"""Closed-form solitons.

* bright solitons of the focusing cubic Schrodinger equation;
* traveling waves ``mcheck = V(x - ct) exp(i omega t)``, ``m2 = V2(x - ct)``
  of the Landau-Lifshitz equation with ``lambda1 = lambda3 = lambda``;
* the rescaled Landau-Lifshitz soliton ``Upsilon_eps`` converging to the
  bright soliton, and the coefficient ``W`` of its first-order correction;
* residuals of the traveling-wave ODE system and of its first integrals.

Formulas are evaluated through ``u = exp(-rate |x|)`` so nothing overflows
at the box edges.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .fields import Magnetization, WaveField, check_eps, magnetization_derivative
from .spectral import Grid, l2_norm, sech, sobolev_norm

TAIL_TOL = 1e-14
DECAY_LENGTHS = 40.0


class InadmissibleError(ValueError):
    pass


class UndersizedBoxError(ValueError):
    pass


@dataclass(frozen=True)
class SolitonParams:
    """Traveling-wave parameters; ``case`` is ``"i"`` (kink) or ``"ii"``."""

    lam: float
    c: float = 0.0
    omega: float = 0.0
    delta: int = 1
    case: str = "ii"

    def __post_init__(self):
        if self.case not in ("i", "ii"):
            raise ValueError(f"case must be 'i' or 'ii', got {self.case!r}")
        if self.delta not in (1, -1):
            raise InadmissibleError(f"delta must be +1 or -1, got {self.delta}")
        if not self.lam > 0:
            raise InadmissibleError(f"lambda must be positive, got {self.lam}")
        if self.case == "i":
            if self.c != 0 or self.omega != 0:
                raise InadmissibleError("case (i) requires c = omega = 0")
        else:
            check_case_ii(self.lam, self.c, self.omega, self.delta)

    @property
    def decay_rate(self) -> float:
        if self.case == "i":
            return float(np.sqrt(self.lam))
        return float(np.sqrt(self.lam + self.delta * self.omega - self.c**2 / 4))

    @property
    def required_half_width(self) -> float:
        return DECAY_LENGTHS / self.decay_rate


@dataclass(frozen=True)
class CsSolitonParams:
    c: float
    omega: float

    def __post_init__(self):
        check_cs(self.c, self.omega)

    @property
    def decay_rate(self) -> float:
        return 0.5 * float(np.sqrt(4 * self.omega - self.c**2))

    @property
    def required_half_width(self) -> float:
        return DECAY_LENGTHS / self.decay_rate


def check_case_ii(lam, c, omega, delta):
    wd = omega * delta
    bound = 4 * (lam + wd)
    if wd < 0:
        if not -wd < lam:
            raise InadmissibleError(
                f"0 < -omega*delta < lambda violated: -omega*delta = {-wd} >= lambda = {lam}")
        if not c**2 < bound:
            raise InadmissibleError(
                f"c^2 < 4(lambda + omega*delta) violated: {c**2} >= {bound}")
    else:
        if not 0 < c**2:
            raise InadmissibleError("omega*delta >= 0 requires c != 0 (0 < c^2 violated)")
        if not c**2 < bound:
            raise InadmissibleError(
                f"c^2 < 4(lambda + omega*delta) violated: {c**2} >= {bound}")


def check_cs(c, omega):
    if not 4 * omega > c**2:
        raise InadmissibleError(f"4*omega > c^2 violated: 4*omega = {4 * omega}, c^2 = {c**2}")


def _check_tail(grid: Grid, amplitude: float, rate: float, center: float, what: str):
    room = grid.half_width - abs(center)
    tail = amplitude * 2.0 * np.exp(-rate * room) if room > 0 else np.inf
    if tail > TAIL_TOL:
        need = abs(center) + np.log(2.0 * amplitude / TAIL_TOL) / rate
        raise UndersizedBoxError(
            f"{what}: box half-width {grid.half_width:.4g} leaves edge tail {tail:.2e};"
            f" need half-width >= {need:.4g}")


def _sign(c: float) -> float:
    # sign(0) = 0; only reached where its coefficient vanishes
    return float(np.sign(c))


# ---------------------------------------------------------------- cubic NLS

def cs_bright_soliton(c: float, omega: float, t: float, grid: Grid) -> WaveField:
    """Bright soliton of ``i psi_t + psi_xx + |psi|^2 psi / 2 = 0``."""
    check_cs(c, omega)
    k = np.sqrt(4 * omega - c**2)
    _check_tail(grid, k, k / 2, c * t, "bright soliton")
    y = grid.nodes - c * t
    psi = k * np.exp(0.5j * c * y) * sech(0.5 * k * y) * np.exp(1j * omega * t)
    return WaveField(grid, psi)


# ------------------------------------------------------- LL traveling waves

def _case_i_profile(lam, delta, y):
    r = np.sqrt(lam)
    return sech(r * y).astype(complex), delta * np.tanh(r * y)


def _case_ii_coefficients(lam, c, omega, delta):
    """``(s, D0, R, A, B, beta)`` of the case (ii) closed form."""
    wd = omega * delta
    s2 = 4 * (lam + wd) - c**2
    R = np.hypot(np.sqrt(lam) * c, omega)
    g = 2 * lam * c**2 / (R + abs(omega)) if R > 0 else 0.0   # 2R - 2|omega|
    if wd >= 0:
        a2 = g + c**2
        b2 = 2 * R + 2 * abs(omega) - c**2
    else:
        a2 = 2 * R + 2 * abs(omega) + c**2
        b2 = g - c**2
    A = np.sqrt(max(a2, 0.0))
    B = np.sqrt(max(b2, 0.0))
    return np.sqrt(s2), 2 * lam + wd, R, A, B, 0.5 * np.sqrt(s2)


def _case_ii_profile(lam, c, omega, delta, y):
    s, d0, R, A, B, beta = _case_ii_coefficients(lam, c, omega, delta)
    u = np.exp(-beta * np.abs(y))
    u2 = u * u
    den = 2 * u2 * d0 + R * (1 + u2 * u2)
    bracket = A * (1 + u2) + 1j * _sign(c) * delta * B * np.sign(y) * (1 - u2)
    vcheck = s * np.exp(0.5j * c * delta * y) * u * bracket / den
    v2 = delta * (1 - s * s * 2 * u2 / den)
    return vcheck, v2


def ll_profile(p: SolitonParams, grid: Grid, shift: float = 0.0) -> Magnetization:
    """Static profile ``V`` sampled at ``x - shift``."""
    amp = 1.0
    _check_tail(grid, amp, p.decay_rate, shift, "traveling-wave profile")
    y = grid.nodes - shift
    if p.case == "i":
        vcheck, v2 = _case_i_profile(p.lam, p.delta, y)
    else:
        vcheck, v2 = _case_ii_profile(p.lam, p.c, p.omega, p.delta, y)
    return Magnetization(grid, vcheck.real, v2, vcheck.imag)


def ll_soliton_case_i(lam: float, delta: int, grid: Grid) -> Magnetization:
    return ll_profile(SolitonParams(lam, 0.0, 0.0, delta, case="i"), grid)


def ll_soliton_case_ii(p: SolitonParams, grid: Grid) -> Magnetization:
    if p.case != "ii":
        raise InadmissibleError("ll_soliton_case_ii needs case (ii) parameters")
    return ll_profile(p, grid)


def ll_soliton_phase(p: SolitonParams, x):
    """Continuous phase of ``V`` for ``c != 0``, normalized to 0 at ``x = 0``."""
    if p.case != "ii" or p.c == 0:
        raise InadmissibleError("the phase lift is defined for case (ii) with c != 0")
    _, _, _, A, B, beta = _case_ii_coefficients(p.lam, p.c, p.omega, p.delta)
    x = np.asarray(x, dtype=float)
    return p.c * p.delta * x / 2 + _sign(p.c) * p.delta * np.arctan(B / A * np.tanh(beta * x))


def ll_traveling_wave(p: SolitonParams, t: float, grid: Grid) -> Magnetization:
    prof = ll_profile(p, grid, shift=p.c * t)
    vcheck = prof.mcheck * np.exp(1j * p.omega * t)
    return Magnetization(grid, vcheck.real, prof.m2, vcheck.imag)


def ll_traveling_wave_dt(p: SolitonParams, t: float, grid: Grid, order: int = 1) -> np.ndarray:
    """Time derivatives (order 1 or 2) of the traveling wave, shape ``(3, n)``."""
    prof = ll_profile(p, grid, shift=p.c * t)
    v = prof.as_array()
    dv = magnetization_derivative(grid, v, 1)
    rot = np.exp(1j * p.omega * t)
    vc, dvc = v[0] + 1j * v[2], dv[0] + 1j * dv[2]
    if order == 1:
        tc = (-p.c * dvc + 1j * p.omega * vc) * rot
        t2 = -p.c * dv[1]
    elif order == 2:
        d2 = magnetization_derivative(grid, v, 2)
        d2c = d2[0] + 1j * d2[2]
        tc = (p.c**2 * d2c - 2j * p.c * p.omega * dvc - p.omega**2 * vc) * rot
        t2 = p.c**2 * d2[1]
    else:
        raise ValueError("order must be 1 or 2")
    return np.stack([tc.real, t2, tc.imag])


# -------------------------------------------------- the cubic NLS regime

def scaled_params(c: float, omega: float, eps: float) -> SolitonParams:
    """LL soliton parameters whose rescaling approximates ``Psi_{c,omega}``."""
    return SolitonParams(lam=1.0 / eps, c=c, omega=omega - 1.0 / eps, delta=1)


def _check_upsilon(c, omega, eps):
    check_eps(eps)
    check_cs(c, omega)
    if c < 0:
        raise InadmissibleError(f"c >= 0 required, got {c}")
    if not omega > 0:
        raise InadmissibleError(f"omega > 0 required, got {omega}")
    if not eps < 1.0 / omega:
        raise InadmissibleError(f"eps < 1/omega violated: eps = {eps}, 1/omega = {1 / omega}")
    scaled_params(c, omega, eps)


def upsilon_eps(c: float, omega: float, eps: float, t: float, grid: Grid) -> WaveField:
    """Rescaled LL soliton, an exact solution of the anisotropic NLS equation."""
    _check_upsilon(c, omega, eps)
    alpha = np.sqrt(omega - c**2 / 4)
    _check_tail(grid, 2 * alpha, alpha, c * t, "Upsilon_eps")
    y = (c**2 - 2 * omega) * eps + omega**2 * eps**2
    q = np.sqrt(1 + y)
    a2 = 2 * q + 2 + (c**2 - 2 * omega) * eps
    b2 = -(c**2 - 2 * omega) * eps * y / (1 + q) ** 2 + 2 * omega**2 * eps**2 / (1 + q)
    A, B = np.sqrt(a2), np.sqrt(max(b2, 0.0))
    x = grid.nodes - c * t
    u = np.exp(-alpha * np.abs(x))
    u2 = u * u
    den = 2 * u2 * (1 + omega * eps) + q * (1 + u2 * u2)
    bracket = A * (1 + u2) + 1j * _sign(c) * B * np.sign(x) * (1 - u2)
    psi = 2 * alpha * np.exp(0.5j * c * x) * u * bracket / den * np.exp(1j * omega * t)
    return WaveField(grid, psi)


def first_order_correction(c: float, omega: float, grid: Grid) -> WaveField:
    """Coefficient ``W`` of ``eps`` in ``Upsilon_eps - Psi_{c,omega}`` at ``t = 0``."""
    check_cs(c, omega)
    alpha = np.sqrt(omega - c**2 / 4)
    _check_tail(grid, alpha * (4 * alpha**2 + c**2 + 8 * alpha**2), alpha, 0.0, "W")
    x = grid.nodes
    sh = sech(alpha * x)
    th = np.tanh(alpha * x)
    w = (alpha / 4 * np.exp(0.5j * c * x)
         * ((4 * alpha**2 - c**2) * sh - 8 * alpha**2 * sh**3 + 4j * c * alpha * th * sh))
    return WaveField(grid, w)


# ------------------------------------------------------------- residuals

def tw_residual(profile: Magnetization, p: SolitonParams) -> tuple[float, float]:
    """L2 norms of the two traveling-wave equation residuals."""
    grid = profile.grid
    v = profile.as_array()
    d1 = magnetization_derivative(grid, v, 1)
    d2 = magnetization_derivative(grid, v, 2)
    vc, v2 = v[0] + 1j * v[2], v[1]
    dvc, dv2 = d1[0] + 1j * d1[2], d1[1]
    d2vc, d2v2 = d2[0] + 1j * d2[2], d2[1]
    lam, c, w = p.lam, p.c, p.omega
    energy = np.abs(dvc) ** 2 + dv2**2 + lam * np.abs(vc) ** 2
    r1 = (-d2vc + 1j * c * (v2 * dvc - dv2 * vc) - energy * vc + lam * vc + w * v2 * vc)
    r2 = -d2v2 + c * np.real(1j * vc * np.conj(dvc)) - energy * v2 - w * np.abs(vc) ** 2
    return l2_norm(grid, r1), l2_norm(grid, r2)


@dataclass(frozen=True)
class IdentityResiduals:
    """Max pointwise residuals of the first integrals of the profile ODE."""

    gradient_energy: float
    momentum: float
    v2_derivative: float
    v2_at_origin: float | None

    def max(self) -> float:
        vals = [self.gradient_energy, self.momentum, self.v2_derivative]
        if self.v2_at_origin is not None:
            vals.append(self.v2_at_origin)
        return max(vals)


def appendix_identity_residuals(profile: Magnetization, p: SolitonParams) -> IdentityResiduals:
    grid = profile.grid
    v = profile.as_array()
    d1 = magnetization_derivative(grid, v, 1)
    vc, v2 = v[0] + 1j * v[2], v[1]
    dvc, dv2 = d1[0] + 1j * d1[2], d1[1]
    lam, c, w = p.lam, p.c, p.omega
    vinf = float(p.delta)
    grad2 = np.abs(dvc) ** 2 + dv2**2
    r_energy = grad2 - (lam * (1 - v2**2) - 2 * w * (v2 - vinf))
    r_mom = np.real(1j * vc * np.conj(dvc)) - c * (vinf - v2)
    r_v2 = dv2**2 - (v2 - vinf) ** 2 * (lam * (v2 + vinf) ** 2 + 2 * w * (v2 + vinf) - c**2)
    origin = None
    if p.case == "ii":
        v20 = (vinf * np.sqrt(w**2 + c**2 * lam) - w - lam * vinf) / lam
        j0 = int(np.argmin(np.abs(grid.nodes)))
        origin = float(abs(v2[j0] - v20))
    return IdentityResiduals(
        gradient_energy=float(np.max(np.abs(r_energy))),
        momentum=float(np.max(np.abs(r_mom))),
        v2_derivative=float(np.max(np.abs(r_v2))),
        v2_at_origin=origin,
    )


def soliton_h_norm_error(c, omega, eps, k, grid: Grid, t: float = 0.0):
    """``(|Upsilon_eps - Psi_{c,omega}|_{H^k}, |W|_{H^k})`` at time *t*."""
    diff = upsilon_eps(c, omega, eps, t, grid).psi - cs_bright_soliton(c, omega, t, grid).psi
    return sobolev_norm(grid, diff, k), sobolev_norm(grid, first_order_correction(c, omega, grid).psi, k)


__all__ = [
    "SolitonParams", "CsSolitonParams", "InadmissibleError", "UndersizedBoxError",
    "cs_bright_soliton", "ll_soliton_case_i", "ll_soliton_case_ii", "ll_soliton_phase",
    "ll_profile", "ll_traveling_wave", "ll_traveling_wave_dt", "scaled_params",
    "upsilon_eps", "first_order_correction", "tw_residual", "appendix_identity_residuals",
    "IdentityResiduals", "soliton_h_norm_error",
]
