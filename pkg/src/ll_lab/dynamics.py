"""Time integration of Landau-Lifshitz, anisotropic NLS and cubic NLS.

The Schrodinger flows use an integrating-factor RK4 (the free propagator
``exp(i t d_xx)`` is applied exactly in Fourier space, everything else is
explicit).  Landau-Lifshitz uses classical RK4 with a projection back to
the sphere after every step.  Each run records per-step diagnostics and
aborts with a structured report instead of producing NaNs.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from enum import Enum

import numpy as np

from .energetics import cs_hamiltonian, cs_invariants, landau_lifshitz_energy, nls_energy_eps
from .equations import (AnisotropyParams, cs_nonlinear, cs_rhs_array, ll_rhs_array,
                        nls_eps_nonlinear, nls_eps_rhs_array, second_order_ll_residual)
from .fields import (DEFAULT_SIGMA, Magnetization, SphereError, ValidityError, WaveField,
                     check_eps, check_sphere_constraint)
from .spectral import Grid, sobolev_norm_sq

RK4_IMAG_LIMIT = 2.8   # RK4 stability interval on the imaginary axis is 2*sqrt(2)


class Scheme(str, Enum):
    IFRK4 = "IFRK4"
    RK4 = "RK4"


class IntegratorError(RuntimeError):
    """A run aborted; ``report`` says where and why, ``trajectory`` holds what was computed."""

    def __init__(self, message, *, report=None, trajectory=None):
        super().__init__(message)
        self.report = report or {}
        self.trajectory = trajectory


class ValidityBreach(IntegratorError, ValidityError):
    pass


@dataclass(frozen=True)
class IntegratorConfig:
    dt: float
    t_end: float
    scheme: Scheme = Scheme.IFRK4
    snapshot_stride: int = 1
    validity_sigma: float = DEFAULT_SIGMA
    energy_drift_limit: float = 1e-3
    check_stability: bool = True

    def __post_init__(self):
        object.__setattr__(self, "scheme", Scheme(self.scheme))
        if not self.dt > 0:
            raise ValueError(f"dt must be positive, got {self.dt}")
        if not self.t_end > 0:
            raise ValueError(f"t_end must be positive, got {self.t_end}")
        if self.snapshot_stride < 1:
            raise ValueError(f"snapshot_stride must be >= 1, got {self.snapshot_stride}")
        if not 0 < self.validity_sigma < 1:
            raise ValueError(f"validity_sigma must lie in (0, 1), got {self.validity_sigma}")

    @property
    def steps(self) -> int:
        """Step count; dt is shrunk slightly when it does not divide t_end."""
        n = self.t_end / self.dt
        return max(1, int(round(n)) if abs(n - round(n)) < 1e-9 * n else math.ceil(n))

    @property
    def step(self) -> float:
        return self.t_end / self.steps


@dataclass
class Trajectory:
    grid: Grid
    equation: str
    times: np.ndarray
    states: list
    diagnostics: dict[str, np.ndarray] = field(default_factory=dict)
    eps: float | None = None

    @property
    def final(self):
        return self.states[-1]

    def max_relative_drift(self, key: str) -> float:
        d = self.diagnostics.get(key)
        return float(np.max(np.abs(d))) if d is not None and len(d) else 0.0


# ------------------------------------------------------------ stability

def stability_bound(equation: str, grid: Grid, scheme: Scheme | str, *, amplitude: float = 0.0,
                    eps: float | None = None, anisotropy: AnisotropyParams | None = None) -> float:
    """Largest stable dt estimated from the linearized spectrum at *amplitude*."""
    scheme = Scheme(scheme)
    k2 = grid.kmax**2
    a2 = amplitude**2
    if equation == "ll":
        lam = anisotropy.max if anisotropy else 0.0
        rate = k2 + lam
    elif equation == "cs":
        rate = a2 if scheme is Scheme.IFRK4 else k2 + a2
        rate = max(rate, 1e-12)
    elif equation == "nlse":
        rho = math.sqrt(max(1.0 - eps * a2, 1e-12))
        stiff = eps * a2 * k2 * (1.0 / (1.0 + rho) + 1.0 / rho)
        rate = stiff + a2 if scheme is Scheme.IFRK4 else k2 + stiff + a2
        rate = max(rate, 1e-12)
    else:
        raise ValueError(f"unknown equation {equation!r}")
    return RK4_IMAG_LIMIT / rate


def _check_dt(cfg: IntegratorConfig, bound: float, what: str, scheme: Scheme | None = None):
    if cfg.check_stability and cfg.step > bound:
        scheme = scheme or cfg.scheme
        raise ValueError(f"dt = {cfg.step:.4g} exceeds the {scheme.value} stability bound"
                         f" {bound:.4g} for {what}")


# ------------------------------------------------------------- steppers

def _rk4_step(f, u, h):
    k1 = f(u)
    k2 = f(u + 0.5 * h * k1)
    k3 = f(u + 0.5 * h * k2)
    k4 = f(u + h * k3)
    return u + h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4)


class _IFRK4:
    """Integrating-factor RK4 for ``u_t = i u_xx + N(u)``."""

    def __init__(self, grid: Grid, h: float, nonlinear):
        self.h = h
        self.nl = nonlinear
        lin = -1j * grid.wavenumbers**2
        self.e_half = np.exp(0.5 * h * lin)
        self.e_full = np.exp(h * lin)

    def _prop(self, e, u):
        return np.fft.ifft(e * np.fft.fft(u))

    def __call__(self, u):
        h, nl = self.h, self.nl
        k1 = nl(u)
        eu = self._prop(self.e_half, u)
        k2 = nl(eu + 0.5 * h * self._prop(self.e_half, k1))
        k3 = nl(eu + 0.5 * h * k2)
        k4 = nl(self._prop(self.e_full, u) + h * self._prop(self.e_half, k3))
        return (self._prop(self.e_full, u + h / 6.0 * k1)
                + self._prop(self.e_half, h / 3.0 * (k2 + k3)) + h / 6.0 * k4)


def _relative(value, ref, scale=None):
    scale = abs(ref) if scale is None else scale
    return 0.0 if value == ref else (value - ref) / scale if scale > 0 else value - ref


# ------------------------------------------------------------ Landau-Lifshitz

def evolve_ll(m0: Magnetization, a: AnisotropyParams, cfg: IntegratorConfig) -> Trajectory:
    """Integrate Landau-Lifshitz with RK4 and per-step renormalization.

    ``cfg.scheme`` is ignored: there is no stiff linear part to integrate
    exactly, so LL always runs plain RK4.
    """
    grid = m0.grid
    _check_dt(cfg, stability_bound("ll", grid, Scheme.RK4, anisotropy=a), "Landau-Lifshitz",
              Scheme.RK4)
    h, steps = cfg.step, cfg.steps
    u = m0.as_array().copy()
    e0 = landau_lifshitz_energy(m0, a)
    times, states = [0.0], [m0]
    step_t = np.empty(steps)
    energy = np.empty(steps)
    drift = np.empty(steps)
    norm_drift = np.empty(steps)
    rhs = lambda v: ll_rhs_array(grid, v, a)

    def partial(j):
        diag = {"t": step_t[:j], "energy": energy[:j], "energy_drift": drift[:j],
                "norm_drift": norm_drift[:j]}
        return Trajectory(grid, "ll", np.array(times), states, diag)

    for j in range(steps):
        u = _rk4_step(rhs, u, h)
        norm = np.sqrt(np.sum(u * u, axis=0))
        norm_drift[j] = float(np.max(np.abs(norm - 1.0))) if np.all(np.isfinite(norm)) else math.inf
        t = (j + 1) * h
        step_t[j] = t
        if not np.all(np.isfinite(norm)) or np.min(norm) < 0.5:
            raise IntegratorError(
                f"Landau-Lifshitz: sphere norm collapsed at t = {t:.6g}; dt = {h:.3g} is too stiff",
                report={"t": t, "step": j + 1, "norm_drift": norm_drift[j], "dt": h},
                trajectory=partial(j + 1))
        u = u / norm
        state = Magnetization.from_array(grid, u)
        energy[j] = landau_lifshitz_energy(state, a)
        drift[j] = _relative(energy[j], e0)
        if abs(drift[j]) > cfg.energy_drift_limit:
            raise IntegratorError(
                f"Landau-Lifshitz: relative energy drift {drift[j]:.3e} exceeds"
                f" {cfg.energy_drift_limit:g} at t = {t:.6g} (dt = {h:.3g})",
                report={"t": t, "step": j + 1, "energy_drift": drift[j], "dt": h,
                        "norm_drift": norm_drift[j]},
                trajectory=partial(j + 1))
        if (j + 1) % cfg.snapshot_stride == 0 or j + 1 == steps:
            times.append(t)
            states.append(state)
    return partial(steps)


# ------------------------------------------------------------ Schrodinger flows

def _evolve_schrodinger(psi0: WaveField, cfg: IntegratorConfig, equation: str, eps: float | None):
    grid = psi0.grid
    amp = float(np.max(np.abs(psi0.psi)))
    h, steps = cfg.step, cfg.steps
    if equation == "nlse":
        margin0 = math.sqrt(eps) * amp
        if margin0 > cfg.validity_sigma:
            raise ValidityError(
                f"initial data violate the validity bound: sqrt(eps)*max|psi| = {margin0:.6g}"
                f" > {cfg.validity_sigma}", margin=margin0, bound=cfg.validity_sigma)
        _check_dt(cfg, stability_bound("nlse", grid, cfg.scheme, amplitude=amp, eps=eps),
                  f"anisotropic NLS (eps = {eps})")
        full = lambda p: nls_eps_rhs_array(grid, p, eps)
        nonlinear = lambda p: nls_eps_nonlinear(grid, p, eps)

        def energies(p):
            return {"energy": nls_energy_eps(WaveField(grid, p), eps, sigma=1.0 - 1e-15)}
    else:
        _check_dt(cfg, stability_bound("cs", grid, cfg.scheme, amplitude=amp), "cubic NLS")
        full = lambda p: cs_rhs_array(grid, p)
        nonlinear = lambda p: cs_nonlinear(grid, p)

        def energies(p):
            field = WaveField(grid, p)
            return {"mass": cs_invariants(field)[0], "energy": cs_hamiltonian(field)}

    step = _IFRK4(grid, h, nonlinear) if cfg.scheme is Scheme.IFRK4 else (lambda u: _rk4_step(full, u, h))
    ref = energies(psi0.psi)
    scales = {k: abs(v) for k, v in ref.items()}
    if equation == "cs":
        # the Hamiltonian is indefinite and can vanish through cancellation
        scales["energy"] = max(scales["energy"], sobolev_norm_sq(grid, psi0.psi, 1, homogeneous=True))
    keys = [f"{k}_drift" for k in ref]
    diag = {"t": np.empty(steps), "amplitude": np.empty(steps),
            **({"margin": np.empty(steps)} if equation == "nlse" else {}),
            **{k: np.empty(steps) for k in ref}, **{k: np.empty(steps) for k in keys}}
    times, states = [0.0], [psi0]
    u = psi0.psi.copy()

    def partial(j):
        d = {k: v[:j] for k, v in diag.items()}
        return Trajectory(grid, equation, np.array(times), states, d, eps=eps)

    for j in range(steps):
        u = step(u)
        t = (j + 1) * h
        diag["t"][j] = t
        finite = np.all(np.isfinite(u))
        peak = float(np.max(np.abs(u))) if finite else math.inf
        diag["amplitude"][j] = peak
        if not finite:
            raise IntegratorError(f"{equation}: non-finite state at t = {t:.6g} (dt = {h:.3g})",
                                  report={"t": t, "step": j + 1, "dt": h}, trajectory=partial(j))
        if equation == "nlse":
            margin = math.sqrt(eps) * peak
            diag["margin"][j] = margin
            if margin > cfg.validity_sigma:
                raise ValidityBreach(
                    f"anisotropic NLS halted at t = {t:.6g}: sqrt(eps)*max|psi| = {margin:.6g}"
                    f" reached validity_sigma = {cfg.validity_sigma}",
                    report={"t": t, "step": j + 1, "margin": margin, "bound": cfg.validity_sigma},
                    trajectory=partial(j))
        now = energies(u)
        for k in ref:
            diag[k][j] = now[k]
            diag[f"{k}_drift"][j] = _relative(now[k], ref[k], scales[k])
        worst = max(abs(diag[k][j]) for k in keys)
        if worst > cfg.energy_drift_limit:
            raise IntegratorError(
                f"{equation}: relative invariant drift {worst:.3e} exceeds {cfg.energy_drift_limit:g}"
                f" at t = {t:.6g} (dt = {h:.3g})",
                report={"t": t, "step": j + 1, "drift": worst, "dt": h}, trajectory=partial(j + 1))
        if (j + 1) % cfg.snapshot_stride == 0 or j + 1 == steps:
            times.append(t)
            states.append(WaveField(grid, u))
    return partial(steps)


def evolve_nls_eps(psi0: WaveField, eps: float, cfg: IntegratorConfig) -> Trajectory:
    """Integrate the anisotropic NLS equation; diagnostics hold energy drift and validity margin."""
    check_eps(eps)
    return _evolve_schrodinger(psi0, cfg, "nlse", eps)


def evolve_cs(psi0: WaveField, cfg: IntegratorConfig) -> Trajectory:
    """Integrate cubic NLS; diagnostics hold mass and energy drift."""
    return _evolve_schrodinger(psi0, cfg, "cs", None)


# ------------------------------------------------------------- diagnostics

def f_eps_residual(traj: Trajectory, eps: float, t_index: int) -> float:
    """Second-order LL residual at a stored state, ``m_tt`` by centered differences."""
    if traj.equation != "ll":
        raise ValueError("f_eps_residual needs a Landau-Lifshitz trajectory")
    if not 0 < t_index < len(traj.states) - 1:
        raise IndexError(f"t_index must have neighbours on both sides, got {t_index}"
                         f" for {len(traj.states)} states")
    t = traj.times
    h0, h1 = t[t_index] - t[t_index - 1], t[t_index + 1] - t[t_index]
    if abs(h0 - h1) > 1e-9 * max(h0, h1):
        raise ValueError("stored states around t_index are not equally spaced")
    prev, mid, nxt = (traj.states[i].as_array() for i in (t_index - 1, t_index, t_index + 1))
    dtt = (nxt - 2.0 * mid + prev) / h0**2
    return second_order_ll_residual(traj.states[t_index], dtt, eps)


def with_config(cfg: IntegratorConfig, **changes) -> IntegratorConfig:
    return replace(cfg, **changes)


__all__ = [
    "Scheme", "IntegratorConfig", "Trajectory", "IntegratorError", "ValidityBreach",
    "stability_bound", "evolve_ll", "evolve_nls_eps", "evolve_cs", "f_eps_residual",
    "with_config", "check_sphere_constraint", "SphereError",
]
