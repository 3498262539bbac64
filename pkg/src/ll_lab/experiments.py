"""Experiment harnesses, study configuration and report emission.

A study is described by one JSON document (``schema_version`` 1).  Every
report carries the fully resolved configuration so a run can be repeated
from its own output.
"""
from __future__ import annotations

import csv
import json
import math
import os
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

import jsonschema
import numpy as np
from scipy.stats import linregress

from . import snapshot
from .dynamics import (IntegratorConfig, IntegratorError, Scheme, evolve_cs, evolve_ll,
                       evolve_nls_eps, stability_bound)
from .energetics import energy_report, k_eps_0
from .equations import AnisotropyParams
from .fields import (DEFAULT_SIGMA, Magnetization, WaveField, magnetization_from_wavefield,
                     wavefield_from_magnetization)
from .solitons import (DECAY_LENGTHS, CsSolitonParams, SolitonParams, appendix_identity_residuals,
                       check_cs, cs_bright_soliton, ll_profile, ll_traveling_wave,
                       soliton_h_norm_error, tw_residual, upsilon_eps)
from .spectral import Grid, l2_norm, make_grid, sech, sobolev_norm

SCHEMA_VERSION = 1
STUDIES = ("convergence", "soliton_convergence", "traveling_wave", "conservation", "simulate",
           "energy", "soliton")

_num = {"type": "number"}
_pos = {"type": "number", "exclusiveMinimum": 0}
_opt_pos = {"type": ["number", "null"], "exclusiveMinimum": 0}

CONFIG_SCHEMA = {
    "$schema": "http://json-schema.org/draft-07/schema#",
    "type": "object",
    "required": ["schema_version", "study"],
    "additionalProperties": False,
    "properties": {
        "schema_version": {"const": SCHEMA_VERSION},
        "study": {"enum": list(STUDIES)},
        "equation": {"enum": ["ll", "nlse", "cs"]},
        "eps": {"type": ["number", "null"], "exclusiveMinimum": 0, "exclusiveMaximum": 1},
        "eps_list": {"type": "array", "minItems": 1,
                     "items": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1}},
        "k": {"type": "integer", "minimum": 3},
        "grid": {
            "type": "object", "additionalProperties": False,
            "properties": {"n": {"type": "integer", "minimum": 8, "multipleOf": 2},
                           "length": _opt_pos},
        },
        "integrator": {
            "type": "object", "additionalProperties": False,
            "properties": {
                "dt": _opt_pos,
                "t_end": _pos,
                "scheme": {"enum": [s.value for s in Scheme]},
                "snapshot_stride": {"type": ["integer", "null"], "minimum": 1},
                "validity_sigma": {"type": "number", "exclusiveMinimum": 0, "exclusiveMaximum": 1},
            },
        },
        "initial_data": {"$ref": "#/definitions/recipe"},
        "initial_data_eps": {"anyOf": [{"type": "null"}, {"$ref": "#/definitions/recipe"}]},
        "soliton": {
            "type": ["object", "null"], "additionalProperties": False,
            "required": ["lam"],
            "properties": {"lam": _pos, "c": _num, "omega": _num,
                           "delta": {"enum": [1, -1]}, "case": {"enum": ["i", "ii"]}},
        },
        "solver_lambda": _opt_pos,
        "solitons": {"type": "array", "minItems": 1,
                     "items": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2}},
        "t": _num,
        "slope_band": {"type": "array", "items": _num, "minItems": 2, "maxItems": 2},
        "tolerance": _opt_pos,
        "horizon_A": _pos,
        "enforce_horizon": {"type": "boolean"},
        "output_dir": {"type": "string"},
    },
    "definitions": {
        "recipe": {
            "type": "object", "required": ["kind"],
            "properties": {
                "kind": {"enum": ["sech", "cs_soliton", "upsilon", "ll_soliton", "uniform",
                                  "zero", "plane_wave", "snapshot"]},
                "amplitude": _num, "width": _pos, "c": _num, "omega": _num, "eps": _pos,
                "lam": _pos, "delta": {"enum": [1, -1]}, "case": {"enum": ["i", "ii"]},
                "mode": {"type": "integer"}, "path": {"type": "string"},
                "direction": {"type": "array", "items": _num, "minItems": 3, "maxItems": 3},
            },
            "additionalProperties": False,
        },
    },
}


class ConfigError(ValueError):
    """Schema violation; ``path`` names the offending field."""

    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path


@dataclass(frozen=True)
class StudyConfig:
    study: str
    eps_list: tuple = (0.1, 0.05, 0.025, 0.0125)
    k: int = 3
    n: int = 512
    length: float | None = None
    dt: float | None = None
    t_end: float = 0.5
    scheme: str = "IFRK4"
    snapshot_stride: int | None = None
    validity_sigma: float = DEFAULT_SIGMA
    equation: str = "nlse"
    eps: float | None = None
    initial_data: dict = field(default_factory=lambda: {"kind": "sech", "amplitude": 2.0})
    initial_data_eps: dict | None = None
    soliton: dict | None = None
    solver_lambda: float | None = None
    solitons: tuple = ((0.0, 1.0), (1.0, 1.0))
    t: float = 0.0
    slope_band: tuple = (0.85, 1.15)
    tolerance: float | None = None
    horizon_A: float = 1.0
    enforce_horizon: bool = False
    output_dir: str = "out"

    def to_dict(self) -> dict:
        """Nested JSON form accepted by :func:`config_from_dict`."""
        flat = asdict(self)
        out = {"schema_version": SCHEMA_VERSION, "study": flat.pop("study"),
               "grid": {"n": flat.pop("n"), "length": flat.pop("length")},
               "integrator": {k: flat.pop(k) for k in _INTEGRATOR_KEYS}}
        flat["eps_list"] = list(flat["eps_list"])
        flat["solitons"] = [list(s) for s in flat["solitons"]]
        flat["slope_band"] = list(flat["slope_band"])
        out.update(flat)
        return out


_INTEGRATOR_KEYS = ("dt", "t_end", "scheme", "snapshot_stride", "validity_sigma")


def _path(error) -> str:
    return ".".join(str(p) for p in error.absolute_path)


def config_from_dict(doc: dict, **overrides) -> StudyConfig:
    """Validate *doc* against the schema and apply flat *overrides* (``None`` ignored)."""
    validator = jsonschema.Draft7Validator(CONFIG_SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        e = errors[0]
        raise ConfigError(_path(e), e.message)
    flat = {k: v for k, v in doc.items() if k not in ("schema_version", "grid", "integrator")}
    flat.update(doc.get("grid", {}))
    flat.update(doc.get("integrator", {}))
    flat.update({k: v for k, v in overrides.items() if v is not None})
    known = {f.name for f in fields(StudyConfig)}
    unknown = set(flat) - known
    if unknown:
        raise ConfigError(sorted(unknown)[0], "unknown override")
    for key in ("eps_list", "slope_band"):
        if key in flat:
            flat[key] = tuple(float(v) for v in flat[key])
    if "solitons" in flat:
        flat["solitons"] = tuple(tuple(float(v) for v in s) for s in flat["solitons"])
    cfg = StudyConfig(**flat)
    _check_semantics(cfg)
    return cfg


def _check_semantics(cfg: StudyConfig):
    eps = cfg.eps_list
    if any(not 0 < e < 1 for e in eps):
        raise ConfigError("eps_list", "entries must lie in (0, 1)")
    if any(b >= a for a, b in zip(eps, eps[1:])):
        raise ConfigError("eps_list", f"must be strictly decreasing, got {list(eps)}")
    if cfg.k < 3:
        raise ConfigError("k", f"must be >= 3, got {cfg.k}")
    if cfg.n < 8 or cfg.n % 2:
        raise ConfigError("grid.n", f"must be an even integer >= 8, got {cfg.n}")
    lo, hi = cfg.slope_band
    if not lo < hi:
        raise ConfigError("slope_band", f"lower end must be below upper end, got {[lo, hi]}")
    if cfg.eps is not None and not 0 < cfg.eps < 1:
        raise ConfigError("eps", f"must lie in (0, 1), got {cfg.eps}")
    if cfg.study in ("traveling_wave", "soliton") and cfg.soliton is None:
        raise ConfigError("soliton", f"required for study {cfg.study!r}")


def parse_config(path, **overrides) -> StudyConfig:
    """Read a JSON study config from *path*."""
    try:
        doc = json.loads(Path(path).read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from None
    return config_from_dict(doc, **overrides)


def default_doc(study: str) -> dict:
    """Minimal config document for *study* with study-specific defaults."""
    base = {"schema_version": SCHEMA_VERSION, "study": study}
    if study == "soliton_convergence":
        base["eps_list"] = [1e-2, 1e-3, 1e-4]
        base["grid"] = {"n": 2048}
    elif study == "traveling_wave":
        base["integrator"] = {"t_end": 0.5}
    return base


def default_config(study: str, **overrides) -> StudyConfig:
    return config_from_dict(default_doc(study), **overrides)


# ----------------------------------------------------------------- reports

@dataclass
class Report:
    study: str
    rows: list
    summary: dict
    passed: bool
    config: dict

    def to_dict(self) -> dict:
        return {"study": self.study, "passed": self.passed, "summary": self.summary,
                "rows": self.rows, "config": self.config}

    @classmethod
    def from_dict(cls, doc: dict) -> "Report":
        kind = ConvergenceReport if "fitted_slope" in doc.get("summary", {}) else Report
        return kind(doc["study"], doc["rows"], doc["summary"], doc["passed"], doc["config"])


class ConvergenceReport(Report):
    """Rows ``(eps, error, norm_kind, runtime, ...)``, sorted by decreasing eps."""

    @property
    def fitted_slope(self) -> float:
        return self.summary["fitted_slope"]

    @property
    def slope_stderr(self) -> float:
        return self.summary["slope_stderr"]

    @property
    def errors(self) -> list:
        return [r["error"] for r in self.rows]


def _clean(value):
    if isinstance(value, dict):
        return {str(k): _clean(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_clean(v) for v in value]
    if isinstance(value, (np.floating, np.integer, np.bool_)):
        return value.item()
    return value


def emit_report(report: Report, directory) -> tuple[Path, Path]:
    """Write ``report.json`` (summary and config) and ``rows.csv``."""
    out = Path(directory)
    out.mkdir(parents=True, exist_ok=True)
    doc = _clean(report.to_dict())
    json_path = out / "report.json"
    json_path.write_text(json.dumps(doc, indent=2, sort_keys=True) + "\n")
    csv_path = out / "rows.csv"
    columns = []
    for row in doc["rows"]:
        columns += [k for k in row if k not in columns]
    with csv_path.open("w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=columns)
        writer.writeheader()
        writer.writerows(doc["rows"])
    return json_path, csv_path


def load_report(path) -> Report:
    path = Path(path)
    if path.is_dir():
        path = path / "report.json"
    return Report.from_dict(json.loads(path.read_text()))


def fit_slope(eps, errors) -> tuple[float, float]:
    """Least-squares slope of ``log error`` against ``log eps`` and its standard error."""
    if len(eps) < 2:
        raise ValueError("cannot fit a slope from fewer than two eps values")
    if any(e <= 0 for e in errors):
        raise ValueError("cannot fit a log-log slope through a zero error")
    if len(eps) == 2:
        slope = math.log(errors[1] / errors[0]) / math.log(eps[1] / eps[0])
        return slope, 0.0
    fit = linregress(np.log(eps), np.log(errors))
    return float(fit.slope), float(fit.stderr)


# ------------------------------------------------------------ initial data

def _recipe_rate(recipe: dict) -> float:
    kind = recipe["kind"]
    if kind == "sech":
        return 1.0 / recipe.get("width", 1.0)
    if kind in ("cs_soliton", "upsilon"):
        c, omega = recipe.get("c", 0.0), recipe.get("omega", 1.0)
        check_cs(c, omega)
        return math.sqrt(omega - 0.25 * c * c)
    if kind == "ll_soliton":
        return _soliton_params(recipe).decay_rate
    return 1.0


def grid_for(cfg: StudyConfig, recipe: dict | None = None) -> Grid:
    recipe = recipe or cfg.initial_data
    length = cfg.length or 2.0 * DECAY_LENGTHS / _recipe_rate(recipe)
    return make_grid(cfg.n, length)


def _soliton_params(d: dict) -> SolitonParams:
    return SolitonParams(d["lam"], d.get("c", 0.0), d.get("omega", 0.0), d.get("delta", 1),
                         d.get("case", "ii"))


def build_initial_data(recipe: dict, grid: Grid, eps: float | None = None):
    """Construct a field from a recipe; snapshot recipes bring their own grid."""
    kind = recipe["kind"]
    x = grid.nodes
    if kind == "sech":
        values = recipe.get("amplitude", 2.0) * sech(x / recipe.get("width", 1.0))
        return WaveField(grid, values.astype(complex))
    if kind == "cs_soliton":
        return cs_bright_soliton(recipe.get("c", 0.0), recipe.get("omega", 1.0), 0.0, grid)
    if kind == "upsilon":
        e = recipe.get("eps", eps)
        if e is None:
            raise ConfigError("initial_data.eps", "upsilon data need an eps")
        return upsilon_eps(recipe.get("c", 0.0), recipe.get("omega", 1.0), e, 0.0, grid)
    if kind == "ll_soliton":
        return ll_traveling_wave(_soliton_params(recipe), 0.0, grid)
    if kind == "uniform":
        return Magnetization.uniform(grid, recipe.get("direction", (0.0, 1.0, 0.0)))
    if kind == "zero":
        return WaveField.zeros(grid)
    if kind == "plane_wave":
        kappa = 2.0 * math.pi * recipe.get("mode", 1) / grid.length
        return WaveField(grid, recipe.get("amplitude", 1.0) * np.exp(1j * kappa * x))
    if kind == "snapshot":
        data = snapshot.load(recipe["path"])
        if isinstance(data, tuple):
            raise ConfigError("initial_data.path", "REAL snapshots cannot seed an evolution")
        return data
    raise ConfigError("initial_data.kind", f"unknown recipe {kind!r}")


def _initial(cfg: StudyConfig, recipe=None, eps=None):
    recipe = recipe or cfg.initial_data
    grid = grid_for(cfg, recipe)
    return build_initial_data(recipe, grid, eps)


# -------------------------------------------------------------- workers

def worker_count(jobs: int) -> int:
    cap = os.environ.get("LL_LAB_THREADS")
    limit = os.cpu_count() or 1
    if cap:
        try:
            limit = max(1, int(cap))
        except ValueError:
            raise ConfigError("LL_LAB_THREADS", f"must be a positive integer, got {cap!r}") from None
    return max(1, min(jobs, limit))


def _map(fn, jobs):
    jobs = list(jobs)
    workers = worker_count(len(jobs))
    if workers == 1:
        return [fn(j) for j in jobs]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, jobs))


def _integrator(cfg: StudyConfig, dt: float, **kw) -> IntegratorConfig:
    return IntegratorConfig(dt=dt, t_end=cfg.t_end, scheme=cfg.scheme,
                            snapshot_stride=cfg.snapshot_stride or 10**9,
                            validity_sigma=cfg.validity_sigma, **kw)


# -------------------------------------------------------- convergence study

def _nlse_job(args):
    psi0, eps, icfg, reference, s = args
    start = time.perf_counter()
    try:
        traj = evolve_nls_eps(psi0, eps, icfg)
    except IntegratorError as exc:
        raise IntegratorError(f"eps = {eps}: {exc}", report={**exc.report, "eps": eps}) from None
    except ValueError as exc:
        raise ValueError(f"eps = {eps}: {exc}") from None
    err = sobolev_norm(psi0.grid, traj.final.psi - reference, s)
    return {"error": err, "runtime": time.perf_counter() - start,
            "energy_drift": traj.max_relative_drift("energy_drift"),
            "max_margin": float(np.max(traj.diagnostics["margin"]))}


def study_dt(cfg: StudyConfig, psi0: WaveField, eps_list) -> float:
    """Common time step: the configured one, else half the tightest stability bound."""
    if cfg.dt is not None:
        return cfg.dt
    amp = float(np.max(np.abs(psi0.psi)))
    bound = min(stability_bound("nlse", psi0.grid, cfg.scheme, amplitude=amp, eps=e) for e in eps_list)
    bound = min(bound, stability_bound("cs", psi0.grid, cfg.scheme, amplitude=amp))
    return min(0.5 * bound, 0.01)


def run_convergence_study(cfg: StudyConfig) -> ConvergenceReport:
    """Error between anisotropic and cubic NLS at ``t_end`` across ``eps_list``."""
    eps_list = list(cfg.eps_list)
    if len(eps_list) < 2:
        raise ValueError("cannot fit slope: eps_list needs at least two entries")
    psi0 = _initial(cfg)
    if not isinstance(psi0, WaveField):
        raise ConfigError("initial_data", "the convergence study needs wavefield initial data")
    grid = psi0.grid
    psi_eps0 = psi0
    if cfg.initial_data_eps is not None:
        psi_eps0 = build_initial_data(cfg.initial_data_eps, grid)
        if not isinstance(psi_eps0, WaveField) or psi_eps0.grid != grid:
            raise ConfigError("initial_data_eps", "must be a wavefield on the study grid")
    s = cfg.k - 2
    dt = study_dt(cfg, psi0 if psi_eps0 is psi0 else psi_eps0, eps_list)
    icfg = _integrator(cfg, dt, energy_drift_limit=1e-3)
    start = time.perf_counter()
    reference = evolve_cs(psi0, icfg).final.psi
    cs_runtime = time.perf_counter() - start
    results = _map(_nlse_job, [(psi_eps0, e, icfg, reference, s) for e in eps_list])
    delta0 = sobolev_norm(grid, psi_eps0.psi - psi0.psi, s)
    rows = []
    for e, res in zip(eps_list, results):
        rep = k_eps_0(psi0, psi_eps0, e, cfg.k, cfg.horizon_A)
        rows.append({"eps": e, "error": res["error"], "norm_kind": f"H^{s}",
                     "runtime": res["runtime"], "error_over_eps": res["error"] / e,
                     "energy_drift": res["energy_drift"], "max_margin": res["max_margin"],
                     "k_eps_0": rep.k_eps_0, "horizon": rep.t_eps_lower,
                     "condition_lhs": rep.condition_lhs})
    slope, stderr = fit_slope(eps_list, [r["error"] for r in rows])
    lo, hi = cfg.slope_band
    horizon = min(r["horizon"] for r in rows)
    horizon_exceeded = cfg.t_end > horizon
    local = (math.log(rows[-1]["error"] / rows[-2]["error"])
             / math.log(eps_list[-1] / eps_list[-2]))
    floor = delta0 > 0 and local < 0.5
    passed = lo <= slope <= hi and not (cfg.enforce_horizon and horizon_exceeded)
    summary = {"fitted_slope": slope, "slope_stderr": stderr, "slope_band": [lo, hi],
               "dt": icfg.step, "steps": icfg.steps, "n": grid.n, "length": grid.length,
               "cs_runtime": cs_runtime, "horizon_A": cfg.horizon_A, "horizon": horizon,
               "horizon_exceeded": horizon_exceeded, "initial_offset": delta0,
               "last_local_slope": local, "floor_detected": floor}
    return ConvergenceReport("convergence", rows, summary, bool(passed), cfg.to_dict())


# ------------------------------------------------------ soliton convergence

def run_soliton_convergence(c: float, omega: float, eps_list, k: int = 3, *, n: int = 2048,
                            t: float = 0.0, tolerance: float = 0.05,
                            config: dict | None = None) -> ConvergenceReport:
    """Closed-form distance between the scaled LL soliton and the CS soliton.

    No time stepping is involved, so the report is bit-stable.
    """
    check_cs(c, omega)
    if c < 0:
        raise ValueError(f"c must be non-negative, got {c}")
    eps_list = [float(e) for e in eps_list]
    bad = [e for e in eps_list if not 0 < e < 1.0 / omega]
    if bad:
        raise ValueError(f"every eps must lie in (0, 1/omega) = (0, {1.0 / omega:g}), got {bad}")
    rate = CsSolitonParams(c, omega).decay_rate
    grid = make_grid(n, 2.0 * DECAY_LENGTHS / rate)
    rows = []
    w_norm = None
    for e in eps_list:
        start = time.perf_counter()
        err, w_norm = soliton_h_norm_error(c, omega, e, k, grid, t)
        rows.append({"eps": e, "error": err, "norm_kind": f"H^{k}",
                     "runtime": time.perf_counter() - start, "error_over_eps": err / e,
                     "w_norm": w_norm, "relative_deviation": err / e / w_norm - 1.0})
    rows.sort(key=lambda r: -r["eps"])
    devs = [abs(r["relative_deviation"]) for r in rows]
    monotone = all(b <= a for a, b in zip(devs, devs[1:]))
    slope, stderr = fit_slope([r["eps"] for r in rows], [r["error"] for r in rows]) \
        if len(rows) > 1 else (math.nan, math.nan)
    passed = devs[-1] < tolerance and monotone
    summary = {"fitted_slope": slope, "slope_stderr": stderr, "w_norm": w_norm, "c": c,
               "omega": omega, "k": k, "t": t, "n": n, "length": grid.length,
               "monotone": monotone, "final_deviation": devs[-1], "tolerance": tolerance}
    return ConvergenceReport("soliton_convergence", rows, summary, bool(passed), config or {})


def run_soliton_convergence_study(cfg: StudyConfig) -> Report:
    """Every ``(c, omega)`` pair of *cfg*; passes when all pass."""
    tol = cfg.tolerance or 0.05
    parts = [run_soliton_convergence(c, w, cfg.eps_list, cfg.k, n=cfg.n, t=cfg.t, tolerance=tol)
             for c, w in cfg.solitons]
    rows = [{"c": p.summary["c"], "omega": p.summary["omega"], **r} for p in parts for r in p.rows]
    summary = {"families": [{"c": p.summary["c"], "omega": p.summary["omega"], "passed": p.passed,
                             "w_norm": p.summary["w_norm"], "fitted_slope": p.fitted_slope,
                             "final_deviation": p.summary["final_deviation"],
                             "monotone": p.summary["monotone"]} for p in parts]}
    return Report("soliton_convergence", rows, summary, all(p.passed for p in parts), cfg.to_dict())


# ----------------------------------------------------- traveling-wave suite

def run_traveling_wave_suite(p: SolitonParams, t_end: float, *, n: int = 512,
                             dt: float | None = None, solver_lambda: float | None = None,
                             tolerance: float = 1e-5, config: dict | None = None) -> Report:
    """Evolve a Landau-Lifshitz soliton and compare with the exact traveling wave.

    *solver_lambda* replaces the anisotropy used by the solver (the profile
    keeps ``p.lam``); a mismatch should be detected as a large deviation.
    """
    center_span = abs(p.c) * t_end
    rate = p.decay_rate
    length = 2.0 * (DECAY_LENGTHS / rate + center_span)
    grid = make_grid(n, length)
    m0 = ll_traveling_wave(p, 0.0, grid)
    lam = p.lam if solver_lambda is None else solver_lambda
    a = AnisotropyParams.uniaxial(lam)
    if dt is None:
        dt = 0.5 * stability_bound("ll", grid, Scheme.RK4, anisotropy=a)
    icfg = IntegratorConfig(dt=dt, t_end=t_end, scheme=Scheme.RK4, snapshot_stride=10**9,
                            energy_drift_limit=1e-3)
    start = time.perf_counter()
    traj = evolve_ll(m0, a, icfg)
    exact = ll_traveling_wave(p, t_end, grid).as_array()
    got = traj.final.as_array()
    deviation = math.sqrt(sum(l2_norm(grid, got[i] - exact[i]) ** 2 for i in range(3)))
    row = {"t": t_end, "deviation": deviation, "energy_drift": traj.max_relative_drift("energy_drift"),
           "norm_drift": traj.max_relative_drift("norm_drift"), "runtime": time.perf_counter() - start}
    summary = {**asdict(p), "solver_lambda": lam, "n": n, "length": length, "dt": icfg.step,
               "steps": icfg.steps, "deviation": deviation, "tolerance": tolerance,
               "energy_drift": row["energy_drift"]}
    return Report("traveling_wave", [row], summary, bool(deviation < tolerance), config or {})


# -------------------------------------------------------- conservation suite

DRIFT_BUDGETS = {"ll": {"energy_drift": 1e-3}, "nlse": {"energy_drift": 1e-6},
                 "cs": {"mass_drift": 1e-8, "energy_drift": 1e-6}}


def _evolve(cfg: StudyConfig, field0, dt=None, drift_limit=math.inf):
    """Run the configured equation from *field0*; returns ``(trajectory, config)``."""
    eq = cfg.equation
    grid = field0.grid
    if eq == "ll":
        eps = cfg.eps
        if isinstance(field0, WaveField):
            if eps is None:
                raise ConfigError("eps", "mapping wavefield data to LL needs eps")
            field0 = magnetization_from_wavefield(field0, eps, 0.0, cfg.validity_sigma)
        if cfg.soliton is not None:
            a = AnisotropyParams.uniaxial(cfg.solver_lambda or cfg.soliton["lam"])
        elif eps is not None:
            a = AnisotropyParams.from_eps(eps)
        else:
            a = AnisotropyParams.uniaxial(cfg.solver_lambda or 1.0)
        if dt is None:
            dt = cfg.dt or 0.5 * stability_bound("ll", grid, Scheme.RK4, anisotropy=a)
        icfg = _integrator(cfg, dt, energy_drift_limit=drift_limit)
        return evolve_ll(field0, a, icfg), icfg
    if isinstance(field0, Magnetization):
        if eq != "nlse" or cfg.eps is None:
            raise ConfigError("initial_data", f"equation {eq!r} needs wavefield initial data"
                              " (magnetizations map only to the anisotropic NLS, with eps)")
        field0 = wavefield_from_magnetization(field0, cfg.eps, 0.0)
    amp = float(np.max(np.abs(field0.psi)))
    if eq == "nlse":
        if cfg.eps is None:
            raise ConfigError("eps", "the anisotropic NLS equation needs eps")
        if dt is None:
            dt = cfg.dt or min(0.01, 0.5 * stability_bound("nlse", grid, cfg.scheme, amplitude=amp,
                                                          eps=cfg.eps))
        icfg = _integrator(cfg, dt, energy_drift_limit=drift_limit)
        return evolve_nls_eps(field0, cfg.eps, icfg), icfg
    if dt is None:
        dt = cfg.dt or min(0.01, 0.5 * stability_bound("cs", grid, cfg.scheme, amplitude=amp))
    icfg = _integrator(cfg, dt, energy_drift_limit=drift_limit)
    return evolve_cs(field0, icfg), icfg


def _initial_for(cfg: StudyConfig):
    recipe = dict(cfg.initial_data)
    if cfg.soliton is not None and recipe.get("kind") == "ll_soliton":
        recipe = {**cfg.soliton, **recipe}
    return _initial(cfg, recipe, cfg.eps)


def run_conservation_suite(cfg: StudyConfig) -> Report:
    """Maximum relative invariant drifts of one run; reports rather than aborts."""
    field0 = _initial_for(cfg)
    budgets = DRIFT_BUDGETS[cfg.equation]
    aborted = None
    try:
        traj, icfg = _evolve(cfg, field0)
    except IntegratorError as exc:
        traj, aborted = exc.trajectory, str(exc)
        icfg = None
    drifts = {k: traj.max_relative_drift(k) if traj is not None else math.nan for k in budgets}
    rows = [{"quantity": k.removesuffix("_drift"), "max_relative_drift": v, "budget": budgets[k],
             "within_budget": bool(v < budgets[k])} for k, v in drifts.items()]
    passed = aborted is None and all(r["within_budget"] for r in rows)
    summary = {"equation": cfg.equation, "eps": cfg.eps, "t_end": cfg.t_end,
               "dt": icfg.step if icfg else None, "aborted": aborted, **drifts}
    return Report("conservation", rows, summary, bool(passed), cfg.to_dict())


# ---------------------------------------------------------------- simulate

def run_simulation(cfg: StudyConfig, snapshot_dir=None) -> Report:
    """One trajectory with per-step diagnostics; optional snapshot files."""
    field0 = _initial_for(cfg)
    aborted = None
    try:
        traj, icfg = _evolve(cfg, field0, drift_limit=1e-3)
    except IntegratorError as exc:
        traj, icfg, aborted = exc.trajectory, None, f"{exc}"
    diag = traj.diagnostics if traj is not None else {}
    columns = list(diag)
    rows = [{c: float(diag[c][j]) for c in columns} for j in range(len(diag.get("t", [])))]
    written = []
    if snapshot_dir is not None and traj is not None:
        out = Path(snapshot_dir)
        out.mkdir(parents=True, exist_ok=True)
        for i, (t, state) in enumerate(zip(traj.times, traj.states)):
            path = out / f"state_{i:05d}.field"
            snapshot.save(path, state)
            written.append({"t": float(t), "file": path.name})
    summary = {"equation": cfg.equation, "eps": cfg.eps, "steps": len(rows),
               "dt": icfg.step if icfg else None, "aborted": aborted, "snapshots": written,
               **{f"max_abs_{c}": float(np.max(np.abs(diag[c]))) for c in columns
                  if c.endswith("_drift") and len(diag[c])}}
    return Report("simulate", rows, summary, aborted is None, cfg.to_dict())


def run_energy(cfg: StudyConfig) -> Report:
    field0 = _initial_for(cfg)
    a = AnisotropyParams.uniaxial(cfg.soliton["lam"]) if cfg.soliton else None
    rep = energy_report(field0, eps=cfg.eps, anisotropy=a)
    doc = rep.to_dict()
    rows = [{"quantity": k, "value": v} for k, v in doc.items() if not isinstance(v, dict) and v is not None]
    for key in ("e_ll_k", "frak_e_k"):
        for order, v in (doc[key] or {}).items():
            rows.append({"quantity": f"{key}[{order}]", "value": v})
    return Report("energy", rows, doc, True, cfg.to_dict())


def run_soliton_check(cfg: StudyConfig) -> tuple[Report, Magnetization]:
    """Profile of a Landau-Lifshitz soliton with its residual diagnostics."""
    p = _soliton_params(cfg.soliton)
    grid = make_grid(cfg.n, cfg.length or 2.0 * p.required_half_width)
    profile = ll_profile(p, grid)
    res = tw_residual(profile, p)
    ident = appendix_identity_residuals(profile, p)
    tol = cfg.tolerance or 1e-8
    summary = {**asdict(p), "n": grid.n, "length": grid.length,
               "tw_residual": list(res), "identities": asdict(ident),
               "sphere_defect": float(np.max(np.abs(profile.m1**2 + profile.m2**2 + profile.m3**2 - 1)))}
    passed = max(res) < tol and ident.max() < tol
    rows = [{"x": float(x), "m1": float(a), "m2": float(b), "m3": float(c)}
            for x, a, b, c in zip(grid.nodes, profile.m1, profile.m2, profile.m3)]
    return Report("soliton", rows, summary, bool(passed), cfg.to_dict()), profile


def run_study(cfg: StudyConfig) -> Report:
    """Dispatch on ``cfg.study``."""
    if cfg.study == "convergence":
        return run_convergence_study(cfg)
    if cfg.study == "soliton_convergence":
        return run_soliton_convergence_study(cfg)
    if cfg.study == "traveling_wave":
        rep = run_traveling_wave_suite(_soliton_params(cfg.soliton), cfg.t_end, n=cfg.n, dt=cfg.dt,
                                       solver_lambda=cfg.solver_lambda,
                                       tolerance=cfg.tolerance or 1e-5)
        rep.config = cfg.to_dict()
        return rep
    if cfg.study == "conservation":
        return run_conservation_suite(cfg)
    if cfg.study == "simulate":
        return run_simulation(cfg)
    if cfg.study == "energy":
        return run_energy(cfg)
    if cfg.study == "soliton":
        return run_soliton_check(cfg)[0]
    raise ConfigError("study", f"unknown study {cfg.study!r}")


__all__ = [
    "SCHEMA_VERSION", "CONFIG_SCHEMA", "ConfigError", "StudyConfig", "config_from_dict",
    "parse_config", "default_config", "Report", "ConvergenceReport", "emit_report", "load_report",
    "fit_slope", "build_initial_data", "grid_for", "worker_count", "run_convergence_study",
    "run_soliton_convergence", "run_soliton_convergence_study", "run_traveling_wave_suite",
    "run_conservation_suite", "run_simulation", "run_energy", "run_soliton_check", "run_study",
    "DRIFT_BUDGETS",
]
