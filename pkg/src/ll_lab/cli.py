"""Command-line entry point ``ll-lab``.

Exit codes: 0 when the study passes, 2 when it runs but fails its
criterion, 1 on configuration or solver errors.
"""
from __future__ import annotations

import argparse
import json
import logging
import sys
from pathlib import Path

from .experiments import (ConfigError, config_from_dict, default_doc, emit_report,
                          run_simulation, run_study)

log = logging.getLogger("ll_lab")

COMMANDS = {
    "simulate": "simulate",
    "soliton": "soliton",
    "converge": "convergence",
    "soliton-converge": "soliton_convergence",
    "conserve": "conservation",
    "energy": "energy",
}

EXIT_PASS, EXIT_ERROR, EXIT_FAIL = 0, 1, 2


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.replace(",", " ").split()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected a comma-separated list of numbers, got {text!r}")


def _pairs(text: str) -> list[list[float]]:
    out = []
    for item in text.split(";"):
        vals = _floats(item)
        if len(vals) != 2:
            raise argparse.ArgumentTypeError(f"expected 'c,omega' pairs separated by ';', got {item!r}")
        out.append(vals)
    return out


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ll-lab", description=(
        "Landau-Lifshitz / anisotropic NLS / cubic NLS experiments."))
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name in COMMANDS:
        p = sub.add_parser(name)
        p.add_argument("--config", type=Path, help="JSON study config (schema_version 1)")
        p.add_argument("--out", dest="output_dir", help="output directory (default: out)")
        g = p.add_argument_group("grid and integrator")
        g.add_argument("--n", type=int)
        g.add_argument("--length", type=float)
        g.add_argument("--dt", type=float)
        g.add_argument("--t-end", dest="t_end", type=float)
        g.add_argument("--scheme", choices=["IFRK4", "RK4"])
        g.add_argument("--snapshot-stride", dest="snapshot_stride", type=int)
        g.add_argument("--validity-sigma", dest="validity_sigma", type=float)
        g = p.add_argument_group("model")
        g.add_argument("--equation", choices=["ll", "nlse", "cs"])
        g.add_argument("--eps", type=float)
        g.add_argument("--eps-list", dest="eps_list", type=_floats)
        g.add_argument("--k", type=int)
        g = p.add_argument_group("initial data and solitons")
        g.add_argument("--init", choices=["sech", "cs_soliton", "upsilon", "ll_soliton", "uniform",
                                          "zero", "plane_wave", "snapshot"])
        g.add_argument("--amplitude", type=float)
        g.add_argument("--snapshot", help="snapshot file used with --init snapshot")
        g.add_argument("--lam", type=float, help="LL soliton anisotropy")
        g.add_argument("--c", type=float)
        g.add_argument("--omega", type=float)
        g.add_argument("--delta", type=int, choices=[1, -1])
        g.add_argument("--case", choices=["i", "ii"])
        g.add_argument("--solver-lambda", dest="solver_lambda", type=float)
        g.add_argument("--solitons", type=_pairs, help="'c,omega;c,omega' families")
        g.add_argument("--t", type=float, help="evaluation time for soliton-converge")
        g.add_argument("--tolerance", type=float)
        g.add_argument("--write-snapshots", action="store_true",
                       help="simulate: write every stored state as a .field file")
    return parser


def _overrides(args) -> dict:
    keys = ("output_dir", "n", "length", "dt", "t_end", "scheme", "snapshot_stride",
            "validity_sigma", "equation", "eps", "eps_list", "k", "solver_lambda", "solitons",
            "t", "tolerance")
    return {k: getattr(args, k) for k in keys}


def _recipe(args, base: dict) -> dict | None:
    if args.init is None and args.amplitude is None and args.snapshot is None:
        return None
    recipe = dict(base) if args.init in (None, base.get("kind")) else {}
    recipe["kind"] = args.init or base.get("kind", "sech")
    if args.amplitude is not None:
        recipe["amplitude"] = args.amplitude
    if args.snapshot is not None:
        recipe["kind"], recipe["path"] = "snapshot", args.snapshot
    if recipe["kind"] in ("cs_soliton", "upsilon"):
        for key in ("c", "omega"):
            if getattr(args, key) is not None:
                recipe[key] = getattr(args, key)
    return recipe


def _soliton(args, base: dict | None) -> dict | None:
    given = {k: getattr(args, k) for k in ("lam", "c", "omega", "delta", "case")
             if getattr(args, k) is not None}
    if not given or (args.command not in ("soliton",) and "lam" not in given and base is None):
        return base
    out = {**(base or {}), **given}
    if "lam" not in out:
        raise ConfigError("soliton.lam", "--lam is required to describe an LL soliton")
    return out


def resolve_config(args):
    study = COMMANDS[args.command]
    over = _overrides(args)
    if args.config is not None:
        try:
            doc = json.loads(args.config.read_text())
        except json.JSONDecodeError as exc:
            raise ConfigError("", f"invalid JSON in {args.config}: {exc}") from None
        if not isinstance(doc, dict):
            raise ConfigError("", "config must be a JSON object")
        if doc.get("study", study) != study:
            raise ConfigError("study", f"config describes {doc['study']!r}, command wants {study!r}")
    else:
        doc = default_doc(study)
    recipe = _recipe(args, doc.get("initial_data", {"kind": "sech", "amplitude": 2.0}))
    if recipe is not None:
        doc["initial_data"] = recipe
    doc["soliton"] = _soliton(args, doc.get("soliton"))
    if args.command == "simulate" and doc["soliton"] and args.init is None and args.config is None:
        doc["initial_data"] = {"kind": "ll_soliton"}
        if args.equation is None:
            over["equation"] = "ll"
    return config_from_dict(doc, **over)


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        cfg = resolve_config(args)
        out = Path(cfg.output_dir)
        if args.command == "simulate" and args.write_snapshots:
            report = run_simulation(cfg, snapshot_dir=out / "snapshots")
        else:
            report = run_study(cfg)
        if args.command == "soliton":
            (out / "residuals.json").parent.mkdir(parents=True, exist_ok=True)
            (out / "residuals.json").write_text(json.dumps(report.summary, indent=2, default=float) + "\n")
        json_path, csv_path = emit_report(report, out)
        if args.command == "energy":
            print(json.dumps(report.summary, indent=2, default=float))
    except ConfigError as exc:
        print(f"ll-lab: config error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    except (ValueError, RuntimeError, OSError) as exc:
        print(f"ll-lab: error: {exc}", file=sys.stderr)
        return EXIT_ERROR
    status = "PASS" if report.passed else "FAIL"
    print(f"{args.command}: {status} -> {json_path} {csv_path}")
    return EXIT_PASS if report.passed else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
