"""Command-line front end: JSON-configured runs, studies and comparisons.

Subcommands
-----------
run           one simulation; snapshot CSVs, trace CSV, figures, manifest
convergence   error/order ladder against the exact solution
compare       damped vs undamped pair with oscillation metrics
list-problems registered problem names

A run configuration is a single JSON object; any scalar key can be overridden
on the command line with ``--set key=value``.  Exit codes: 0 success,
2 configuration error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys

from . import __version__
from .damping import DampingParams
from .field import ModalSpace
from .flux import FluxConfig
from .harness import (MissingExactSolutionError, compare_damping,
                      run_convergence, run_simulation, snapshot_filename,
                      worker_count, write_run_artifacts, write_solution_csv)
from .problems import get_problem, list_problems
from .timestep import NumericalBlowupError


class ConfigError(ValueError):
    """A run configuration that cannot be executed as written."""


# key -> (default, expected description); None defaults defer to the problem.
_SCHEMA = {
    "problem": (None, "problem name (required)"),
    "k": (2, "polynomial degree"),
    "resolution": (None, "cells: N or [nx, ny]"),
    "resolutions": (None, "list of cell counts (convergence only)"),
    "cfl": (0.1, "requested step-size multiplier"),
    "theta_diff": (1.0, "diffusive flux weight (scalar or [x, y])"),
    "convection_flux": ("llf", '"llf" or "upwind"'),
    "damping": (True, "jump damping on/off"),
    "space_2d": ("Pk", '"Pk" or "Qk"'),
    "snapshot_times": (None, "solution dump times"),
    "output_dir": ("ofldg-out", "artifact directory"),
    "trace_every": (200, "steps between diagnostics samples (0 = off)"),
    "t_end": (None, "final-time override (compare only)"),
    "plots": (True, "render figures alongside the CSV output"),
}


def _parse_override(item: str) -> tuple[str, object]:
    if "=" not in item:
        raise ConfigError(f"override {item!r} is not of the form key=value")
    key, _, raw = item.partition("=")
    key = key.strip()
    try:
        value = json.loads(raw)
    except json.JSONDecodeError:
        value = raw        # bare strings like --set problem=bl
    return key, value


def load_config(path: str, overrides=()) -> dict:
    """Read, override and validate a run configuration."""
    try:
        with open(path) as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config: {exc}")
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}")
    if not isinstance(doc, dict):
        raise ConfigError("config root must be a JSON object")

    for key in doc:
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r}")
    cfg = {key: default for key, (default, _) in _SCHEMA.items()}
    cfg.update(doc)
    for item in overrides:
        key, value = _parse_override(item)
        if key not in _SCHEMA:
            raise ConfigError(f"unknown config key {key!r} (from --set)")
        cfg[key] = value
    _validate(cfg)
    return cfg


def _require(cond: bool, message: str) -> None:
    if not cond:
        raise ConfigError(message)


def _validate(cfg: dict) -> None:
    _require(isinstance(cfg["problem"], str) and cfg["problem"],
             "config key 'problem' is required")
    try:
        problem = get_problem(cfg["problem"])
    except KeyError as exc:
        raise ConfigError(str(exc.args[0]) if exc.args else str(exc))
    _require(isinstance(cfg["k"], int) and not isinstance(cfg["k"], bool)
             and cfg["k"] >= 0, f"'k' must be a nonnegative integer, got {cfg['k']!r}")
    res = cfg["resolution"]
    if res is not None:
        ok = (isinstance(res, int) and res >= 2) or (
            isinstance(res, (list, tuple)) and len(res) == 2
            and all(isinstance(v, int) and v >= 2 for v in res))
        _require(ok, f"'resolution' must be an int >= 2 or a pair, got {res!r}")
        if isinstance(res, (list, tuple)):
            _require(problem.dim == 2, "per-axis resolution needs a 2D problem")
    if cfg["resolutions"] is not None:
        _require(isinstance(cfg["resolutions"], (list, tuple))
                 and len(cfg["resolutions"]) >= 2
                 and all(isinstance(v, int) and v >= 2 for v in cfg["resolutions"]),
                 "'resolutions' must be a list of at least two cell counts")
    _require(isinstance(cfg["cfl"], (int, float)) and cfg["cfl"] > 0,
             f"'cfl' must be positive, got {cfg['cfl']!r}")
    _require(isinstance(cfg["damping"], bool), "'damping' must be true or false")
    _require(isinstance(cfg["plots"], bool), "'plots' must be true or false")
    _require(isinstance(cfg["trace_every"], int) and cfg["trace_every"] >= 0,
             "'trace_every' must be a nonnegative integer")
    if cfg["snapshot_times"] is not None:
        _require(isinstance(cfg["snapshot_times"], (list, tuple))
                 and all(isinstance(v, (int, float)) for v in cfg["snapshot_times"]),
                 "'snapshot_times' must be a list of times")
    if cfg["t_end"] is not None:
        _require(isinstance(cfg["t_end"], (int, float)) and cfg["t_end"] > problem.t_start,
                 f"'t_end' must exceed the start time {problem.t_start}")
    theta = cfg["theta_diff"]
    if isinstance(theta, (list, tuple)):
        _require(len(theta) == 2 and all(isinstance(v, (int, float)) for v in theta),
                 "'theta_diff' pair must hold two numbers")
        cfg["theta_diff"] = tuple(float(v) for v in theta)
    else:
        _require(isinstance(theta, (int, float)),
                 f"'theta_diff' must be a number or pair, got {theta!r}")
    # Combination checks piggyback on the dataclass validators.
    try:
        DampingParams(enabled=cfg["damping"], k=cfg["k"])
        FluxConfig(convection=cfg["convection_flux"], theta_diff=cfg["theta_diff"])
        ModalSpace.parse(cfg["space_2d"])
    except ValueError as exc:
        raise ConfigError(str(exc))
    try:
        worker_count()
    except ValueError as exc:
        raise ConfigError(str(exc))


def _run_options(cfg: dict) -> dict:
    return dict(cfl=cfg["cfl"], damping=cfg["damping"],
                theta_diff=cfg["theta_diff"],
                convection_flux=cfg["convection_flux"],
                space_2d=cfg["space_2d"])


def _manifest_extra(cfg: dict, command: str) -> dict:
    return {"command": command, "config": cfg, "version": __version__,
            "workers": worker_count()}


def cmd_run(cfg: dict) -> int:
    out = run_simulation(cfg["problem"], cfg["k"], cfg["resolution"],
                         snapshot_times=cfg["snapshot_times"],
                         trace_every=cfg["trace_every"], t_end=cfg["t_end"],
                         **_run_options(cfg))
    outdir = cfg["output_dir"]
    extra = _manifest_extra(cfg, "run")
    if out.problem.exact is not None:
        extra["final_errors"] = out.errors()
    figures = []
    if cfg["plots"]:
        from . import plots
        os.makedirs(outdir, exist_ok=True)
        name = out.problem.name
        res = out.metadata["resolution"]
        exact = out.problem.exact if out.problem.dim == 1 else None
        figures.append(plots.plot_solution(
            out.field, os.path.join(outdir, f"{name}_{res}_final.png"),
            title=f"{name}  t={out.integration.t:g}", exact=exact,
            t=out.integration.t))
        if out.problem.dim == 1 and len(out.integration.snapshots) > 1:
            figures.append(plots.plot_snapshots(
                out.integration.snapshots,
                os.path.join(outdir, f"{name}_{res}_snapshots.png"),
                title=name))
        extra["figures"] = [os.path.basename(p) for p in figures]
    written = write_run_artifacts(out, outdir, extra_metadata=extra)
    for path in written + figures:
        print(path)
    return 0


def cmd_convergence(cfg: dict) -> int:
    if cfg["resolutions"] is None:
        raise ConfigError("convergence needs the 'resolutions' key")
    report = run_convergence(cfg["problem"], cfg["k"], cfg["resolutions"],
                             **_run_options(cfg))
    outdir = cfg["output_dir"]
    os.makedirs(outdir, exist_ok=True)
    stem = os.path.join(outdir, f"convergence_{cfg['problem']}_p{cfg['k']}")
    report.metadata.update(_manifest_extra(cfg, "convergence"))
    report.to_csv(stem + ".csv")
    report.to_json(stem + ".json")
    written = [stem + ".csv", stem + ".json"]
    if cfg["plots"]:
        from . import plots
        written.append(plots.plot_convergence(
            report, stem + ".png",
            title=f"{cfg['problem']}  degree {cfg['k']}"))
    for path in written:
        print(path)
    for row in report.rows:
        order = f"{row.order_l2:.3f}" if row.order_l2 is not None else "  -  "
        print(f"  N={row.resolution:>7}  L2={row.l2:.6e}  order {order}")
    return 0


def cmd_compare(cfg: dict) -> int:
    comparison = compare_damping(cfg["problem"], cfg["k"], cfg["resolution"],
                                 t_end=cfg["t_end"], **_run_options(cfg))
    outdir = cfg["output_dir"]
    os.makedirs(outdir, exist_ok=True)
    name = comparison.damped.problem.name
    res = comparison.damped.metadata["resolution"]
    t = comparison.damped.integration.t
    written = []
    for tag, out in (("damped", comparison.damped),
                     ("undamped", comparison.undamped)):
        path = os.path.join(
            outdir, snapshot_filename(name, res, t).replace(".csv", f"_{tag}.csv"))
        write_solution_csv(out.field, path)
        written.append(path)
    metrics = {
        "problem": name, "resolution": res, "t_end": t,
        "damped": vars(comparison.metrics_damped),
        "undamped": vars(comparison.metrics_undamped),
        "run_extremes": {
            "overshoot_damped": comparison.run_overshoot_damped,
            "overshoot_undamped": comparison.run_overshoot_undamped,
            "undershoot_damped": comparison.run_undershoot_damped,
            "undershoot_undamped": comparison.run_undershoot_undamped,
        },
        "metadata": _manifest_extra(cfg, "compare"),
    }
    mpath = os.path.join(outdir, f"{name}_{res}_compare.json")
    with open(mpath, "w") as fh:
        json.dump(metrics, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    written.append(mpath)
    if cfg["plots"]:
        from . import plots
        written.append(plots.plot_comparison(
            comparison, os.path.join(outdir, f"{name}_{res}_compare.png"),
            title=f"{name}  t={t:g}"))
    for path in written:
        print(path)
    return 0


def cmd_list_problems() -> int:
    for name, description in list_problems():
        print(f"{name:16s} {get_problem(name).dim}D  {description}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ofldg",
        description="Oscillation-free local DG solver for degenerate "
                    "convection-diffusion problems")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, help_text in (("run", "execute one simulation"),
                            ("convergence", "error/order ladder"),
                            ("compare", "damped vs undamped pair")):
        s = sub.add_parser(name, help=help_text)
        s.add_argument("config", help="path to a JSON run configuration")
        s.add_argument("--set", action="append", default=[], metavar="KEY=VALUE",
                       dest="overrides", help="override one config key")
    sub.add_parser("list-problems", help="registered problem names")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "list-problems":
            return cmd_list_problems()
        cfg = load_config(args.config, args.overrides)
        handler = {"run": cmd_run, "convergence": cmd_convergence,
                   "compare": cmd_compare}[args.command]
        return handler(cfg)
    except (ConfigError, MissingExactSolutionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericalBlowupError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
