"""Run orchestration: single simulations, convergence ladders, comparisons.

This module glues the solver together for the reproduction studies: it
projects initial data, derives step-size coefficient bounds from the data's
value range, integrates, measures errors against exact or fine-grid reference
solutions, and serializes everything to CSV/JSON with full precision.
"""

from __future__ import annotations

import csv
import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from math import log
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .basis import gauss_rule, legendre_orthonormal
from .damping import DampingParams
from .field import DGField1D, DGField2D, ModalSpace
from .flux import FluxConfig
from .geometry import build_uniform_1d, build_uniform_2d
from .problems import ProblemSpec, get_problem
from .semidiscrete import SchemeState1D, SchemeState2D
from .timestep import IntegrationResult, StepControl, integrate

CSV_FMT = "%.17g"


class MissingExactSolutionError(ValueError):
    """Raised when a convergence study needs an exact solution and has none."""

    def __init__(self, problem_name: str):
        super().__init__(
            f"problem {problem_name!r} has no exact solution; use a "
            f"self-convergence study instead")


def worker_count() -> int:
    """Effective parallel width; OFLDG_THREADS caps it, 0 or unset = auto."""
    raw = os.environ.get("OFLDG_THREADS", "0")
    try:
        n = int(raw)
    except ValueError:
        raise ValueError(f"OFLDG_THREADS must be an integer, got {raw!r}")
    if n < 0:
        raise ValueError(f"OFLDG_THREADS must be >= 0, got {n}")
    if n == 0:
        return min(os.cpu_count() or 1, 8)
    return n


def _resolve(problem: Union[str, ProblemSpec]) -> ProblemSpec:
    return get_problem(problem) if isinstance(problem, str) else problem


def initial_range(problem: ProblemSpec, n_samples: int = 2001) -> tuple[float, float]:
    """(min, max) of the initial data sampled densely over the domain."""
    if problem.dim == 1:
        a, b = problem.domain
        u0 = np.asarray(problem.initial(np.linspace(a, b, n_samples)), float)
    else:
        ax, bx, ay, by = problem.domain
        m = int(np.ceil(np.sqrt(n_samples)))
        x = np.linspace(ax, bx, m)
        y = np.linspace(ay, by, m)
        u0 = np.asarray(problem.initial(x[:, None], y[None, :]), float)
        u0 = np.broadcast_to(u0, (m, m))
    return float(u0.min()), float(u0.max())


def coefficient_bounds(problem: ProblemSpec, n_samples: int = 2001):
    """Step-size coefficient bounds from the initial data's value range.

    The range is widened by 10% (5% of the span on each side) and the
    diffusion coefficient / convective speed are maximized over 2001 samples
    of it.  Returns (b_bound, c_bound); in 2D both are (x, y) pairs.
    """
    lo, hi = initial_range(problem, n_samples)
    pad = 0.05 * ((hi - lo) or max(1.0, abs(hi)))
    u = np.linspace(lo - pad, hi + pad, n_samples)

    def bounds_for(a_fn, df_fn):
        b = float(np.max(np.asarray(a_fn(u), float)))
        c = float(np.max(np.abs(np.asarray(df_fn(u), float)))) \
            if problem.has_convection else 0.0
        return b, c

    bx, cx = bounds_for(problem.a1, problem.df1)
    if problem.dim == 1:
        return bx, cx
    by, cy = bounds_for(problem.a2, problem.df2)
    return (bx, by), (cx, cy)


@dataclass
class RunResult:
    """One finished simulation plus everything needed to report on it."""

    problem: ProblemSpec
    field: Union[DGField1D, DGField2D]
    integration: IntegrationResult
    metadata: dict
    initial_low: float
    initial_high: float

    def errors(self) -> dict:
        """L1/L2/Linf errors against the exact solution at the final time."""
        if self.problem.exact is None:
            raise MissingExactSolutionError(self.problem.name)
        t = self.integration.t
        if self.problem.dim == 1:
            return self.field.norms(lambda x: self.problem.exact(x, t),
                                    window=self.problem.error_window)
        return self.field.norms(lambda x, y: self.problem.exact(x, y, t))


def run_simulation(problem: Union[str, ProblemSpec], k: int = 2,
                   resolution=None, *, cfl: float = 0.1,
                   damping: bool = True, theta_diff=1.0,
                   convection_flux: str = "llf", space_2d="Pk",
                   snapshot_times: Optional[Sequence[float]] = None,
                   trace_every: int = 0,
                   t_end: Optional[float] = None) -> RunResult:
    """Project, integrate to the final time, return the result.

    ``t_end`` overrides the problem's registered final time (useful for
    short exploratory runs).  The step size uses the requested ``cfl``
    capped at the degree-``k`` linear stability limit (see
    :func:`ofldg.timestep.stable_cfl`); both the requested and the
    effective value land in the metadata.
    """
    prob = _resolve(problem)
    if t_end is not None:
        prob = replace(prob, t_end=float(t_end))
    if resolution is None:
        resolution = prob.default_resolution
    b_bound, c_bound = coefficient_bounds(prob)
    lo, hi = initial_range(prob)
    ctrl = StepControl.stable_for(k, b_bound=b_bound, c_bound=c_bound,
                                  t_end=prob.t_end, cfl=cfl)
    flux_cfg = FluxConfig(convection=convection_flux, c_bound=c_bound,
                          theta_diff=theta_diff)
    damp = DampingParams(enabled=damping, k=k)
    if snapshot_times is None:
        snapshot_times = prob.snapshot_times

    t0 = time.perf_counter()
    if prob.dim == 1:
        n = int(resolution)
        mesh = build_uniform_1d(prob.domain[0], prob.domain[1], n)
        u0 = DGField1D.l2_project(prob.initial, mesh, k)
        state = SchemeState1D(u=u0, problem=prob, flux=flux_cfg, damping=damp)
        res_label = str(n)
    else:
        nx, ny = (resolution, resolution) if np.isscalar(resolution) \
            else (int(resolution[0]), int(resolution[1]))
        mesh = build_uniform_2d(*prob.domain, int(nx), int(ny))
        u0 = DGField2D.l2_project(prob.initial, mesh, k,
                                  space=ModalSpace.parse(space_2d))
        state = SchemeState2D(u=u0, problem=prob, flux=flux_cfg, damping=damp)
        res_label = f"{nx}x{ny}"
    result = integrate(state, ctrl, snapshot_times=snapshot_times,
                       trace_every=trace_every)
    runtime = time.perf_counter() - t0

    meta = {
        "problem": prob.name, "k": k, "resolution": res_label,
        "cfl_requested": cfl, "cfl_effective": ctrl.cfl, "dt": result.dt,
        "n_steps": result.n_steps, "t_start": prob.t_start,
        "t_end": result.t, "damping": damping,
        "convection_flux": convection_flux, "theta_diff": theta_diff,
        "b_bound": b_bound, "c_bound": c_bound,
        "space_2d": str(space_2d) if prob.dim == 2 else None,
        "runtime_seconds": runtime,
    }
    return RunResult(problem=prob, field=state.u, integration=result,
                     metadata=meta, initial_low=lo, initial_high=hi)


# -- convergence studies ------------------------------------------------------

@dataclass
class ConvergenceRow:
    resolution: str
    l1: float
    l2: float
    linf: float
    order_l1: Optional[float] = None
    order_l2: Optional[float] = None
    order_linf: Optional[float] = None


@dataclass
class ConvergenceReport:
    rows: list
    metadata: dict = field(default_factory=dict)

    def to_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["resolution", "l1", "order_l1", "l2", "order_l2",
                        "linf", "order_linf"])
            for r in self.rows:
                w.writerow([r.resolution]
                           + [CSV_FMT % v if v is not None else ""
                              for v in (r.l1, r.order_l1, r.l2, r.order_l2,
                                        r.linf, r.order_linf)])

    def to_json(self, path) -> None:
        doc = {"metadata": self.metadata,
               "rows": [vars(r) for r in self.rows]}
        with open(path, "w") as fh:
            json.dump(doc, fh, indent=2, sort_keys=True)
            fh.write("\n")


def _cells_per_axis(resolution) -> float:
    if np.isscalar(resolution):
        return float(resolution)
    return float(resolution[0])


def _attach_orders(rows: list, resolutions: Sequence) -> None:
    for i in range(1, len(rows)):
        ratio = _cells_per_axis(resolutions[i]) / _cells_per_axis(resolutions[i - 1])
        for name in ("l1", "l2", "linf"):
            e_prev, e_here = getattr(rows[i - 1], name), getattr(rows[i], name)
            if e_prev > 0 and e_here > 0:
                setattr(rows[i], "order_" + name, log(e_prev / e_here) / log(ratio))


def run_convergence(problem: Union[str, ProblemSpec], k: int,
                    resolutions: Sequence, **run_options) -> ConvergenceReport:
    """Errors and empirical orders against the exact solution.

    Runs one simulation per resolution (concurrently when the worker count
    allows), measures L1/L2/Linf errors at the final time — restricted to the
    problem's error window when it has one — and derives orders from
    consecutive rows.
    """
    prob = _resolve(problem)
    if prob.exact is None:
        raise MissingExactSolutionError(prob.name)

    def job(res):
        out = run_simulation(prob, k, res, **run_options)
        return out, out.errors()

    workers = min(worker_count(), len(resolutions))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outcomes = list(pool.map(job, resolutions))
    else:
        outcomes = [job(res) for res in resolutions]

    rows = [ConvergenceRow(resolution=out.metadata["resolution"],
                           l1=err["l1"], l2=err["l2"], linf=err["linf"])
            for out, err in outcomes]
    _attach_orders(rows, resolutions)
    meta = dict(outcomes[0][0].metadata)
    for key in ("resolution", "dt", "n_steps", "runtime_seconds"):
        meta.pop(key, None)
    meta["resolutions"] = [str(r) for r in resolutions]
    return ConvergenceReport(rows=rows, metadata=meta)


def l1_distance(coarse: DGField1D, fine: DGField1D) -> float:
    """L1 norm of the difference, integrated on the coarse mesh.

    The fine field is evaluated at the coarse quadrature nodes, so the two
    fields may live on different resolutions of the same interval.
    """
    rule = gauss_rule(coarse.k + 3)
    x = coarse.mesh.centers()[:, None] + 0.5 * coarse.mesh.h * rule.nodes[None, :]
    table = np.stack([legendre_orthonormal(m, rule.nodes)
                      for m in range(coarse.k + 1)], axis=-1)
    vc = coarse.coeffs @ table.T
    vf = fine.evaluate(x.ravel()).reshape(x.shape)
    return float(0.5 * coarse.mesh.h * np.sum(np.abs(vc - vf) @ rule.weights))


def self_convergence(problem: Union[str, ProblemSpec], k: int,
                     resolutions: Sequence[int],
                     reference_resolution: Optional[int] = None,
                     compare_time: Optional[float] = None,
                     **run_options) -> ConvergenceReport:
    """L1 distances to a fine-grid reference run (problems with no formula).

    The reference defaults to 4x the finest requested resolution; all runs
    stop at ``compare_time`` (default: the problem's final time).
    """
    prob = _resolve(problem)
    if compare_time is not None:
        prob = replace(prob, t_end=float(compare_time), snapshot_times=())
    if reference_resolution is None:
        reference_resolution = 4 * max(int(r) for r in resolutions)

    def job(res):
        return run_simulation(prob, k, res, **run_options)

    todo = list(resolutions) + [reference_resolution]
    workers = min(worker_count(), len(todo))
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            outs = list(pool.map(job, todo))
    else:
        outs = [job(res) for res in todo]
    ref = outs[-1]

    rows = []
    for out in outs[:-1]:
        d = l1_distance(out.field, ref.field)
        rows.append(ConvergenceRow(resolution=out.metadata["resolution"],
                                   l1=d, l2=d, linf=d))
    _attach_orders(rows, resolutions)
    for row in rows:                      # only the L1 column is meaningful
        row.l2 = row.linf = float("nan")
        row.order_l2 = row.order_linf = None
    meta = dict(ref.metadata)
    for key in ("resolution", "dt", "n_steps", "runtime_seconds"):
        meta.pop(key, None)
    meta.update(reference_resolution=str(reference_resolution),
                resolutions=[str(r) for r in resolutions],
                compare_time=prob.t_end)
    return ConvergenceReport(rows=rows, metadata=meta)


# -- oscillation measurement ---------------------------------------------------

@dataclass
class OscillationMetrics:
    overshoot: float
    undershoot: float
    total_variation: float


def oscillation_metrics(dg_field, initial_low: float,
                        initial_high: float) -> OscillationMetrics:
    """Overshoot/undershoot of cell averages beyond the initial range.

    Total variation is the sum of absolute neighbor differences of the cell
    averages (both axes in 2D).
    """
    if isinstance(dg_field, DGField1D):
        means = dg_field.cell_averages()[1]
        tv = float(np.sum(np.abs(np.diff(means))))
    else:
        means = dg_field.cell_averages()[2]
        tv = float(np.sum(np.abs(np.diff(means, axis=0)))
                   + np.sum(np.abs(np.diff(means, axis=1))))
    return OscillationMetrics(
        overshoot=max(0.0, float(means.max()) - initial_high),
        undershoot=max(0.0, initial_low - float(means.min())),
        total_variation=tv)


@dataclass
class DampingComparison:
    damped: RunResult
    undamped: RunResult
    metrics_damped: OscillationMetrics        # of the final-time field
    metrics_undamped: OscillationMetrics
    # range excursions of the cell averages over every step of the run
    run_overshoot_damped: float = 0.0
    run_overshoot_undamped: float = 0.0
    run_undershoot_damped: float = 0.0
    run_undershoot_undamped: float = 0.0


def compare_damping(problem: Union[str, ProblemSpec], k: int = 2,
                    resolution=None, t_end: Optional[float] = None,
                    **run_options) -> DampingComparison:
    """Two runs identical except for the damping switch, plus their metrics.

    Final-time metrics quantify what a solution plot would show; the
    ``run_*`` fields record the worst excursion beyond the initial data's
    range at any step, which is where transient overshoots live.
    """
    run_options.pop("damping", None)
    damped = run_simulation(problem, k, resolution, damping=True,
                            t_end=t_end, **run_options)
    undamped = run_simulation(problem, k, resolution, damping=False,
                              t_end=t_end, **run_options)
    return DampingComparison(
        damped=damped, undamped=undamped,
        metrics_damped=oscillation_metrics(
            damped.field, damped.initial_low, damped.initial_high),
        metrics_undamped=oscillation_metrics(
            undamped.field, undamped.initial_low, undamped.initial_high),
        run_overshoot_damped=max(
            0.0, damped.integration.max_avg - damped.initial_high),
        run_overshoot_undamped=max(
            0.0, undamped.integration.max_avg - undamped.initial_high),
        run_undershoot_damped=max(
            0.0, damped.initial_low - damped.integration.min_avg),
        run_undershoot_undamped=max(
            0.0, undamped.initial_low - undamped.integration.min_avg))


# -- artifact serialization ------------------------------------------------------

def _format_time(t: float) -> str:
    return ("%.6g" % t).replace("-", "m") if t < 0 else "%.6g" % t


def snapshot_filename(problem_name: str, res_label: str, t: float) -> str:
    return f"{problem_name}_{res_label}_{_format_time(t)}.csv"


def write_solution_csv(dg_field, path) -> None:
    """Cell centers and averages, one row per cell (x[,y],u columns)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        if isinstance(dg_field, DGField1D):
            centers, means = dg_field.cell_averages()
            w.writerow(["x", "u"])
            for x, u in zip(centers, means):
                w.writerow([CSV_FMT % x, CSV_FMT % u])
        else:
            xc, yc, means = dg_field.cell_averages()
            w.writerow(["x", "y", "u"])
            for i, x in enumerate(xc):
                for j, y in enumerate(yc):
                    w.writerow([CSV_FMT % x, CSV_FMT % y, CSV_FMT % means[i, j]])


def write_trace_csv(samples, path) -> None:
    """Diagnostics time series (t, mass, l2, min/max cell average)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["t", "mass", "l2_norm", "min_avg", "max_avg"])
        for s in samples:
            w.writerow([CSV_FMT % v
                        for v in (s.t, s.mass, s.l2, s.min_avg, s.max_avg)])


def write_run_artifacts(out: RunResult, output_dir,
                        extra_metadata: Optional[dict] = None) -> list:
    """Snapshot CSVs + trace CSV + JSON manifest; returns written paths."""
    os.makedirs(output_dir, exist_ok=True)
    written = []
    res_label = out.metadata["resolution"]
    name = out.problem.name
    snaps = list(out.integration.snapshots)
    if not any(abs(t - out.integration.t) < 1e-12 for t, _ in snaps):
        snaps.append((out.integration.t, out.field))
    for t, snap_field in snaps:
        path = os.path.join(output_dir, snapshot_filename(name, res_label, t))
        write_solution_csv(snap_field, path)
        written.append(path)
    if out.integration.traces:
        path = os.path.join(output_dir, f"{name}_{res_label}_trace.csv")
        write_trace_csv(out.integration.traces, path)
        written.append(path)
    manifest = dict(out.metadata)
    manifest["initial_range"] = [out.initial_low, out.initial_high]
    manifest["artifacts"] = [os.path.basename(p) for p in written]
    if extra_metadata:
        manifest.update(extra_metadata)
    mpath = os.path.join(output_dir, "manifest.json")
    with open(mpath, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True, default=str)
        fh.write("\n")
    written.append(mpath)
    return written
