"""Explicit SSP-RK3 time integration with parabolic step-size control.

The step size is fixed for a whole run at

    dt = cfl / (b/h^2 + c/h)            (1D)
    dt = cfl / (bx/hx^2 + by/hy^2 + cx/hx + cy/hy)   (2D)

with b a bound on the diffusion coefficient a(u) and c a bound on |f'(u)|
over the expected solution range.  The final step (and any step that would
overrun a snapshot time) is clipped so output times are landed exactly.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence, Union

import numpy as np

from .field import DGField1D, DGField2D
from .geometry import Mesh1D, Mesh2D
from .semidiscrete import SchemeState1D, SchemeState2D

Bound = Union[float, tuple]


class NumericalBlowupError(RuntimeError):
    """A coefficient became non-finite during time stepping."""

    def __init__(self, t: float, cell, message: str = ""):
        self.t = t
        self.cell = cell
        super().__init__(
            f"non-finite state at t={t:.6g}, first offending cell {cell}"
            + (f": {message}" if message else ""))


# Measured spectral radii |lambda| h^2 of the degree-k diffusion operator
# per unit diffusivity (periodic mesh, alternating one-sided traces).  The
# explicit RK3 stage polynomial covers the real interval [-2.5127, 0], so a
# run at degree k is linearly stable only while cfl <= 2.5127 / _C_DIFF[k];
# the nominal default cfl of 0.1 exceeds that for every k >= 1 and must be
# reduced before integrating (see stable_cfl).
_C_DIFF = (4.0, 36.0, 148.26, 438.91, 1045.30)
_RK3_REAL_LIMIT = 2.5127


def stable_cfl(k: int, safety: float = 0.9) -> float:
    """Largest safe cfl coefficient for an RK3 run at polynomial degree k."""
    if k < 0:
        raise ValueError("polynomial degree must be nonnegative")
    if k < len(_C_DIFF):
        c = _C_DIFF[k]
    else:
        # spectral radius grows like (k+1)^4; extrapolate from the last entry
        c = _C_DIFF[-1] * ((k + 1) / len(_C_DIFF)) ** 4
    return safety * _RK3_REAL_LIMIT / c


@dataclass(frozen=True)
class StepControl:
    cfl: float = 0.1
    b_bound: Bound = 0.0
    c_bound: Bound = 0.0
    t_end: float = 1.0

    def __post_init__(self):
        if self.cfl <= 0:
            raise ValueError("cfl must be positive")

    @classmethod
    def stable_for(cls, k: int, b_bound: Bound = 0.0, c_bound: Bound = 0.0,
                   t_end: float = 1.0, cfl: float = 0.1) -> "StepControl":
        """A control whose cfl is capped at the degree-k stability limit."""
        return cls(cfl=min(cfl, stable_cfl(k)), b_bound=b_bound,
                   c_bound=c_bound, t_end=t_end)


def _pair(bound: Bound) -> tuple[float, float]:
    if isinstance(bound, tuple):
        return float(bound[0]), float(bound[1])
    return float(bound), float(bound)


def dt_1d(ctrl: StepControl, mesh: Mesh1D) -> float:
    h = mesh.h
    denom = ctrl.b_bound / h ** 2 + ctrl.c_bound / h
    if denom <= 0:
        raise ValueError(
            "zero denominator in step-size formula: b_bound + c_bound "
            "must be positive")
    return ctrl.cfl / denom


def dt_2d(ctrl: StepControl, mesh: Mesh2D) -> float:
    bx, by = _pair(ctrl.b_bound)
    cx, cy = _pair(ctrl.c_bound)
    denom = bx / mesh.hx ** 2 + by / mesh.hy ** 2 + cx / mesh.hx + cy / mesh.hy
    if denom <= 0:
        raise ValueError(
            "zero denominator in step-size formula: bounds must be positive")
    return ctrl.cfl / denom


def ssp_rk3_step(u, dt: float, rhs: Callable, t: float = 0.0):
    """One strong-stability-preserving RK3 step.

    Works on any value supporting ``a + b`` and ``scalar * a`` (DG fields,
    numpy arrays, plain floats).  ``rhs(u, t)`` must return the same kind.
    """
    s1 = u + dt * rhs(u, t)
    s2 = 0.75 * u + 0.25 * (s1 + dt * rhs(s1, t + dt))
    return (1.0 / 3.0) * u + (2.0 / 3.0) * (s2 + dt * rhs(s2, t + 0.5 * dt))


@dataclass
class TraceSample:
    t: float
    mass: float
    l2: float
    min_avg: float
    max_avg: float


@dataclass
class IntegrationResult:
    t: float
    n_steps: int
    dt: float
    traces: list = field(default_factory=list)
    snapshots: list = field(default_factory=list)   # (t, DGField) pairs
    # running extremes of the cell averages over every step taken
    min_avg: float = np.inf
    max_avg: float = -np.inf


def _summaries(u) -> tuple[float, float, float, float]:
    if isinstance(u, DGField1D):
        means = u.coeffs[:, 0] * np.sqrt(0.5)
    else:
        means = u.coeffs[:, :, 0] * 0.5
    return u.mass(), u.l2_norm(), float(means.min()), float(means.max())


def integrate(state: Union[SchemeState1D, SchemeState2D], ctrl: StepControl,
              snapshot_times: Sequence[float] = (),
              trace_every: int = 0,
              t_start: Optional[float] = None) -> IntegrationResult:
    """March ``state.u`` from t_start to ctrl.t_end with fixed steps.

    Snapshot times inside (t_start, t_end] are landed exactly by clipping the
    step; a snapshot at t_start is emitted immediately.  With trace_every > 0
    a :class:`TraceSample` is recorded every n-th step plus the final one.
    Raises :class:`NumericalBlowupError` when any coefficient goes non-finite.
    """
    is_1d = isinstance(state, SchemeState1D)
    u = state.u
    t0 = float(t_start) if t_start is not None else getattr(
        state.problem, "t_start", 0.0)
    base_dt = dt_1d(ctrl, u.mesh) if is_1d else dt_2d(ctrl, u.mesh)
    t_end = ctrl.t_end
    op = state.operator()

    def rhs(coeffs, t):
        out = op.q_and_rhs(coeffs, t)
        return out[-1]

    mean_scale = np.sqrt(0.5) if is_1d else 0.5
    mean_col = (slice(None), 0) if is_1d else (slice(None), slice(None), 0)

    result = IntegrationResult(t=t0, n_steps=0, dt=base_dt)
    result.min_avg = float(u.coeffs[mean_col].min()) * mean_scale
    result.max_avg = float(u.coeffs[mean_col].max()) * mean_scale
    events = sorted({float(s) for s in snapshot_times
                     if t0 < s <= t_end + 1e-12 * max(1.0, abs(t_end))})
    if any(abs(s - t0) <= 1e-12 * max(1.0, abs(t0)) for s in snapshot_times):
        result.snapshots.append((t0, u.copy()))

    coeffs = u.coeffs.copy()
    t = t0
    if trace_every > 0:
        result.traces.append(TraceSample(t, *_summaries(u.with_coeffs(coeffs))))

    eps = 1e-12 * max(1.0, abs(t_end))
    pending = list(events) + ([] if events and abs(events[-1] - t_end) <= eps
                              else [t_end])
    for target in pending:
        while t < target - eps:
            dt = min(base_dt, target - t)
            if target - (t + dt) < 1e-3 * base_dt:
                dt = target - t
            coeffs = ssp_rk3_step(coeffs, dt, rhs, t)
            t = target if target - (t + dt) <= 0 else t + dt
            result.n_steps += 1
            means = coeffs[mean_col]
            result.min_avg = min(result.min_avg, float(means.min()) * mean_scale)
            result.max_avg = max(result.max_avg, float(means.max()) * mean_scale)
            if not np.isfinite(coeffs).all():
                bad = np.argwhere(~np.isfinite(coeffs))[0]
                cell = tuple(int(i) for i in bad[:-1])
                raise NumericalBlowupError(t, cell if len(cell) > 1 else cell[0])
            if trace_every > 0 and result.n_steps % trace_every == 0:
                result.traces.append(
                    TraceSample(t, *_summaries(u.with_coeffs(coeffs))))
        t = target
        if events and any(abs(target - s) <= eps for s in events):
            result.snapshots.append((t, u.with_coeffs(coeffs.copy())))

    state.u = u.with_coeffs(coeffs)
    if trace_every > 0 and (not result.traces or result.traces[-1].t < t - eps):
        result.traces.append(TraceSample(t, *_summaries(state.u)))
    result.t = t
    return result
