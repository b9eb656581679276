"""Interface fluxes for the first-order system form of the scheme.

The conserved variable uses a monotone convective flux plus a diffusive
correction built from the auxiliary gradient variable; the auxiliary equation
uses the mirrored flux.  With weight theta = 1 the diffusive pair reduces to
the classic alternating choice (take g from the left, q from the right).  All
functions are pure and accept scalars or arrays of matching shape.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Union

import numpy as np

Theta = Union[float, tuple]


@dataclass(frozen=True)
class FluxConfig:
    """Numerical-flux parameters.

    convection : "llf" (global Lax-Friedrichs) or "upwind" (upwind-biased).
    c_bound : speed bound for LLF; must dominate |f'| over the solution range.
    theta_up : upwind-biased weight on the left state; must exceed 1/2.
    theta_diff : diffusion weight(s); a scalar, or a pair for the two
        coordinate directions in 2D.  theta_diff = 1 is pure alternating.
    jump_tol : relative tolerance below which an interface jump counts as
        degenerate and the chord slope of g falls back to b at the average.
    """

    convection: str = "llf"
    c_bound: Theta = 0.0
    theta_up: float = 1.0
    theta_diff: Theta = 1.0
    jump_tol: float = 1e-12

    def __post_init__(self):
        if self.convection not in ("llf", "upwind"):
            raise ValueError(f"unknown convective flux {self.convection!r}")
        if self.convection == "upwind" and not self.theta_up > 0.5:
            raise ValueError(
                f"upwind-biased weight must exceed 1/2, got {self.theta_up}")
        bounds = self.c_bound if isinstance(self.c_bound, tuple) else (self.c_bound,)
        if any(c < 0 for c in bounds):
            raise ValueError("c_bound must be nonnegative")
        if self.jump_tol <= 0:
            raise ValueError("jump_tol must be positive")

    def theta_for_axis(self, axis: int) -> float:
        if isinstance(self.theta_diff, tuple):
            return float(self.theta_diff[axis])
        return float(self.theta_diff)

    def c_for_axis(self, axis: int) -> float:
        if isinstance(self.c_bound, tuple):
            return float(self.c_bound[axis])
        return float(self.c_bound)


def convective_flux(cfg: FluxConfig, f: Callable, u_left, u_right, axis: int = 0):
    """Monotone two-point flux for the convection term."""
    if cfg.convection == "llf":
        c = cfg.c_for_axis(axis)
        return 0.5 * (f(u_left) + f(u_right)) - 0.5 * c * (u_right - u_left)
    return cfg.theta_up * f(u_left) + (1.0 - cfg.theta_up) * f(u_right)


def degenerate_ratio(g: Callable, b: Callable, u_left, u_right,
                     jump_tol: float = 1e-12):
    """Chord slope of g across an interface, safe at vanishing jumps.

    Returns (g(uR) - g(uL)) / (uR - uL) where the jump is significant, and
    b((uL+uR)/2) where |uR - uL| <= jump_tol * max(1, |uL|, |uR|).  Since
    g' = b, the fallback is the continuous limit of the chord slope.
    """
    u_left = np.asarray(u_left, dtype=float)
    u_right = np.asarray(u_right, dtype=float)
    du = u_right - u_left
    degenerate = np.abs(du) <= jump_tol * np.maximum(
        1.0, np.maximum(np.abs(u_left), np.abs(u_right)))
    safe_du = np.where(degenerate, 1.0, du)
    chord = (g(u_right) - g(u_left)) / safe_du
    return np.where(degenerate, b(0.5 * (u_left + u_right)), chord)


def diffusive_fluxes_1d(cfg: FluxConfig, problem, u_left, u_right,
                        q_left, q_right, mirror_last: bool = False):
    """Diffusive flux pair (hu_diff, hq) at interfaces.

    hu_diff = -r*{q} - gamma*[q]  enters the conserved-variable flux;
    hq      = -{g}  + gamma*[u]  defines the auxiliary variable;
    with r the degenerate-safe chord slope of g and gamma = (theta - 1/2) r.

    ``mirror_last`` reflects the one-sided bias (theta -> 1 - theta) on the
    final face of the leading axis.  On a strip with prescribed boundary
    values the bias picks the exterior trace at the first face but the
    interior one at the last; mirroring makes both boundary faces read the
    prescribed datum.
    """
    return _diffusive_pair(problem.g1, problem.b1, cfg.theta_for_axis(0),
                           cfg.jump_tol, u_left, u_right, q_left, q_right,
                           mirror_last)


def diffusive_fluxes_2d(cfg: FluxConfig, problem, axis: int, u_left, u_right,
                        q_left, q_right, mirror_last: bool = False):
    """Direction-``axis`` diffusive flux pair (0 = x, 1 = y)."""
    g = problem.g1 if axis == 0 else problem.g2
    b = problem.b1 if axis == 0 else problem.b2
    return _diffusive_pair(g, b, cfg.theta_for_axis(axis), cfg.jump_tol,
                           u_left, u_right, q_left, q_right, mirror_last)


def _diffusive_pair(g, b, theta, jump_tol, u_left, u_right, q_left, q_right,
                    mirror_last=False):
    r = degenerate_ratio(g, b, u_left, u_right, jump_tol)
    gamma = (theta - 0.5) * r
    if mirror_last:
        gamma = np.broadcast_to(gamma, np.shape(r)).copy()
        gamma[-1] = -gamma[-1]
    q_avg = 0.5 * (q_left + q_right)
    q_jump = q_right - q_left
    hu_diff = -r * q_avg - gamma * q_jump
    hq = -0.5 * (g(u_left) + g(u_right)) + gamma * (u_right - u_left)
    return hu_diff, hq
