"""Benchmark problem definitions.

Each problem packages the flux f, the diffusion coefficient a >= 0, and the
derived pair b = sqrt(a), g = integral of b, together with initial/boundary
data, the time window, and (when available) the exact solution.  Problems are
addressable by name through :func:`get_problem`:

    pme1d{m}        porous-medium Barenblatt evolution, m in {2, 3, 5, 8, ...}
    pme1d-accuracy  smooth-window refinement study for the m = 8 case
    twobox          merging boxes run for the m = 8 porous-medium equation
    bl / bl-riemann / bl-gravity   Buckley-Leverett with tiny diffusion
    sd1d            strongly degenerate convection-diffusion, two pulses
    heat2d          2D heat equation with a separable exact solution
    pme2d           2D porous-medium equation, two compact bumps
    sd2d            2D strongly degenerate problem, two circular plateaus
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Callable, Optional, Union

import numpy as np

from .geometry import BoundaryCondition

Resolution = Union[int, tuple]


def _zero(u):
    return np.zeros_like(np.asarray(u, dtype=float))


@dataclass(frozen=True)
class ProblemSpec:
    """A complete 1D or 2D problem setup.

    ``f1/df1/a1/b1/g1`` act in the x direction; the 2-suffixed family is None
    in 1D.  ``bc`` is a single BoundaryCondition in 1D and an (x, y) pair in
    2D.  ``initial`` takes x (1D) or x, y (2D); ``exact`` additionally takes
    t.  All coefficient callables accept numpy arrays.
    """

    name: str
    dim: int
    domain: tuple
    bc: object
    t_start: float
    t_end: float
    initial: Callable
    f1: Callable
    df1: Callable
    a1: Callable
    b1: Callable
    g1: Callable
    f2: Optional[Callable] = None
    df2: Optional[Callable] = None
    a2: Optional[Callable] = None
    b2: Optional[Callable] = None
    g2: Optional[Callable] = None
    exact: Optional[Callable] = None
    default_resolution: Resolution = 100
    snapshot_times: tuple = ()
    has_convection: bool = True
    error_window: Optional[tuple] = None
    description: str = ""


# -- porous medium equation -------------------------------------------------

def barenblatt(x, t, m: int):
    """Self-similar compactly supported solution of u_t = (u^m)_xx."""
    x = np.asarray(x, dtype=float)
    p = 1.0 / (m + 1)
    core = 1.0 - p * (m - 1) / (2.0 * m) * x * x * t ** (-2 * p)
    return t ** (-p) * np.maximum(core, 0.0) ** (1.0 / (m - 1))


def barenblatt_front(t, m: int) -> float:
    """Half-width of the support of :func:`barenblatt` at time t."""
    p = 1.0 / (m + 1)
    return float(np.sqrt(2.0 * m / (p * (m - 1))) * t ** p)


def _pme_coefficients(m: int):
    """(a, b, g) for the porous-medium diffusion, clamped at u <= 0."""
    sqrt_m = np.sqrt(m)

    def a(u):
        return m * np.maximum(u, 0.0) ** (m - 1)

    def b(u):
        return sqrt_m * np.maximum(u, 0.0) ** ((m - 1) / 2.0)

    def g(u):
        return 2.0 * sqrt_m / (m + 1) * np.maximum(u, 0.0) ** ((m + 1) / 2.0)

    return a, b, g


def make_pme_1d(m: int) -> ProblemSpec:
    """Barenblatt evolution on [-6, 6] from t = 1 to t = 2."""
    if m < 2:
        raise ValueError(f"porous-medium exponent must be >= 2, got {m}")
    a, b, g = _pme_coefficients(m)
    return ProblemSpec(
        name=f"pme1d{m}",
        dim=1,
        domain=(-6.0, 6.0),
        bc=BoundaryCondition.compact_support(),
        t_start=1.0,
        t_end=2.0,
        initial=lambda x: barenblatt(x, 1.0, m),
        f1=_zero, df1=_zero, a1=a, b1=b, g1=g,
        exact=lambda x, t: barenblatt(x, t, m),
        default_resolution=320,
        has_convection=False,
        description=f"porous medium m={m}, self-similar profile with moving fronts",
    )


def make_pme_1d_accuracy(m: int = 8) -> ProblemSpec:
    """Short-time refinement study for the m = 8 Barenblatt profile.

    The run covers the full [-6, 6] domain (fronts included) but errors are
    measured only on the window [-1.5, 1.5] where the profile is smooth, so
    the study sees clean k+1 rates instead of the front's limited regularity.
    """
    a, b, g = _pme_coefficients(m)
    return ProblemSpec(
        name="pme1d-accuracy",
        dim=1,
        domain=(-6.0, 6.0),
        bc=BoundaryCondition.compact_support(),
        t_start=1.0,
        t_end=1.05,
        initial=lambda x: barenblatt(x, 1.0, m),
        f1=_zero, df1=_zero, a1=a, b1=b, g1=g,
        exact=lambda x, t: barenblatt(x, t, m),
        default_resolution=40,
        has_convection=False,
        error_window=(-1.5, 1.5),
        description=f"smooth-window refinement study for porous medium m={m}",
    )


def make_two_box(m: int = 8) -> ProblemSpec:
    """Two separated boxes (heights 1 and 1.5) merging under m = 8 diffusion."""
    a, b, g = _pme_coefficients(m)

    def initial(x):
        x = np.asarray(x, dtype=float)
        return np.where((x > -4.0) & (x < -1.0), 1.0, 0.0) \
            + np.where((x > 0.0) & (x < 3.0), 1.5, 0.0)

    return ProblemSpec(
        name="twobox",
        dim=1,
        domain=(-6.0, 6.0),
        bc=BoundaryCondition.compact_support(),
        t_start=0.0,
        t_end=1.0,
        initial=initial,
        f1=_zero, df1=_zero, a1=a, b1=b, g1=g,
        default_resolution=240,
        snapshot_times=(0.0, 0.05, 0.08, 0.11, 0.14, 0.17, 0.20, 0.23, 0.50, 1.00),
        has_convection=False,
        description=f"merging boxes, porous medium m={m}",
    )


# -- Buckley-Leverett -------------------------------------------------------

_BL_EPS = 0.01


def _bl_diffusion(eps: float):
    sqrt_eps = np.sqrt(eps)

    def a(u):
        uc = np.clip(u, 0.0, 1.0)
        return eps * 4.0 * uc * (1.0 - uc)

    def b(u):
        uc = np.clip(u, 0.0, 1.0)
        return 2.0 * sqrt_eps * np.sqrt(uc * (1.0 - uc))

    def g(u):
        # With u = sin^2(theta) the antiderivative of b integrates to
        # sqrt(eps) (theta/2 - sin(4 theta)/8); constant outside [0, 1].
        uc = np.clip(u, 0.0, 1.0)
        theta = np.arcsin(np.sqrt(uc))
        return sqrt_eps * (0.5 * theta - np.sin(4.0 * theta) / 8.0)

    return a, b, g


def _bl_fluxes(gravity: bool):
    if not gravity:
        def f(u):
            u = np.asarray(u, dtype=float)
            return u * u / (u * u + (1.0 - u) ** 2)

        def df(u):
            u = np.asarray(u, dtype=float)
            return 2.0 * u * (1.0 - u) / (u * u + (1.0 - u) ** 2) ** 2
    else:
        def f(u):
            u = np.asarray(u, dtype=float)
            return u * u * (1.0 - 5.0 * (1.0 - u) ** 2) / (u * u + (1.0 - u) ** 2)

        def df(u):
            u = np.asarray(u, dtype=float)
            den = u * u + (1.0 - u) ** 2
            num = u * u * (1.0 - 5.0 * (1.0 - u) ** 2)
            dnum = 2.0 * u * (1.0 - 5.0 * (1.0 - u) ** 2) + 10.0 * u * u * (1.0 - u)
            dden = 4.0 * u - 2.0
            return (dnum * den - num * dden) / den ** 2
    return f, df


def make_buckley_leverett(gravity: bool = False,
                          riemann: bool = False) -> ProblemSpec:
    """Two-phase displacement model with a tiny degenerate diffusion.

    The ramp variant starts from 1 - 3x on [0, 1/3] with inflow value 1; the
    Riemann variant jumps from 0 to 1 at x = 1 - 1/sqrt(2).
    """
    f, df = _bl_fluxes(gravity)
    a, b, g = _bl_diffusion(_BL_EPS)
    if riemann:
        x_jump = 1.0 - 1.0 / np.sqrt(2.0)

        def initial(x):
            return np.where(np.asarray(x, dtype=float) >= x_jump, 1.0, 0.0)

        bc = BoundaryCondition.dirichlet(0.0, 1.0)
        name = "bl-gravity" if gravity else "bl-riemann"
    else:
        def initial(x):
            x = np.asarray(x, dtype=float)
            return np.where(x <= 1.0 / 3.0, np.maximum(1.0 - 3.0 * x, 0.0), 0.0)

        bc = BoundaryCondition.dirichlet(1.0, 0.0)
        name = "bl"
    return ProblemSpec(
        name=name,
        dim=1,
        domain=(0.0, 1.0),
        bc=bc,
        t_start=0.0,
        t_end=0.2,
        initial=initial,
        f1=f, df1=df, a1=a, b1=b, g1=g,
        default_resolution=160,
        has_convection=True,
        description=("Buckley-Leverett"
                     + (" with gravity" if gravity else "")
                     + (", Riemann datum" if riemann else ", ramp datum")),
    )


# -- strongly degenerate convection-diffusion --------------------------------

def _sd_coefficients(eps: float, cutoff: float = 0.25):
    sqrt_eps = np.sqrt(eps)

    def a(u):
        u = np.asarray(u, dtype=float)
        return eps * (np.abs(u) > cutoff)

    def b(u):
        u = np.asarray(u, dtype=float)
        return sqrt_eps * (np.abs(u) > cutoff)

    def g(u):
        u = np.asarray(u, dtype=float)
        return sqrt_eps * (np.where(u > cutoff, u - cutoff, 0.0)
                           + np.where(u < -cutoff, u + cutoff, 0.0))

    return a, b, g


def make_strongly_degenerate_1d() -> ProblemSpec:
    """Quadratic convection with diffusion switched off on |u| <= 1/4."""
    a, b, g = _sd_coefficients(0.1)
    c = 1.0 / np.sqrt(2.0)

    def initial(x):
        x = np.asarray(x, dtype=float)
        return (np.where(np.abs(x + c) < 0.4, 1.0, 0.0)
                - np.where(np.abs(x - c) < 0.4, 1.0, 0.0))

    def f(u):
        u = np.asarray(u, dtype=float)
        return u * u

    def df(u):
        return 2.0 * np.asarray(u, dtype=float)

    return ProblemSpec(
        name="sd1d",
        dim=1,
        domain=(-2.0, 2.0),
        bc=BoundaryCondition.compact_support(),
        t_start=0.0,
        t_end=0.7,
        initial=initial,
        f1=f, df1=df, a1=a, b1=b, g1=g,
        default_resolution=200,
        has_convection=True,
        description="strongly degenerate convection-diffusion, opposite pulses",
    )


# -- 2D problems --------------------------------------------------------------

def make_heat_2d() -> ProblemSpec:
    """Heat equation on [-pi, pi]^2 with exact solution exp(-2t) sin(x+y)."""
    ident = lambda u: np.asarray(u, dtype=float)
    one = lambda u: np.ones_like(np.asarray(u, dtype=float))
    return ProblemSpec(
        name="heat2d",
        dim=2,
        domain=(-np.pi, np.pi, -np.pi, np.pi),
        bc=(BoundaryCondition.periodic(), BoundaryCondition.periodic()),
        t_start=0.0,
        t_end=2.0,
        initial=lambda x, y: np.sin(x + y),
        f1=_zero, df1=_zero, a1=one, b1=one, g1=ident,
        f2=_zero, df2=_zero, a2=one, b2=one, g2=ident,
        exact=lambda x, y, t: np.exp(-2.0 * t) * np.sin(x + y),
        default_resolution=(40, 40),
        has_convection=False,
        description="2D heat equation, separable exact solution",
    )


def make_pme_2d(m: int = 2) -> ProblemSpec:
    """Porous medium in 2D: two compact bumps spreading and merging."""
    a, b, g = _pme_coefficients(m)

    def bump(r2):
        out = np.zeros_like(r2)
        inside = r2 < 6.0
        out[inside] = np.exp(-1.0 / (6.0 - r2[inside]))
        return out

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2a = (x - 2.0) ** 2 + (y + 2.0) ** 2
        r2b = (x + 2.0) ** 2 + (y - 2.0) ** 2
        r2a, r2b = np.broadcast_arrays(r2a, r2b)
        return bump(r2a) + bump(r2b)

    return ProblemSpec(
        name="pme2d",
        dim=2,
        domain=(-10.0, 10.0, -10.0, 10.0),
        bc=(BoundaryCondition.periodic(), BoundaryCondition.periodic()),
        t_start=0.0,
        t_end=4.0,
        initial=initial,
        f1=_zero, df1=_zero, a1=a, b1=b, g1=g,
        f2=_zero, df2=_zero, a2=a, b2=b, g2=g,
        default_resolution=(80, 80),
        snapshot_times=(0.0, 0.5, 1.0, 4.0),
        has_convection=False,
        description=f"2D porous medium m={m}, two merging bumps",
    )


def make_strongly_degenerate_2d() -> ProblemSpec:
    """2D quadratic convection with the |u| <= 1/4 diffusion cutoff."""
    a, b, g = _sd_coefficients(0.1)

    def f(u):
        u = np.asarray(u, dtype=float)
        return u * u

    def df(u):
        return 2.0 * np.asarray(u, dtype=float)

    def initial(x, y):
        x = np.asarray(x, dtype=float)
        y = np.asarray(y, dtype=float)
        r2a = (x + 0.5) ** 2 + (y + 0.5) ** 2
        r2b = (x - 0.5) ** 2 + (y - 0.5) ** 2
        r2a, r2b = np.broadcast_arrays(r2a, r2b)
        return (np.where(r2a < 0.16, 1.0, 0.0)
                - np.where(r2b < 0.16, 1.0, 0.0))

    dir0 = BoundaryCondition.compact_support()
    return ProblemSpec(
        name="sd2d",
        dim=2,
        domain=(-1.5, 1.5, -1.5, 1.5),
        bc=(dir0, dir0),
        t_start=0.0,
        t_end=0.5,
        initial=initial,
        f1=f, df1=df, a1=a, b1=b, g1=g,
        f2=f, df2=df, a2=a, b2=b, g2=g,
        default_resolution=(120, 120),
        has_convection=True,
        description="2D strongly degenerate problem, opposite circular plateaus",
    )


# -- registry -----------------------------------------------------------------

_FACTORIES = {
    "pme1d-accuracy": make_pme_1d_accuracy,
    "twobox": make_two_box,
    "bl": lambda: make_buckley_leverett(gravity=False, riemann=False),
    "bl-riemann": lambda: make_buckley_leverett(gravity=False, riemann=True),
    "bl-gravity": lambda: make_buckley_leverett(gravity=True, riemann=True),
    "sd1d": make_strongly_degenerate_1d,
    "heat2d": make_heat_2d,
    "pme2d": make_pme_2d,
    "sd2d": make_strongly_degenerate_2d,
}


def get_problem(name: str) -> ProblemSpec:
    """Problem registry lookup; 'pme1d{m}' accepts any integer m >= 2."""
    match = re.fullmatch(r"pme1d(\d+)", name)
    if match:
        return make_pme_1d(int(match.group(1)))
    if name not in _FACTORIES:
        raise KeyError(f"unknown problem {name!r}; see list_problems()")
    return _FACTORIES[name]()


def list_problems() -> list[tuple[str, str]]:
    """(name, description) pairs for every registered problem."""
    names = ["pme1d2", "pme1d3", "pme1d5", "pme1d8"] + list(_FACTORIES)
    return [(n, get_problem(n).description) for n in names]
