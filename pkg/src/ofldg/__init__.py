"""Oscillation-free local DG solver for degenerate convection-diffusion."""

from .basis import BasisSet, QuadRule, basis_set, gauss_rule
from .damping import DampingParams, apply_damping, sigma_1d, sigma_2d
from .field import DGField1D, DGField2D, ModalSpace, modal_truncate
from .flux import FluxConfig
from .geometry import (BoundaryCondition, BoundaryKind, Mesh1D, Mesh2D,
                       build_uniform_1d, build_uniform_2d)
from .harness import (ConvergenceReport, DampingComparison,
                      MissingExactSolutionError, OscillationMetrics,
                      RunResult, coefficient_bounds, compare_damping,
                      l1_distance, oscillation_metrics, run_convergence,
                      run_simulation, self_convergence)
from .problems import (ProblemSpec, barenblatt, barenblatt_front, get_problem,
                       list_problems)
from .semidiscrete import (SchemeState1D, SchemeState2D, rhs_u_1d, rhs_u_2d,
                           solve_q_1d, solve_q12_2d)
from .timestep import (IntegrationResult, NumericalBlowupError, StepControl,
                       dt_1d, dt_2d, integrate, ssp_rk3_step, stable_cfl)

__version__ = "0.1.0"

__all__ = [
    "BasisSet", "QuadRule", "basis_set", "gauss_rule",
    "DampingParams", "apply_damping", "sigma_1d", "sigma_2d",
    "DGField1D", "DGField2D", "ModalSpace", "modal_truncate",
    "FluxConfig",
    "BoundaryCondition", "BoundaryKind", "Mesh1D", "Mesh2D",
    "build_uniform_1d", "build_uniform_2d",
    "ConvergenceReport", "DampingComparison", "MissingExactSolutionError",
    "OscillationMetrics", "RunResult", "coefficient_bounds",
    "compare_damping", "l1_distance", "oscillation_metrics",
    "run_convergence", "run_simulation", "self_convergence",
    "ProblemSpec", "barenblatt", "barenblatt_front",
    "get_problem", "list_problems",
    "SchemeState1D", "SchemeState2D", "rhs_u_1d", "rhs_u_2d",
    "solve_q_1d", "solve_q12_2d",
    "IntegrationResult", "NumericalBlowupError", "StepControl",
    "dt_1d", "dt_2d", "integrate", "ssp_rk3_step", "stable_cfl",
    "__version__",
]
