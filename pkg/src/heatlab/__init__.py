"""heatlab: heat flows on discrete geometries with gradient-estimate checks.

The package solves the drifting heat equation and the log-nonlinear heat
equation on built-in discretized geometries (circle, torus, interval, box,
sphere) and verifies Hamilton-type gradient inequalities pointwise along
the computed trajectories, including the curvature-bound computation, the
Neumann-boundary variant, and the fundamental-gap drift construction.
"""

from .errors import (BlowupError, ConfigError, EigenSolveError,
                     EstimateInputError, FieldMismatchError, GeometryError,
                     HeatLabError, PositivityError, SolverAbort,
                     ValidationError)
from .estimates import (FloorWarning, RefinementNote, ResidualSeries, Verdict,
                        auto_tolerance, check_estimate, classic_residual,
                        drift_residual, neg_log, nonlinear_residual)
from .explore import SweepCell, SweepReport, SweepSpec, run_sweep
from .fields import (ScalarField, TensorField, constant_field, coscomb_field,
                     gaussian_field, parse_field_text, random_smooth_field,
                     sqnorm_field, tabulated_field)
from .gap import (EigenPair, GapProblem, build_gap_problem,
                  dirichlet_eigenpairs, gap_pde_residual,
                  tensor_min_eigenvalues, verify_gap)
from .geometry import (DiscreteManifold, GeometrySpec, bakry_emery_bound,
                       build_geometry, directional_drift, gradient_components,
                       gradient_norm_sq, hessian, laplace_beltrami)
from .solver import (Problem, Schedule, Trajectory, solve, stable_dt, step)

__version__ = "0.1.0"

__all__ = [
    "BlowupError", "ConfigError", "EigenSolveError", "EstimateInputError",
    "FieldMismatchError", "GeometryError", "HeatLabError", "PositivityError",
    "SolverAbort", "ValidationError",
    "FloorWarning", "RefinementNote", "ResidualSeries", "Verdict",
    "auto_tolerance", "check_estimate", "classic_residual", "drift_residual",
    "neg_log", "nonlinear_residual",
    "SweepCell", "SweepReport", "SweepSpec", "run_sweep",
    "ScalarField", "TensorField", "constant_field", "coscomb_field",
    "gaussian_field", "parse_field_text", "random_smooth_field",
    "sqnorm_field", "tabulated_field",
    "EigenPair", "GapProblem", "build_gap_problem", "dirichlet_eigenpairs",
    "gap_pde_residual", "tensor_min_eigenvalues", "verify_gap",
    "DiscreteManifold", "GeometrySpec", "bakry_emery_bound", "build_geometry",
    "directional_drift", "gradient_components", "gradient_norm_sq", "hessian",
    "laplace_beltrami",
    "Problem", "Schedule", "Trajectory", "solve", "stable_dt", "step",
    "__version__",
]
