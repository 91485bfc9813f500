"""Connecting orbits of coupled phi-Laplacian systems on the real line."""

from .admissibility import (AdmissibilityReport, ConnectionClass, RhoMinResult, classify, evaluate_conditions,
                            oracle_conditions, oracle_rho_min, rho_min)
from .dof2 import PRESET_NAME, Dof2Params, build_dof2_problem, dof2_parameter_set, dof2_problem
from .errors import InvalidParameterError, NonFiniteError, PhiCoupleError, ProblemValidationError, QuadratureError
from .grid import (CompactifiedGrid, GridFunction, SolutionPair, build_grid, cumulative_integral, full_line_integral,
                   pair_distance, pair_norm, read_pair_csv, write_pair_csv)
from .homeo import (Homeomorphism, identity_homeomorphism, make_linear_cubic_homeomorphism, make_power_homeomorphism,
                    validate_h1)
from .operator import DiagnosticReport, apply_T, apply_T1, apply_T2, tail_diagnostics
from .problem import (CaratheodoryEnvelope, CoefficientFunction, CoupledProblem, Nonlinearity, constant_coefficient,
                      forcing_nonlinearity, validate_h2, validate_problem, zero_nonlinearity)
from .quadrature import adaptive_oracle_integral, oracle_full_line_integral
from .solver import ConvergenceReport, SolverConfig, solve, verify_solution

__all__ = [
    "adaptive_oracle_integral", "AdmissibilityReport", "apply_T", "apply_T1", "apply_T2", "build_dof2_problem",
    "build_grid", "CaratheodoryEnvelope", "classify", "CoefficientFunction", "CompactifiedGrid", "ConnectionClass",
    "constant_coefficient", "ConvergenceReport", "CoupledProblem", "cumulative_integral", "DiagnosticReport",
    "dof2_parameter_set", "dof2_problem", "Dof2Params", "evaluate_conditions", "forcing_nonlinearity",
    "full_line_integral", "GridFunction", "Homeomorphism", "identity_homeomorphism", "InvalidParameterError",
    "make_linear_cubic_homeomorphism", "make_power_homeomorphism", "NonFiniteError", "Nonlinearity",
    "oracle_conditions", "oracle_full_line_integral", "oracle_rho_min", "pair_distance", "pair_norm",
    "PhiCoupleError", "PRESET_NAME", "ProblemValidationError", "QuadratureError", "read_pair_csv", "rho_min",
    "RhoMinResult", "SolutionPair", "solve", "SolverConfig", "tail_diagnostics", "validate_h1", "validate_h2",
    "validate_problem", "verify_solution", "write_pair_csv", "zero_nonlinearity",
]

__version__ = "0.1.0"
