"""Finite-difference Boussinesq solver that advances each time step with one Lyapunov-Sylvester solve."""
from .exceptions import (BlowUpError, ConfigError, ConvergenceError, NotContractiveError, SingularOperatorError,
                         SolverError, SylvbqError)
from .grid import (CoefficientSet, GridSpec, SchemeParams, build_grid, compute_coefficients, grid_for_interval,
                   step_scaling_report)
from .matrices import BandedMatrix, SchemeMatrices, build_scheme_matrices, operator_identity_gap
from .metrics import ErrorReport, error_metrics, frobenius
from .problems import get_case, residual_check
from .stepper import ProblemSetup, RunConfig, RunResult, advance, initialize, run, setup_from_case
from .sylvester import SylvesterProblem, SylvesterSolver, solve_fixed_point, solve_kron_direct, solve_schur

__version__ = "0.1.0"
