"""Caputo-Katugampola fractional derivatives, integrals and Cauchy problem solvers."""

from ckfrac.decomposition import Approximation, DecompCoeffs, approx_derivative, decomp_coeffs, error_bound, moments
from ckfrac.errors import (
    CKError,
    ConvergenceError,
    DomainError,
    MissingDerivativeError,
    QuadratureError,
    SolverError,
)
from ckfrac.operators import (
    Func1,
    Interval,
    OrderParams,
    QuadSpec,
    Side,
    ck_derivative,
    katugampola_integral,
)
from ckfrac.solver import (
    CauchyProblem,
    DecompSolveConfig,
    PicardConfig,
    SolutionGrid,
    convergence_horizon,
    convergence_study,
    solve_decomposition,
    solve_picard,
    solve_reference,
)
from ckfrac.specfun import CoeffSeq, Mode, SeriesControl, coeff_seq, gamma, mittag_leffler

__all__ = [
    "Approximation",
    "CKError",
    "CauchyProblem",
    "CoeffSeq",
    "ConvergenceError",
    "DecompCoeffs",
    "DecompSolveConfig",
    "DomainError",
    "Func1",
    "Interval",
    "MissingDerivativeError",
    "Mode",
    "OrderParams",
    "PicardConfig",
    "QuadSpec",
    "QuadratureError",
    "SeriesControl",
    "Side",
    "SolutionGrid",
    "SolverError",
    "approx_derivative",
    "ck_derivative",
    "coeff_seq",
    "convergence_horizon",
    "convergence_study",
    "decomp_coeffs",
    "error_bound",
    "gamma",
    "katugampola_integral",
    "mittag_leffler",
    "moments",
    "solve_decomposition",
    "solve_picard",
    "solve_reference",
]
