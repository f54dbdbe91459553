"""Radial solver, principal-eigenvalue estimator, and supersolution
certifier for fully nonlinear |Du|^alpha-homogeneous elliptic Neumann
problems on balls."""

from .certify import (
    Certificate,
    GridResolutionError,
    InfeasibleParams,
    PiecewiseRadialFn,
    SupersolutionParams,
    barrier_exponent,
    beta2_upper_bound,
    build_params,
    build_supersolution,
    default_c_band,
    integral_of_c,
    verify,
)
from .eigen import (
    BracketError,
    EigenEstimate,
    EigenOptions,
    EigenResidualError,
    eigenfunction_up,
    lambda_down,
    lambda_up,
    solve_general,
)
from .grid import (
    GridFunction,
    RadialGrid,
    build_grid,
    discrete_derivatives,
    lipschitz_quotient,
)
from .operators import (
    CoefficientField,
    EllipticOperator,
    PropertyReport,
    RegularityMeta,
    check_ellipticity,
    check_homogeneity,
    constant_profile,
    eval_radial_F,
    eval_radial_F_from_eigs,
    eval_radial_G,
    poly_profile,
    pucci_extremal,
    radial_hessian_eigs,
    signed_power,
    table_profile,
)
from .solver import (
    InnerSolveError,
    IterationReport,
    PreconditionError,
    SolveOptions,
    SolveReport,
    SolveWorkspace,
    Verdict,
    monotone_iteration,
    residual,
    solve_neumann,
)

__version__ = "0.1.0"
