"""Numerical toolkit for q-fractional calculus on geometric time scales.

Grids, q-factorial powers and the q-Gamma function (:mod:`qfrac.qcore`);
nabla q-derivative/integral, fractional integral kernels and the Caputo
derivative (:mod:`qfrac.operators`); q-Mittag-Leffler functions and
q-exponentials (:mod:`qfrac.special`); initial value problem solvers
(:mod:`qfrac.solver`); comparison and Gronwall-type bound verifiers
(:mod:`qfrac.gronwall`); seeded verification suites (:mod:`qfrac.verify`).
"""

from .errors import (
    BoundaryError,
    DivergenceError,
    DomainError,
    GridMismatchError,
    InputFormatError,
    NonConvergenceError,
    PoleError,
    PreconditionError,
    QFracError,
    RangeError,
    StepError,
)
from .gronwall import (
    BoundResult,
    ComparisonInput,
    ComparisonReport,
    DependenceReport,
    GronwallInput,
    check_sart,
    dependence_experiment,
    gronwall_bound,
    march_integral_equation,
    q_gronwall_classical,
    sart_bound,
    verify_comparison,
)
from .operators import (
    OmegaOp,
    OperatorKernel,
    build_kernel,
    caputo_derivative,
    caputo_inverse_identity_check,
    fractional_integral,
    nabla_derivative,
    nabla_integral,
    omega_apply,
    omega_power_one_closed,
)
from .qcore import (
    DEFAULT_TOL,
    FracOrder,
    GridFn,
    QGrid,
    Tolerance,
    gamma_q,
    make_grid,
    product_truncation_index,
    q_bracket,
    q_factorial_power,
    q_pochhammer,
)
from .solver import (
    LinearIVP,
    NonlinearIVP,
    SolveReport,
    linear_defect,
    linear_picard_step,
    nonlinear_defect,
    solve_linear_closed,
    solve_linear_iterative,
    solve_marching,
)
from .special import (
    MLResult,
    MLSpec,
    convergence_ratio_estimate,
    mittag_leffler,
    mittag_leffler_modified,
    q_exp_big,
    q_exp_small,
)
from .verify import available_suites, run_suite

__version__ = "0.1.0"
