"""Nonlocal Laplacian multipliers and wave solvers on the periodic torus."""

from .errors import (
    CorruptedTableError,
    DomainError,
    InsufficientDataError,
    NonConvergenceError,
    ShapeError,
    UsageError,
)
from .specfun import SeriesControl, digamma, hyp2f3, ln_gamma, pochhammer
from .multiplier import (
    KernelParams,
    MultiplierTable,
    build_table,
    monotonicity_scan,
    multiplier_asymptotic,
    multiplier_extended_quadrature,
    multiplier_hypergeometric,
    multiplier_quadrature,
    multiplier_radial_series,
    scaling_constant,
)
from .torus import (
    SpectralField,
    decay_exponent_fit,
    evaluate,
    from_samples,
    sobolev_norm,
    synthetic_field,
    zero_field,
)
from .wave import (
    SolutionSnapshot,
    WaveProblem,
    derivative,
    derivative_forced,
    derivative_homogeneous,
    energy,
    forced_problem,
    homogeneous_problem,
    ode_mode_oracle,
    solve,
    solve_classical,
    solve_forced,
    solve_homogeneous,
)
from .harness import (
    StudyConfig,
    StudyReport,
    Sweep,
    run_study,
    study_asymptotics,
    study_beta_convergence,
    study_delta_convergence,
    study_regularity,
    study_temporal,
)

__version__ = "0.1.0"
