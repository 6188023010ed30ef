"""Sparse recovery with tight frames.

Analysis l1 programs (basis pursuit, Dantzig selector, LASSO and their
sparse-noise separation forms), D-RIP certification, closed-form error
bounds, and a seeded experiment harness.
"""

from .bounds import (
    BoundInputs,
    BoundReport,
    HypothesisError,
    abp_bound,
    ads_bound,
    alasso_bound,
    l1_tail,
    minimax_lower,
    minimax_trace,
    power_law_risk,
    separation_bound,
)
from .frames import TightFrame, block_diag_frame, build_frame, frame_apply, norm_11, verify_tight
from .linalg import (
    BlockDiag,
    CholeskyFactor,
    DenseOp,
    HConcat,
    LinOp,
    ScaledIdentity,
    cholesky_factor,
    cholesky_solve,
    compose,
    generalized_sym_eig,
    op_apply,
    power_iteration_norm,
    sym_eig,
)
from .noise import (
    NoiseSpec,
    ads_lambda,
    alasso_mu,
    correlation_threshold,
    draw_noise,
    l2_noise_bound,
    threshold_report,
)
from .rng import hash64, make_rng
from .sensing import (
    DRipReport,
    SensingSpec,
    concentration_probe,
    draw_sensing,
    drip_exact,
    drip_monte_carlo,
    sample_size_advisor,
)
from .solvers import (
    RecoveryProblem,
    Separation,
    SolverConfig,
    SolverOutcome,
    pdhg_solve,
    project_ball,
    prox_l1,
    solve,
    solve_abp,
    solve_ads,
    solve_alasso,
    solve_separation,
    verify_outcome,
)

__version__ = "0.1.0"
