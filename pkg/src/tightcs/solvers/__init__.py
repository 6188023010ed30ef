"""Proximal maps, the PDHG and ADMM engines, and the recovery programs."""

from .admm import ADMMResult, admm_alasso
from .pdhg import (
    BallIndicator,
    L1Norm,
    PDHGResult,
    SolverConfig,
    SquaredDistance,
    auto_steps,
    pdhg_solve,
)
from .prox import project_ball, prox_l1
from .recovery import (
    METHODS,
    RecoveryProblem,
    Separation,
    SolverOutcome,
    separation_problem,
    solve,
    solve_abp,
    solve_ads,
    solve_alasso,
    solve_separation,
)
from .verify import VerificationReport, cone_slack, stationarity_residual, verify_outcome

__all__ = [
    "ADMMResult", "admm_alasso", "BallIndicator", "L1Norm", "PDHGResult", "SolverConfig",
    "SquaredDistance", "auto_steps", "pdhg_solve", "project_ball", "prox_l1", "METHODS",
    "RecoveryProblem", "Separation", "SolverOutcome", "separation_problem", "solve",
    "solve_abp", "solve_ads", "solve_alasso", "solve_separation", "VerificationReport",
    "cone_slack", "stationarity_residual", "verify_outcome",
]
