"""Recovery programs: ABP, ADS, ALASSO and their sparse-noise separation forms.

=========  =====================================================================
method     program
=========  =====================================================================
``abp``    ``min ||D^T f||_1``  s.t. ``||A f - y||_2 <= epsilon``
``ads``    ``min ||D^T f||_1``  s.t. ``||D^T A^T (A f - y)||_inf <= lambda``
``alasso`` ``min 1/2 ||A f - y||_2^2 + mu ||D^T f||_1``
=========  =====================================================================

The separation variants run the same programs on ``Phi = [A, I]`` and
``W = blockdiag(D, Omega)`` and split the solution ``u = [f; e]``.
"""

from dataclasses import dataclass, replace

import numpy as np

from ..frames import TightFrame, block_diag_frame, build_frame, norm_11
from ..linalg import DenseOp, HConcat, LinOp, ScaledIdentity, as_vector, compose
from .admm import admm_alasso
from .pdhg import BallIndicator, L1Norm, SolverConfig, SquaredDistance, pdhg_solve

__all__ = [
    "METHODS",
    "Separation",
    "RecoveryProblem",
    "SolverOutcome",
    "solve",
    "solve_abp",
    "solve_ads",
    "solve_alasso",
    "solve_separation",
    "separation_problem",
    "outcome_hooks",
]

# Callables ``hook(problem, outcome, config)`` run after every ABP/ADS/ALASSO solve
# (for separation problems: on the augmented problem, before the split).
# Each hook gets its own snapshot of the outcome.  Used for auditing.
outcome_hooks = []


def _finish(problem, outcome, config):
    for hook in outcome_hooks:
        hook(problem, replace(outcome, f_hat=outcome.f_hat.copy()), config)
    return outcome


METHODS = ("abp", "ads", "alasso")


@dataclass(frozen=True)
class Separation:
    """Sparse-noise data: ``Omega`` (``None`` for the identity) and budget ``s_prime``."""

    omega: TightFrame = None
    s_prime: int = 0


@dataclass
class RecoveryProblem:
    """One instance of a recovery program.

    ``param`` is ``epsilon`` for abp, ``lambda`` for ads and ``mu`` for alasso.
    """

    sensing: LinOp
    frame: TightFrame
    y: np.ndarray
    method: str
    param: float
    separation: Separation = None

    def __post_init__(self):
        if isinstance(self.sensing, np.ndarray) or not isinstance(self.sensing, LinOp):
            self.sensing = DenseOp(self.sensing)
        self.y = as_vector(self.y, "y")
        if self.method not in METHODS:
            raise ValueError(f"unknown method {self.method!r}; expected one of {METHODS}")
        if self.param < 0:
            raise ValueError(f"{self.method} parameter must be nonnegative, got {self.param}")
        if self.y.shape[0] != self.sensing.output_dim:
            raise ValueError(
                f"y has length {self.y.shape[0]} but the sensing operator has "
                f"{self.sensing.output_dim} rows"
            )
        if self.separation is None and self.frame.n != self.sensing.input_dim:
            raise ValueError(
                f"frame acts on R^{self.frame.n} but sensing expects {self.sensing.input_dim}"
            )


@dataclass
class SolverOutcome:
    f_hat: np.ndarray
    iterations: int
    objective: float
    duality_gap: float
    feasibility_margin: float
    converged: bool
    e_hat: np.ndarray = None
    engine: str = "pdhg"
    primal_residual: float = float("nan")
    dual_residual: float = float("nan")


def _residual_correlation(A, D, f, y):
    """``||D^T A^T (A f - y)||_inf``."""
    return float(np.max(np.abs(D.T @ A.adjoint(A.forward(f) - y))))


def solve_ads(problem, config=None):
    config = config or SolverConfig()
    A, D, y, lam = problem.sensing, problem.frame.D, problem.y, problem.param
    analysis = DenseOp(D.T)
    normal = compose(analysis, A.T, A)
    center = D.T @ A.adjoint(y)
    res = pdhg_solve([analysis, normal], [L1Norm(1.0), BallIndicator("linf", center, lam)], config)
    margin = lam - _residual_correlation(A, D, res.x, y)
    return _finish(problem, SolverOutcome(f_hat=res.x, iterations=res.iterations, objective=res.objective,
                         duality_gap=res.duality_gap, feasibility_margin=margin,
                         converged=res.converged, engine="pdhg",
                         primal_residual=res.primal_residual, dual_residual=res.dual_residual), config)


def solve_abp(problem, config=None):
    config = config or SolverConfig()
    A, D, y, eps = problem.sensing, problem.frame.D, problem.y, problem.param
    res = pdhg_solve([DenseOp(D.T), A], [L1Norm(1.0), BallIndicator("l2", y, eps)], config)
    margin = eps - float(np.linalg.norm(A.forward(res.x) - y))
    return _finish(problem, SolverOutcome(f_hat=res.x, iterations=res.iterations, objective=res.objective,
                         duality_gap=res.duality_gap, feasibility_margin=margin,
                         converged=res.converged, engine="pdhg",
                         primal_residual=res.primal_residual, dual_residual=res.dual_residual), config)


def solve_alasso(problem, config=None, engine="admm"):
    """Analysis LASSO by ADMM (default) or by the PDHG engine.

    ``feasibility_margin`` is ``mu ||D^T D||_{1,1} - ||D^T A^T (A f - y)||_inf``,
    nonnegative at an exact minimizer.
    """
    config = config or SolverConfig()
    A, F, y, mu = problem.sensing, problem.frame, problem.y, problem.param
    D = F.D
    if engine == "admm":
        res = admm_alasso(A.to_dense(), D, y, mu, config)
        f = res.f
    elif engine == "pdhg":
        res = pdhg_solve([DenseOp(D.T), A], [L1Norm(mu), SquaredDistance(y)], config)
        f = res.x
    else:
        raise ValueError(f"unknown engine {engine!r}")
    margin = mu * norm_11(F) - _residual_correlation(A, D, f, y)
    return _finish(problem, SolverOutcome(f_hat=f, iterations=res.iterations, objective=res.objective,
                         duality_gap=res.duality_gap, feasibility_margin=margin,
                         converged=res.converged, engine=engine,
                         primal_residual=res.primal_residual, dual_residual=res.dual_residual), config)


def separation_problem(problem):
    """The augmented problem on ``Phi = [A, I]`` and ``W = blockdiag(D, Omega)``."""
    if problem.separation is None:
        raise ValueError("problem has no separation data")
    A = problem.sensing
    m = A.output_dim
    omega = problem.separation.omega or build_frame("identity", m)
    if omega.n != m:
        raise ValueError(f"omega has {omega.n} rows but there are {m} measurements")
    phi = HConcat(A, ScaledIdentity(m))
    W = block_diag_frame(problem.frame, omega)
    return RecoveryProblem(sensing=phi, frame=W, y=problem.y, method=problem.method,
                           param=problem.param)


def solve_separation(problem, variant=None, config=None, engine="admm"):
    """Solve SABP / SADS / SALASSO and split ``u`` into ``(f_hat, e_hat)``.

    ``variant`` may be given as ``'sabp'``, ``'sads'``, ``'salasso'`` or the
    base method name; it defaults to ``problem.method``.
    """
    if variant is not None:
        base = variant[1:] if variant.startswith("s") and variant[1:] in METHODS else variant
        if base != problem.method:
            raise ValueError(f"variant {variant!r} does not match method {problem.method!r}")
    aug = separation_problem(problem)
    n = problem.sensing.input_dim
    out = _dispatch(aug, config, engine)
    u = out.f_hat
    out.f_hat, out.e_hat = u[:n].copy(), u[n:].copy()
    return out


def _dispatch(problem, config, engine):
    if problem.method == "ads":
        return solve_ads(problem, config)
    if problem.method == "abp":
        return solve_abp(problem, config)
    return solve_alasso(problem, config, engine=engine)


def solve(problem, config=None, engine="admm"):
    """Solve ``problem``, using the separation form when it carries separation data."""
    if problem.separation is not None:
        return solve_separation(problem, config=config, engine=engine)
    return _dispatch(problem, config, engine)
