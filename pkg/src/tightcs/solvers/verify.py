"""Post-hoc diagnostics for recovery outcomes.

The checks are the inequalities a true minimizer must satisfy: constraint
feasibility, the cone constraints that drive the error bounds, the ALASSO
correlation bound ``mu ||D^T D||_{1,1}``, a quantitative stationarity
residual, and objective minimality against a feasible reference signal.
"""

from dataclasses import asdict, dataclass

import numpy as np

from ..frames import norm_11
from .pdhg import SolverConfig
from .recovery import separation_problem

__all__ = ["VerificationReport", "verify_outcome", "cone_slack", "stationarity_residual"]


@dataclass
class VerificationReport:
    """Diagnostics for one outcome; ``None`` marks a check that does not apply."""

    method: str
    feasibility_margin: float
    feasible: bool
    cone_slack: float = None
    cone_holds: bool = None
    correlation: float = None
    correlation_bound: float = None
    correlation_bound_holds: bool = None
    stationarity_residual: float = None
    objective_hat: float = None
    objective_true: float = None
    true_feasible: bool = None
    minimality_holds: bool = None
    triangle_slack: float = None

    @property
    def passed(self):
        flags = [self.feasible, self.cone_holds, self.correlation_bound_holds, self.minimality_holds]
        return all(f for f in flags if f is not None)

    def to_dict(self):
        return asdict(self)


def cone_slack(h_coeffs, f_coeffs, T, a, b, c):
    """``a ||h_T||_1 + b ||f_{T^c}||_1 - c ||h_{T^c}||_1`` on analysis coefficients.

    ADS uses ``(a, b, c) = (1, 2, 1)``; ALASSO uses ``(3, 4, 1)``.
    """
    mask = np.zeros(h_coeffs.shape[0], dtype=bool)
    mask[np.asarray(T, dtype=int)] = True
    return float(a * np.abs(h_coeffs[mask]).sum() + b * np.abs(f_coeffs[~mask]).sum()
                 - c * np.abs(h_coeffs[~mask]).sum())


def stationarity_residual(A, D, f, y, mu, active_tol, iters=500):
    """Smallest ``||A^T (A f - y) + mu D v||_2`` over admissible subgradients ``v``.

    ``v`` ranges over the box ``|v_i| <= 1`` with ``v_i`` pinned to
    ``sign((D^T f)_i)`` where ``|(D^T f)_i| > active_tol``.  Minimized by
    projected gradient with step ``1 / mu^2`` (``||D|| = 1`` for a tight frame).
    """
    g = A.T @ (A @ f - y)
    if mu == 0:
        return float(np.linalg.norm(g))
    coeffs = D.T @ f
    active = np.abs(coeffs) > active_tol
    pinned = np.sign(coeffs[active])

    def project(v):
        v = np.clip(v, -1.0, 1.0)
        v[active] = pinned
        return v

    v = project(-(D.T @ g) / mu)
    step = 1.0 / mu**2
    best = np.linalg.norm(g + mu * (D @ v))
    for _ in range(iters):
        r = g + mu * (D @ v)
        v = project(v - step * mu * (D.T @ r))
        best = min(best, np.linalg.norm(g + mu * (D @ v)))
    return float(best)


def _top_support(coeffs, s):
    order = np.argsort(-np.abs(coeffs), kind="stable")
    return np.sort(order[:s])


def verify_outcome(problem, outcome, f_true=None, support_T=None, s=None, e_true=None,
                   config=None, tol=1e-6):
    """Check an outcome against the optimality and cone inequalities.

    Parameters
    ----------
    problem : RecoveryProblem
    outcome : SolverOutcome
    f_true : ndarray, optional
        Reference signal; enables the cone, minimality and triangle checks.
    support_T : array of int, optional
        Index set ``T`` for the cone constraint.  Defaults to the ``s``
        largest entries of ``D^T f_true``; ``s`` defaults to the number of
        nonzero analysis coefficients.
    e_true : ndarray, optional
        Sparse-noise reference for separation problems (zero if omitted).
    tol : float
        Relative slack allowed in the inequality checks, scaled by
        ``1 + ||D^T f_true||_1``.
    """
    config = config or SolverConfig()
    method = problem.method
    u_hat = outcome.f_hat
    u_true = f_true
    if problem.separation is not None:
        m = problem.sensing.output_dim
        e_hat = outcome.e_hat if outcome.e_hat is not None else np.zeros(m)
        u_hat = np.concatenate([outcome.f_hat, e_hat])
        if f_true is not None:
            e_ref = np.zeros(m) if e_true is None else np.asarray(e_true, dtype=np.float64)
            u_true = np.concatenate([np.asarray(f_true, dtype=np.float64), e_ref])
        problem = separation_problem(problem)

    A = problem.sensing.to_dense()
    D = problem.frame.D
    y = problem.y
    param = problem.param
    resid = A @ u_hat - y
    corr = float(np.max(np.abs(D.T @ (A.T @ resid))))
    feas_tol = 10.0 * config.tol_primal * (1.0 + param)

    if method == "ads":
        margin = param - corr
    elif method == "abp":
        margin = param - float(np.linalg.norm(resid))
    else:
        margin = param * norm_11(problem.frame) - corr
    report = VerificationReport(method=method, feasibility_margin=float(margin),
                                feasible=bool(margin >= -feas_tol))

    if method == "alasso":
        bound = param * norm_11(problem.frame)
        report.correlation = corr
        report.correlation_bound = float(bound)
        report.correlation_bound_holds = bool(corr <= bound + 10.0 * config.tol_primal * (1.0 + bound))
        report.stationarity_residual = stationarity_residual(
            A, D, u_hat, y, param, active_tol=10.0 * config.tol_primal)

    if u_true is None:
        return report

    u_true = np.asarray(u_true, dtype=np.float64)
    f_coeffs = D.T @ u_true
    h_coeffs = D.T @ (u_hat - u_true)
    scale = 1.0 + np.abs(f_coeffs).sum()
    if support_T is None:
        if s is None:
            s = int(np.sum(np.abs(f_coeffs) > 1e-12 * max(1.0, np.max(np.abs(f_coeffs)))))
        support_T = _top_support(f_coeffs, s)

    obj_hat = float(np.abs(D.T @ u_hat).sum())
    obj_true = float(np.abs(f_coeffs).sum())
    report.objective_hat = obj_hat
    report.objective_true = obj_true

    if method in ("ads", "abp"):
        true_resid = A @ u_true - y
        if method == "ads":
            true_ok = float(np.max(np.abs(D.T @ (A.T @ true_resid)))) <= param
        else:
            true_ok = float(np.linalg.norm(true_resid)) <= param
        report.true_feasible = bool(true_ok)
        if true_ok:
            report.minimality_holds = bool(obj_hat <= obj_true + tol * scale)
            report.cone_slack = cone_slack(h_coeffs, f_coeffs, support_T, 1.0, 2.0, 1.0)
            report.cone_holds = bool(report.cone_slack >= -tol * scale)
    else:
        # the cone and triangle inequalities need ||D^T A^T z||_inf <= mu / 2
        noise_corr = float(np.max(np.abs(D.T @ (A.T @ (y - A @ u_true)))))
        if noise_corr <= param / 2.0:
            report.cone_slack = cone_slack(h_coeffs, f_coeffs, support_T, 3.0, 4.0, 1.0)
            report.cone_holds = bool(report.cone_slack >= -tol * scale)
            report.triangle_slack = float(0.5 * np.abs(h_coeffs).sum() + obj_true - obj_hat)
    return report
