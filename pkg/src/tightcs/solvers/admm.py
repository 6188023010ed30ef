"""ADMM for the analysis LASSO ``min 1/2 ||A f - y||^2 + mu ||D^T f||_1``.

Splitting ``x = D^T f`` with scaled dual ``w``::

    f = (A^T A + rho D D^T)^-1 (A^T y + rho D (x - w))
    x = soft(D^T f + w, mu / rho)
    w = w + D^T f - x

Tightness (``D D^T = I``) turns the f-update into one fixed
``A^T A + rho I`` system, factored once.
"""

from dataclasses import dataclass

import numpy as np

from ..linalg import cholesky_factor
from .pdhg import SolverConfig
from .prox import prox_l1

__all__ = ["ADMMResult", "admm_alasso"]


@dataclass
class ADMMResult:
    f: np.ndarray
    x: np.ndarray
    w: np.ndarray
    iterations: int
    objective: float
    duality_gap: float
    primal_residual: float
    dual_residual: float
    converged: bool


def _alasso_gap(A, D, f, y, mu):
    """Relative gap against the dual point ``theta = A f - y``."""
    theta = A @ f - y
    primal = 0.5 * theta @ theta + mu * np.abs(D.T @ f).sum()
    dual = -0.5 * theta @ theta - theta @ y
    return primal, abs(primal - dual) / (1.0 + abs(primal) + abs(dual))


def admm_alasso(A, D, y, mu, config=None, rho=None):
    config = config or SolverConfig()
    rho = config.admm_rho if rho is None else float(rho)
    if rho <= 0:
        raise ValueError("rho must be positive")
    A = np.asarray(A, dtype=np.float64)
    D = np.asarray(D, dtype=np.float64)
    n, d = D.shape
    chol = cholesky_factor(A.T @ A + rho * np.eye(n))
    Aty = A.T @ y
    f = np.zeros(n)
    x = np.zeros(d)
    w = np.zeros(d)
    thresh = mu / rho
    converged = False
    r_p = r_d = np.inf
    it = 0
    for it in range(1, config.max_iter + 1):
        f = chol.solve(Aty + rho * (D @ (x - w)))
        Df = D.T @ f
        x_old = x
        x = prox_l1(Df + w, thresh)
        resid = Df - x
        w = w + resid
        if it % config.check_every == 0 or it == config.max_iter:
            r_p = np.linalg.norm(resid) / (1.0 + max(np.linalg.norm(Df), np.linalg.norm(x)))
            r_d = rho * np.linalg.norm(D @ (x - x_old)) / (1.0 + rho * np.linalg.norm(D @ w))
            if r_p <= config.tol_primal and r_d <= config.tol_dual:
                converged = True
                break
    objective, gap = _alasso_gap(A, D, f, y, mu)
    return ADMMResult(f=f, x=x, w=w, iterations=it, objective=float(objective),
                      duality_gap=float(gap), primal_residual=float(r_p),
                      dual_residual=float(r_d), converged=converged)
