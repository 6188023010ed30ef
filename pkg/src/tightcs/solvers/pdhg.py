"""Primal-dual hybrid gradient engine for ``min_x sum_b F_b(K_b x)``.

Each row block ``K_b`` of ``K`` carries a term ``F_b`` whose convex
conjugate has a cheap proximal map: a weighted l1 norm, the indicator of an
l2 or l-infinity ball, or a squared distance.  The iteration is the plain
Chambolle-Pock scheme with over-relaxation 1 and no primal term::

    y+ = prox_{sigma F*}(y + sigma K xbar)
    x+ = x - tau K^T y+
    xbar = 2 x+ - x

Row blocks are rescaled to unit norm before iterating (the problem is
unchanged), which keeps the default step ``tau = sigma = 0.99 / ||K||``
effective when blocks such as ``D^T`` and ``D^T A^T A`` differ in scale.

With ``restart=True`` the run is split into epochs.  Every
``restart_every`` iterations the KKT error of the current iterate and of
the epoch average are compared.  The iteration restarts from the better
of the two when its KKT error has shrunk by ``restart_factor`` since the
last restart, when it has shrunk by 0.8 but stopped improving, or when the
epoch has lasted 36% of the run so far; the primal weight ``w``
(``tau = step / w``, ``sigma = step * w``) is then rebalanced from the
distance travelled by each variable.  This recovers
linear convergence on the polyhedral programs where the plain scheme
crawls (nearly tight l-infinity constraints in particular).
"""

from dataclasses import dataclass

import numpy as np

from ..linalg import DenseOp, LinOp, VStack, power_iteration_norm
from .prox import project_ball

__all__ = [
    "SolverConfig",
    "L1Norm",
    "BallIndicator",
    "SquaredDistance",
    "PDHGResult",
    "pdhg_solve",
    "auto_steps",
]


@dataclass(frozen=True)
class SolverConfig:
    max_iter: int = 20000
    tol_primal: float = 1e-9
    tol_dual: float = 1e-9
    tol_gap: float = 1e-8
    pdhg_steps: tuple = None
    admm_rho: float = 1.0
    norm_K_iters: int = 200
    check_every: int = 10
    balance: bool = True
    restart: bool = True
    restart_every: int = 64
    restart_factor: float = 0.2


class L1Norm:
    """``weight * ||z||_1``."""

    def __init__(self, weight=1.0):
        self.weight = float(weight)

    def value(self, z):
        return self.weight * np.abs(z).sum()

    def violation(self, z):
        return 0.0

    def conj_prox(self, v, sigma):
        return np.clip(v, -self.weight, self.weight)

    def conj_value(self, y):
        return 0.0

    def scaled(self, c):
        return L1Norm(self.weight / c)


class BallIndicator:
    """Indicator of ``{z : ||z - center|| <= radius}`` in the l2 or l-inf norm."""

    def __init__(self, kind, center, radius):
        if kind not in ("l2", "linf"):
            raise ValueError(f"unknown ball kind {kind!r}")
        self.kind = kind
        self.center = np.asarray(center, dtype=np.float64)
        self.radius = float(radius)

    def _norm(self, z):
        return np.linalg.norm(z) if self.kind == "l2" else np.max(np.abs(z), initial=0.0)

    def value(self, z):
        return 0.0

    def violation(self, z):
        return max(self._norm(z - self.center) - self.radius, 0.0)

    def conj_prox(self, v, sigma):
        return v - sigma * project_ball(v / sigma, self.kind, self.center, self.radius)

    def conj_value(self, y):
        dual_norm = np.linalg.norm(y) if self.kind == "l2" else np.abs(y).sum()
        return self.center @ y + self.radius * dual_norm

    def scaled(self, c):
        return BallIndicator(self.kind, c * self.center, c * self.radius)


class SquaredDistance:
    """``weight / 2 * ||z - center||^2``."""

    def __init__(self, center, weight=1.0):
        self.center = np.asarray(center, dtype=np.float64)
        self.weight = float(weight)

    def value(self, z):
        r = z - self.center
        return 0.5 * self.weight * (r @ r)

    def violation(self, z):
        return 0.0

    def conj_prox(self, v, sigma):
        return (v - sigma * self.center) / (1.0 + sigma / self.weight)

    def conj_value(self, y):
        return self.center @ y + (y @ y) / (2.0 * self.weight)

    def scaled(self, c):
        return SquaredDistance(c * self.center, self.weight / c**2)


@dataclass
class PDHGResult:
    x: np.ndarray
    y: list
    iterations: int
    objective: float
    duality_gap: float
    primal_residual: float
    dual_residual: float
    feasibility_violation: float
    converged: bool
    tau: float
    sigma: float
    norm_K: float


def auto_steps(norm_K):
    step = 0.99 / norm_K if norm_K > 0 else 1.0
    return step, step


def _block_norm(op, iters):
    return power_iteration_norm(op, iters=iters, seed=0)


def pdhg_solve(K, terms, config=None, x0=None):
    """Minimize ``sum_b terms[b](K_b x)`` by primal-dual hybrid gradient.

    Parameters
    ----------
    K : VStack or sequence of LinOp
        Row blocks sharing the primal input.
    terms : sequence
        One term per block (:class:`L1Norm`, :class:`BallIndicator`,
        :class:`SquaredDistance`).
    config : SolverConfig, optional
    x0 : ndarray, optional
        Starting primal point (default zero).

    Returns
    -------
    PDHGResult
        The last iterate; ``converged`` is False when ``max_iter`` is hit.
    """
    config = config or SolverConfig()
    ops = list(K.ops) if isinstance(K, VStack) else list(K)
    if len(ops) != len(terms):
        raise ValueError(f"{len(ops)} blocks but {len(terms)} terms")
    n = ops[0].input_dim

    if config.balance:
        scales = []
        for op in ops:
            nb = _block_norm(op, config.norm_K_iters)
            scales.append(1.0 / nb if nb > 0 else 1.0)
    else:
        scales = [1.0] * len(ops)
    sterms = [t.scaled(c) for t, c in zip(terms, scales)]

    blocks = []
    for op, c in zip(ops, scales):
        M = op.to_dense() if op.output_dim * op.input_dim <= 4_000_000 else None
        blocks.append(DenseOp(c * M) if M is not None else _ScaledOp(op, c))
    Kop = VStack(*blocks)
    dense = all(isinstance(b, DenseOp) for b in blocks)
    Kmat = Kop.to_dense() if dense else None
    fwd = (lambda v: Kmat @ v) if dense else Kop._forward
    adj = (lambda w: Kmat.T @ w) if dense else Kop._adjoint

    norm_K = 1.01 * power_iteration_norm(Kop, iters=config.norm_K_iters, seed=0)
    if config.pdhg_steps is None:
        tau, sigma = auto_steps(norm_K)
    else:
        tau, sigma = (float(s) for s in config.pdhg_steps)
        if tau <= 0 or sigma <= 0 or tau * sigma * norm_K**2 > 1.0:
            raise ValueError(
                f"step sizes tau={tau}, sigma={sigma} violate tau*sigma*||K||^2 <= 1 "
                f"(||K|| ~ {norm_K:.4g})"
            )

    offs = Kop.offsets
    slices = [slice(a, b) for a, b in zip(offs[:-1], offs[1:])]
    x = np.zeros(n) if x0 is None else np.array(x0, dtype=np.float64)
    xbar = x.copy()
    y = np.zeros(Kop.output_dim)
    restart = config.restart and config.pdhg_steps is None
    step = float(np.sqrt(tau * sigma))
    weight = 1.0
    x_sum, y_sum, count = np.zeros_like(x), np.zeros_like(y), 0
    x_anchor, y_anchor = x.copy(), y.copy()
    last_kkt = prev_kkt = np.inf
    stats = None
    converged = False
    it = 0
    for it in range(1, config.max_iter + 1):
        v = y + sigma * fwd(xbar)
        y_new = np.empty_like(y)
        for sl, t in zip(slices, sterms):
            y_new[sl] = t.conj_prox(v[sl], sigma)
        x_new = x - tau * adj(y_new)
        check = it % config.check_every == 0 or it == config.max_iter
        if check:
            stats = _stats(fwd, x_new, x, xbar, y_new, y, tau, sigma, slices, sterms, terms, scales)
            converged = (
                stats["primal"] <= config.tol_primal
                and stats["feas"] <= config.tol_primal
                and stats["dual"] <= config.tol_dual
                and stats["gap"] <= config.tol_gap
            )
        xbar = 2.0 * x_new - x
        x, y = x_new, y_new
        if converged:
            break
        if restart:
            x_sum += x
            y_sum += y
            count += 1
            if count % config.restart_every == 0:
                xa, ya = x_sum / count, y_sum / count
                k_cur = _kkt(fwd, adj, x, y, slices, sterms)
                k_avg = _kkt(fwd, adj, xa, ya, slices, sterms)
                xc, yc, kc = (xa, ya, k_avg) if k_avg < k_cur else (x, y, k_cur)
                stalled = kc <= 0.8 * last_kkt and kc > prev_kkt
                artificial = count >= 0.36 * it
                prev_kkt = kc
                if kc <= config.restart_factor * last_kkt or stalled or artificial:
                    dx = np.linalg.norm(xc - x_anchor)
                    dy = np.linalg.norm(yc - y_anchor)
                    if dx > 1e-14 and dy > 1e-14:
                        weight = float(np.exp(0.5 * np.log(dy / dx) + 0.5 * np.log(weight)))
                        tau, sigma = step / weight, step * weight
                    x, y = xc.copy(), yc.copy()
                    xbar = x.copy()
                    x_anchor, y_anchor = x.copy(), y.copy()
                    x_sum[:], y_sum[:], count = 0.0, 0.0, 0
                    last_kkt = kc
                    prev_kkt = np.inf

    if stats is None:
        stats = _stats(fwd, x, x, x, y, y, tau, sigma, slices, sterms, terms, scales)
    return PDHGResult(
        x=x,
        y=[y[sl] * c for sl, c in zip(slices, scales)],
        iterations=it,
        objective=stats["objective"],
        duality_gap=stats["gap"],
        primal_residual=stats["primal"],
        dual_residual=stats["dual"],
        feasibility_violation=stats["feas"],
        converged=converged,
        tau=tau,
        sigma=sigma,
        norm_K=norm_K,
    )


class _ScaledOp(LinOp):
    kind = "scaled"

    def __init__(self, op, c):
        super().__init__(op.output_dim, op.input_dim)
        self.op, self.c = op, c

    def _forward(self, x):
        return self.c * self.op._forward(x)

    def _adjoint(self, w):
        return self.c * self.op._adjoint(w)


def _kkt(fwd, adj, x, y, slices, sterms):
    """Scale-free KKT error of ``(x, y)`` for the balanced problem."""
    Kx = fwd(x)
    feas = 0.0
    primal = 0.0
    dual_obj = 0.0
    for sl, t in zip(slices, sterms):
        feas = max(feas, t.violation(Kx[sl]))
        primal += t.value(Kx[sl])
        dual_obj -= t.conj_value(y[sl])
    station = np.linalg.norm(adj(y))
    gap = abs(primal - dual_obj) / (1.0 + abs(primal) + abs(dual_obj))
    return float(np.sqrt(feas**2 + station**2 + gap**2))


def _stats(fwd, x_new, x_old, xbar, y_new, y_old, tau, sigma, slices, sterms, terms, scales):
    Kx = fwd(x_new)
    dual = np.linalg.norm(x_old - x_new) / tau / (1.0 + np.linalg.norm(y_new))
    primal = np.linalg.norm(fwd(xbar - x_new) - (y_new - y_old) / sigma) / (1.0 + np.linalg.norm(Kx))
    objective = 0.0
    dual_obj = 0.0
    feas = 0.0
    for sl, st, t, c in zip(slices, sterms, terms, scales):
        z = Kx[sl] / c
        objective += t.value(z)
        dual_obj -= st.conj_value(y_new[sl])
        if isinstance(t, BallIndicator):
            feas = max(feas, t.violation(z) / (1.0 + t.radius))
    gap = abs(objective - dual_obj) / (1.0 + abs(objective) + abs(dual_obj))
    return {"objective": float(objective), "gap": float(gap), "primal": float(primal),
            "dual": float(dual), "feas": float(feas)}
