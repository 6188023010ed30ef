"""Random measurement ensembles and D-RIP constants.

The D-RIP constant of order ``s`` of ``A`` with respect to ``D`` is the
smallest ``delta`` with

    (1 - delta) ||D v||^2 <= ||A D v||^2 <= (1 + delta) ||D v||^2

for every ``s``-sparse ``v``.  :func:`drip_exact` computes it by enumerating
supports and solving a small generalized eigenproblem per support;
:func:`drip_monte_carlo` only samples and therefore returns a lower bound.
"""

import itertools
import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np
from scipy.optimize import minimize

from .frames import TightFrame, random_onb
from .linalg import DenseOp, HConcat, LinOp, ScaledIdentity, as_matrix, generalized_sym_eig
from .mmio import read_matrix
from .rng import hash64, make_rng

__all__ = [
    "SensingSpec",
    "DRipReport",
    "draw_sensing",
    "support_delta",
    "drip_exact",
    "drip_monte_carlo",
    "concentration_probe",
    "gaussian_hconcat",
    "sample_size_advisor",
    "design_low_rip",
    "designed_sensing",
    "EXACT_BUDGET",
]

EXACT_BUDGET = 10**6
NULL_TOL = 1e-10


@dataclass(frozen=True)
class SensingSpec:
    """``kind`` is one of gaussian, bernoulli, from_file."""

    kind: str
    m: int
    n: int
    seed: int = 0
    path: str = None

    def __post_init__(self):
        if self.kind != "from_file" and (self.m < 1 or self.n < 1):
            raise ValueError(f"sensing dims must be positive, got m={self.m}, n={self.n}")


@dataclass
class DRipReport:
    s: int
    mode: str
    delta: float
    supports_examined: int
    is_certificate: bool
    worst_support: tuple = field(default=())

    def to_dict(self):
        out = asdict(self)
        out["worst_support"] = list(self.worst_support)
        return out

    def to_json(self, **kwargs):
        return json.dumps(self.to_dict(), **kwargs)


def draw_sensing(spec):
    """Draw the ``m x n`` measurement matrix described by ``spec``.

    Gaussian entries are i.i.d. ``N(0, 1/m)``; Bernoulli entries are
    ``+-1/sqrt(m)`` with equal probability.  Deterministic given the seed.
    """
    if spec.kind == "from_file":
        A = read_matrix(spec.path)
        if (spec.m, spec.n) != (0, 0) and A.shape != (spec.m, spec.n):
            raise ValueError(f"{spec.path} has shape {A.shape}, expected {(spec.m, spec.n)}")
        return A
    rng = make_rng(spec.seed)
    if spec.kind == "gaussian":
        return rng.standard_normal((spec.m, spec.n)) / np.sqrt(spec.m)
    if spec.kind == "bernoulli":
        signs = rng.integers(0, 2, size=(spec.m, spec.n)) * 2.0 - 1.0
        return signs / np.sqrt(spec.m)
    raise ValueError(f"unknown sensing kind {spec.kind!r}")


def _frame_matrix(F):
    return F.D if isinstance(F, TightFrame) else as_matrix(F, "D")


def support_delta(A, F, T, null_tol=NULL_TOL):
    """D-RIP deviation ``max(lam_max - 1, 1 - lam_min)`` on one support ``T``.

    Eigenvalues are those of the pencil ``(D_T^T A^T A D_T, D_T^T D_T)`` on the
    range of ``D_T^T D_T``; directions with ``D v = 0`` carry no constraint.
    """
    D = _frame_matrix(F)
    DT = D[:, list(T)]
    ADT = A @ DT
    lam = generalized_sym_eig(ADT.T @ ADT, DT.T @ DT, null_tol=null_tol)
    if lam.size == 0:
        return 0.0
    return float(max(lam[0] - 1.0, 1.0 - lam[-1]))


def drip_exact(A, F, s, budget=EXACT_BUDGET):
    """Exact D-RIP constant of order ``s`` by enumerating all supports."""
    A = as_matrix(A, "A")
    D = _frame_matrix(F)
    d = D.shape[1]
    if s < 1:
        raise ValueError("s must be >= 1")
    if A.shape[1] != D.shape[0]:
        raise ValueError(f"A is {A.shape} but D has {D.shape[0]} rows")
    s = min(int(s), d)
    count = math.comb(d, s)
    if count > budget:
        raise ValueError(
            f"exact D-RIP needs C({d}, {s}) = {count} supports, above the budget of "
            f"{budget}; use Monte Carlo mode instead"
        )
    AD = A @ D
    gram_a = AD.T @ AD
    gram_d = D.T @ D
    worst, worst_T = 0.0, ()
    for T in itertools.combinations(range(d), s):
        idx = np.ix_(T, T)
        lam = generalized_sym_eig(gram_a[idx], gram_d[idx], null_tol=NULL_TOL)
        if lam.size == 0:
            continue
        delta = max(lam[0] - 1.0, 1.0 - lam[-1])
        if delta > worst or not worst_T:
            worst, worst_T = float(delta), T
    return DRipReport(s=s, mode="exact", delta=max(worst, 0.0), supports_examined=count,
                      is_certificate=True, worst_support=tuple(int(t) for t in worst_T))


def drip_monte_carlo(A, F, s, trials=1000, seed=0):
    """Lower bound on the D-RIP constant from random ``s``-sparse directions.

    Trial ``i`` uses its own generator keyed by ``hash64(seed, i)``, so runs
    with more trials examine a superset of directions.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    A = as_matrix(A, "A")
    D = _frame_matrix(F)
    d = D.shape[1]
    s = min(int(s), d)
    worst, worst_T = 0.0, ()
    for i in range(trials):
        rng = make_rng(hash64(seed, i))
        T = np.sort(rng.choice(d, size=s, replace=False))
        v = rng.standard_normal(s)
        Dv = D[:, T] @ v
        den = Dv @ Dv
        if den <= 1e-300:
            continue
        ADv = A @ Dv
        delta = abs(ADv @ ADv / den - 1.0)
        if delta > worst:
            worst, worst_T = float(delta), tuple(int(t) for t in T)
    return DRipReport(s=s, mode="monte_carlo", delta=worst, supports_examined=trials,
                      is_certificate=False, worst_support=worst_T)


def gaussian_hconcat(m, n):
    """Factory for ``Phi = [A, I_m]`` with fresh ``A ~ N(0, 1/m)`` per call."""

    def factory(rng):
        A = rng.standard_normal((m, n)) / np.sqrt(m)
        return HConcat(DenseOp(A), ScaledIdentity(m))

    return factory


def concentration_probe(op, delta, trials=10_000, seed=0):
    """Empirical frequency of ``| ||Phi v||^2 - ||v||^2 | >= 2 delta ||v||^2``.

    Parameters
    ----------
    op : LinOp, ndarray or callable
        A fixed operator, or ``op(rng)`` returning a fresh random instance
        for each trial (see :func:`gaussian_hconcat`).
    delta : float in (0, 1)
    trials : int, >= 100
    seed : int

    Returns
    -------
    float
        Violation rate.
    """
    if not 0.0 < delta < 1.0:
        raise ValueError("delta must lie in (0, 1)")
    if trials < 100:
        raise ValueError("trials must be >= 100")
    violations = 0
    for i in range(trials):
        rng = make_rng(hash64(seed, i))
        inst = op(rng) if callable(op) and not isinstance(op, LinOp) else op
        if isinstance(inst, np.ndarray):
            inst = DenseOp(inst)
        v = rng.standard_normal(inst.input_dim)
        v /= np.linalg.norm(v)
        w = inst.forward(v)
        if abs(w @ w - 1.0) >= 2.0 * delta:
            violations += 1
    return violations / trials


def sample_size_advisor(s, s_prime, d, M, delta, C):
    """Smallest ``m`` with ``m >= C delta^-2 (s + s') log((d + M) / (s + s'))``."""
    k = s + s_prime
    if k < 1:
        raise ValueError("s + s_prime must be >= 1")
    if d + M <= k:
        raise ValueError("need d + M > s + s_prime")
    if not 0.0 < delta <= 1.0:
        raise ValueError("delta must lie in (0, 1]")
    if C <= 0:
        raise ValueError("C must be positive")
    value = C * k * math.log((d + M) / k) / delta**2
    return max(1, math.ceil(value - 1e-12 * value))


# ---------------------------------------------------------------------------
# Designed matrices with small RIP constants
# ---------------------------------------------------------------------------


def _support_eigs(B, supports):
    G = B.T @ B
    return np.linalg.eigvalsh(G[supports[:, :, None], supports[:, None, :]])


def design_low_rip(m, d, s, seed=0, target=None, restarts=40, maxiter=2000):
    """Search for an ``m x d`` matrix with a small RIP constant of order ``s``.

    Minimizes ``max_T max(lam_max - 1, 1 - lam_min)`` over all size-``s``
    supports by SLSQP on the epigraph form from seeded Gaussian starts.
    Stops early once ``target`` is beaten.  The returned value is the
    optimizer's own estimate; certify the result with :func:`drip_exact`.

    Returns
    -------
    B : ndarray, shape (m, d)
    delta : float
    """
    supports = np.array(list(itertools.combinations(range(d), s)))

    def worst(x):
        lam = _support_eigs(x.reshape(m, d), supports)
        return max((lam[:, -1] - 1).max(), (1 - lam[:, 0]).max())

    def cons(z):
        lam = _support_eigs(z[:-1].reshape(m, d), supports)
        return np.concatenate([z[-1] - (lam[:, -1] - 1), z[-1] - (1 - lam[:, 0])])

    best_x, best = None, np.inf
    for r in range(restarts):
        rng = make_rng(hash64(seed, r))
        x0 = rng.standard_normal(m * d) / np.sqrt(m)
        res = minimize(lambda z: z[-1], np.r_[x0, worst(x0)], method="SLSQP",
                       constraints=[{"type": "ineq", "fun": cons}],
                       options={"maxiter": maxiter, "ftol": 1e-12})
        val = worst(res.x[:-1])
        if val < best:
            best, best_x = val, res.x[:-1].copy()
        if target is not None and best < target:
            break
    return best_x.reshape(m, d), float(best)


def designed_sensing(B, F, rng):
    """Randomized copy of a designed matrix adapted to an orthonormal frame.

    Returns ``A = U B P S D^T`` with ``U`` Haar orthogonal, ``P`` a random
    permutation and ``S`` random signs, so ``A D = U B P S`` has exactly the
    RIP constants of ``B`` at every order.
    """
    D = _frame_matrix(F)
    if D.shape[0] != D.shape[1]:
        raise ValueError("designed sensing needs an orthonormal frame (d == n)")
    m, d = B.shape
    if d != D.shape[1]:
        raise ValueError(f"design has {d} columns, frame has {D.shape[1]}")
    U = random_onb(m, rng)
    perm = rng.permutation(d)
    signs = np.where(rng.integers(0, 2, size=d) == 1, 1.0, -1.0)
    return (U @ B[:, perm] * signs) @ D.T
