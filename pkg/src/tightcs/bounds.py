"""Error-bound, minimax and power-law risk calculators.

Every calculator returns the raw formula value, even when it exceeds a
trivial bound such as ``||f||_2``.  Per-``k`` bounds use one D-RIP number
``delta`` for every ``k``: the order-``3k`` constants are dominated by the
order-``3s`` one.
"""

import json
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .linalg import as_matrix, sym_eig

__all__ = [
    "HypothesisError",
    "BoundInputs",
    "BoundReport",
    "l1_tail",
    "tails_from_coefficients",
    "ads_bound",
    "alasso_bound",
    "abp_bound",
    "separation_bound",
    "minimax_lower",
    "minimax_trace",
    "power_law_risk",
]


class HypothesisError(ValueError):
    """A bound was requested outside the range where it is proved."""


def l1_tail(x, k):
    """``||x - x_[k]||_1``: the l1 mass outside the ``k`` largest magnitudes."""
    a = np.abs(np.asarray(x, dtype=np.float64).ravel())
    if not 0 <= k <= a.size:
        raise ValueError(f"k must lie in [0, {a.size}], got {k}")
    if k == 0:
        return float(a.sum())
    # the k largest are excluded; partition avoids a full sort
    return float(np.partition(a, a.size - k)[: a.size - k].sum())


def tails_from_coefficients(coeffs, s):
    """``[l1_tail(coeffs, k) for k = 1..s]``."""
    return np.array([l1_tail(coeffs, k) for k in range(1, s + 1)])


@dataclass
class BoundInputs:
    """Inputs shared by the per-``k`` bounds.

    ``tails[k - 1]`` is ``||D^T f - (D^T f)_[k]||_1``.  ``param`` is
    ``lambda``, ``mu`` or ``epsilon`` according to the bound.
    """

    delta: float
    s: int
    param: float
    tails: np.ndarray = None
    s_prime: int = 0
    norm11: float = 1.0

    def __post_init__(self):
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.s_prime < 0:
            raise ValueError("s_prime must be >= 0")
        if self.param < 0:
            raise ValueError("the noise parameter must be nonnegative")
        self.tails = np.zeros(self.s) if self.tails is None else np.asarray(self.tails, dtype=np.float64)
        if self.tails.shape != (self.s,):
            raise ValueError(f"tails must have length s={self.s}, got {self.tails.shape}")
        if np.any(self.tails < 0):
            raise ValueError("tails must be nonnegative")
        if np.any(np.diff(self.tails) > 1e-12 * max(1.0, float(self.tails[0]))):
            raise ValueError("tails must be nonincreasing in k")


@dataclass
class BoundReport:
    per_k: np.ndarray
    k_star: int
    bound: float
    constants_used: dict = field(default_factory=dict)

    def to_dict(self):
        d = asdict(self)
        d["per_k"] = [float(v) for v in self.per_k]
        return d

    def to_json(self):
        return json.dumps(self.to_dict(), sort_keys=True)


def _report(per_k, constants):
    per_k = np.asarray(per_k, dtype=np.float64)
    i = int(np.argmin(per_k))
    return BoundReport(per_k=per_k, k_star=i + 1, bound=float(per_k[i]), constants_used=constants)


def _check_delta(delta, limit, name):
    if delta < 0:
        raise ValueError("delta must be nonnegative")
    if delta >= limit:
        raise HypothesisError(
            f"hypothesis violated: {name} requires the D-RIP constant delta_3s < {limit}, got {delta}"
        )


def _dantzig_per_k(inputs):
    d = inputs.delta
    k = np.arange(1, inputs.s + 1, dtype=np.float64)
    r = np.sqrt(k + inputs.s_prime)
    c0 = 4.0 * math.sqrt(2.0) / (1.0 - 2.0 * d)
    c1 = 2.0 / (1.0 - 2.0 * d)
    return c0 * r * inputs.param + c1 * inputs.tails / r, {"C0": c0, "C1": c1, "delta": d}


def _lasso_per_k(inputs):
    d = inputs.delta
    k = np.arange(1, inputs.s + 1, dtype=np.float64)
    r = np.sqrt(k + inputs.s_prime)
    c0 = 2.0 * math.sqrt(2.0) * (1.0 + 2.0 * inputs.norm11) / (1.0 - 4.0 * d)
    c1 = 4.0 / (1.0 - 4.0 * d)
    return c0 * r * inputs.param + c1 * inputs.tails / r, {
        "C0": c0, "C1": c1, "delta": d, "norm11": inputs.norm11}


def ads_bound(inputs):
    """Dantzig selector bound ``4 sqrt(2k) lambda / (1 - 2 delta) + 2 tail_k / ((1 - 2 delta) sqrt k)``.

    Requires ``delta < 1/2``; ``inputs.param`` is ``lambda``.

    Examples
    --------
    >>> round(ads_bound(BoundInputs(delta=0.0, s=1, param=1.0)).bound, 5)
    5.65685
    """
    _check_delta(inputs.delta, 0.5, "the analysis Dantzig selector bound")
    per_k, consts = _dantzig_per_k(inputs)
    return _report(per_k, consts)


def alasso_bound(inputs):
    """ALASSO bound ``2 sqrt 2 (1 + 2 ||D^T D||_{1,1}) sqrt(k) mu / (1 - 4 delta) + 4 tail_k / ((1 - 4 delta) sqrt k)``.

    Requires ``delta < 1/4``; ``inputs.param`` is ``mu``.
    """
    _check_delta(inputs.delta, 0.25, "the analysis LASSO bound")
    per_k, consts = _lasso_per_k(inputs)
    return _report(per_k, consts)


def abp_bound(tail_s, s, epsilon, C2, C3, s_prime=0):
    """``C2 tail_s / sqrt(s + s') + C3 epsilon`` with caller-supplied constants."""
    if s < 1 or s_prime < 0:
        raise ValueError("need s >= 1 and s_prime >= 0")
    if tail_s < 0 or epsilon < 0:
        raise ValueError("tail and epsilon must be nonnegative")
    return C2 * tail_s / math.sqrt(s + s_prime) + C3 * epsilon


def separation_bound(variant, inputs, C4=None, C5=None):
    """Bounds for the separation programs, with ``sqrt(k)`` replaced by ``sqrt(k + s')``.

    ``variant`` is ``'sads'`` or ``'salasso'`` (closed-form constants, with
    ``delta`` the W-RIP constant of ``[A, I]``) or ``'sabp'``, which needs
    ``C4`` (noise) and ``C5`` (tail) and evaluates at ``k = s`` only.
    """
    if variant == "sads":
        _check_delta(inputs.delta, 0.5, "the separation Dantzig selector bound")
        per_k, consts = _dantzig_per_k(inputs)
    elif variant == "salasso":
        _check_delta(inputs.delta, 0.25, "the separation LASSO bound")
        per_k, consts = _lasso_per_k(inputs)
    elif variant == "sabp":
        if C4 is None or C5 is None:
            raise ValueError("sabp needs caller-supplied constants C4 and C5")
        value = abp_bound(float(inputs.tails[-1]), inputs.s, inputs.param, C5, C4, inputs.s_prime)
        return BoundReport(per_k=np.array([value]), k_star=inputs.s, bound=float(value),
                           constants_used={"C4": C4, "C5": C5})
    else:
        raise ValueError(f"unknown separation variant {variant!r}")
    consts["s_prime"] = inputs.s_prime
    return _report(per_k, consts)


def minimax_lower(s, sigma, delta_s, mode="expectation"):
    """Minimax lower bound for ``s``-dimensional coefficient estimation.

    Returns ``(value, floor)``: ``s sigma^2 / (1 + delta_s)`` with floor
    ``None`` in expectation mode, or half that value with probability floor
    ``1 - exp(-s/16)`` in ``'high_probability'`` mode.
    """
    if delta_s < 0:
        raise ValueError("delta_s must be nonnegative")
    base = s * sigma**2 / (1.0 + delta_s)
    if mode == "expectation":
        return base, None
    if mode == "high_probability":
        return base / 2.0, 1.0 - math.exp(-s / 16.0)
    raise ValueError(f"unknown mode {mode!r}")


def minimax_trace(Phi, sigma):
    """Least-squares risk ``sigma^2 trace((Phi^T Phi)^-1)`` over a fixed support.

    Returns ``math.inf`` (the unbounded flag) when an eigenvalue of
    ``Phi^T Phi`` falls below ``1e-12`` times the largest.
    """
    Phi = as_matrix(Phi, "Phi")
    evals, _ = sym_eig(Phi.T @ Phi)
    top = float(evals[0]) if evals.size else 0.0
    if top <= 0 or np.any(evals <= 1e-12 * top):
        return math.inf
    return float(sigma**2 * np.sum(1.0 / evals))


def power_law_risk(R, p, sigma, d, s, C0=1.0):
    """``min_k C0 (sigma^2 k log d + R^2 k^(1 - 2/p))`` over ``k = 1..s``.

    ``d`` may be a float (``math.e`` gives ``log d = 1``) but must be >= 2.
    """
    if not 0 < p <= 1:
        raise ValueError(f"p must lie in (0, 1], got {p}")
    if d < 2:
        raise ValueError(f"d must be >= 2, got {d}")
    if s < 1:
        raise ValueError("s must be >= 1")
    k = np.arange(1, s + 1, dtype=np.float64)
    per_k = C0 * (sigma**2 * k * math.log(d) + R**2 * k ** (1.0 - 2.0 / p))
    return _report(per_k, {"C0": C0, "R": R, "p": p})
