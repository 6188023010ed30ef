"""Noise models and closed-form noise thresholds.

All logarithms are natural logarithms.
"""

import math
from dataclasses import dataclass

import numpy as np

from .frames import TightFrame
from .rng import make_rng

__all__ = [
    "NoiseSpec",
    "NoiseDraw",
    "ThresholdReport",
    "draw_noise",
    "ads_lambda",
    "alasso_mu",
    "correlation_threshold",
    "l2_noise_bound",
    "threshold_report",
]

NOISE_MODELS = ("none", "gaussian", "bounded", "sparse", "composite")


@dataclass(frozen=True)
class NoiseSpec:
    """Noise description.

    ``model`` is one of none, gaussian (``sigma``), bounded (``epsilon``),
    sparse (``omega``, ``s_prime``, ``amplitude``) or composite (gaussian
    plus sparse).  ``omega=None`` means the identity frame.
    """

    model: str = "gaussian"
    sigma: float = 0.0
    epsilon: float = 0.0
    omega: TightFrame = None
    s_prime: int = 0
    amplitude: float = 1.0

    def __post_init__(self):
        if self.model not in NOISE_MODELS:
            raise ValueError(f"unknown noise model {self.model!r}")
        if self.sigma < 0 or self.epsilon < 0 or self.s_prime < 0:
            raise ValueError("sigma, epsilon and s_prime must be nonnegative")
        if self.omega is not None and self.s_prime > self.omega.d:
            raise ValueError(f"s_prime={self.s_prime} exceeds the {self.omega.d} frame vectors of omega")

    @property
    def has_sparse(self):
        return self.model in ("sparse", "composite") and self.s_prime > 0


@dataclass
class NoiseDraw:
    z: np.ndarray
    e: np.ndarray
    analysis_sparsity: int = 0
    warning: str = ""


def draw_noise(spec, m, seed):
    """Draw ``(z, e)`` of length ``m`` for ``y = A f + z + e``.

    The sparse part is ``e = Omega x`` with ``s_prime`` entries of ``x`` set to
    ``+-amplitude``.  For orthonormal ``Omega`` this makes ``Omega^T e``
    exactly ``s_prime``-sparse; for redundant ``Omega`` the achieved analysis
    sparsity is reported and ``warning`` is set.
    """
    rng = make_rng(seed)
    z = np.zeros(m)
    e = np.zeros(m)
    out = NoiseDraw(z=z, e=e)
    if spec.model in ("gaussian", "composite") and spec.sigma > 0:
        out.z = spec.sigma * rng.standard_normal(m)
    elif spec.model == "bounded" and spec.epsilon > 0:
        u = rng.standard_normal(m)
        out.z = spec.epsilon * u / np.linalg.norm(u)
    if spec.has_sparse:
        omega = spec.omega
        M = m if omega is None else omega.d
        if omega is not None and omega.n != m:
            raise ValueError(f"omega has {omega.n} rows, expected {m}")
        x = np.zeros(M)
        pos = rng.choice(M, size=spec.s_prime, replace=False)
        x[pos] = spec.amplitude * np.where(rng.integers(0, 2, size=spec.s_prime) == 1, 1.0, -1.0)
        if omega is None:
            out.e = x
            out.analysis_sparsity = spec.s_prime
        else:
            out.e = omega.D @ x
            coeffs = omega.D.T @ out.e
            thresh = 1e-12 * max(1.0, float(np.max(np.abs(coeffs))))
            out.analysis_sparsity = int(np.sum(np.abs(coeffs) > thresh))
            if out.analysis_sparsity > spec.s_prime:
                out.warning = (
                    f"redundant omega: achieved analysis sparsity {out.analysis_sparsity} "
                    f"> requested {spec.s_prime}"
                )
    return out


def _check_d(d):
    if d < 2:
        raise ValueError(f"d must be >= 2 (log d <= 0 otherwise), got {d}")


def ads_lambda(sigma, d):
    """``2 sigma sqrt(2 log d)``."""
    _check_d(d)
    if sigma < 0:
        raise ValueError("sigma must be nonnegative")
    return 2.0 * sigma * math.sqrt(2.0 * math.log(d))


def alasso_mu(sigma, d):
    """``4 sigma sqrt(2 log d)``, twice :func:`ads_lambda`."""
    return 2.0 * ads_lambda(sigma, d)


def correlation_threshold(sigma, d, alpha, delta1):
    """High-probability bound on ``||D^T A^T z||_inf`` for Gaussian ``z``.

    Returns ``(t, p)`` with ``t = sigma sqrt(2 (1 + alpha)(1 + delta1) log d)``
    and ``p = 1 - 1 / (d^alpha sqrt((1 + alpha) pi log d))`` the probability
    floor.  ``delta1`` is the order-1 D-RIP constant; ``delta1 = 1`` gives the
    relaxed form used for the default ``lambda``.
    """
    _check_d(d)
    if alpha <= 0:
        raise ValueError("alpha must be positive")
    if not 0.0 <= delta1 <= 1.0:
        raise ValueError("delta1 must lie in [0, 1]")
    log_d = math.log(d)
    t = sigma * math.sqrt(2.0 * (1.0 + alpha) * (1.0 + delta1) * log_d)
    p = 1.0 - 1.0 / (d**alpha * math.sqrt((1.0 + alpha) * math.pi * log_d))
    return t, p


def l2_noise_bound(sigma, m):
    """``(sigma sqrt(m + 2 sqrt(m log m)), 1 - 1/m)``."""
    if m < 1:
        raise ValueError("m must be >= 1")
    return sigma * math.sqrt(m + 2.0 * math.sqrt(m * math.log(m))), 1.0 - 1.0 / m


@dataclass(frozen=True)
class ThresholdReport:
    lambda_ads: float
    mu_alasso: float
    epsilon_l2: float
    lambda_probability_floor: float
    epsilon_probability_floor: float


def threshold_report(sigma, d, m):
    """Default parameters for ADS, ALASSO and ABP under ``N(0, sigma^2)`` noise."""
    _, p_lam = correlation_threshold(sigma, d, alpha=1.0, delta1=1.0)
    eps, p_eps = l2_noise_bound(sigma, m)
    return ThresholdReport(
        lambda_ads=ads_lambda(sigma, d),
        mu_alasso=alasso_mu(sigma, d),
        epsilon_l2=eps,
        lambda_probability_floor=p_lam,
        epsilon_probability_floor=p_eps,
    )
