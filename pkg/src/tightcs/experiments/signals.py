"""Test signals: exactly analysis-sparse, synthesis-sparse and power-law."""

from dataclasses import dataclass

import numpy as np

from ..bounds import tails_from_coefficients
from ..rng import make_rng

__all__ = ["SignalSpec", "generate_signal", "SIGNAL_MODELS", "AMPLITUDE_LAWS"]

SIGNAL_MODELS = ("exact_analysis_sparse", "synthesis_sparse", "power_law")
AMPLITUDE_LAWS = ("unit", "rademacher", "gaussian")


@dataclass(frozen=True)
class SignalSpec:
    """Signal model.

    ``s`` is the sparsity for the sparse models and the number of tail
    terms reported for ``power_law``, whose coefficients are
    ``R * j^(-1/p)``.
    """

    model: str = "exact_analysis_sparse"
    s: int = 1
    R: float = 1.0
    p: float = 1.0
    amplitude_law: str = "rademacher"
    seed: int = 0

    def __post_init__(self):
        if self.model not in SIGNAL_MODELS:
            raise ValueError(f"unknown signal model {self.model!r}")
        if self.amplitude_law not in AMPLITUDE_LAWS:
            raise ValueError(f"unknown amplitude law {self.amplitude_law!r}")
        if self.s < 1:
            raise ValueError("s must be >= 1")
        if self.model == "power_law" and not (self.R > 0 and 0 < self.p <= 1):
            raise ValueError("power_law needs R > 0 and 0 < p <= 1")


def _amplitudes(law, k, rng):
    if law == "unit":
        return np.ones(k)
    if law == "rademacher":
        return np.where(rng.integers(0, 2, size=k) == 1, 1.0, -1.0)
    return rng.standard_normal(k)


def generate_signal(spec, F, seed=None):
    """Draw ``f`` and its analysis tails ``l1_tail(D^T f, k)`` for ``k = 1..s``.

    Parameters
    ----------
    spec : SignalSpec
    F : TightFrame
    seed : int, optional
        Overrides ``spec.seed``.

    Returns
    -------
    f : ndarray, shape (n,)
    tails : ndarray, shape (s,)
    """
    rng = make_rng(spec.seed if seed is None else seed)
    n, d = F.n, F.d
    if spec.s > d:
        raise ValueError(f"s={spec.s} exceeds the {d} frame vectors")
    if spec.model in ("exact_analysis_sparse", "power_law") and not F.is_orthonormal:
        raise ValueError(
            f"{spec.model} needs an orthonormal frame (d = n) to place analysis "
            f"coefficients exactly; use synthesis_sparse for a redundant frame"
        )
    x = np.zeros(d)
    if spec.model == "power_law":
        mags = spec.R * np.arange(1, d + 1, dtype=np.float64) ** (-1.0 / spec.p)
        signs = np.where(rng.integers(0, 2, size=d) == 1, 1.0, -1.0)
        x[rng.permutation(d)] = signs * mags
    else:
        pos = rng.choice(d, size=spec.s, replace=False)
        x[pos] = _amplitudes(spec.amplitude_law, spec.s, rng)
    f = F.D @ x
    return f, tails_from_coefficients(F.D.T @ f, spec.s)
