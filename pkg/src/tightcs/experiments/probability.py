"""Monte Carlo checks of the noise and concentration probability statements.

Event names follow the command-line interface:

``lemma1``
    ``||D^T A^T z||_inf <= sigma sqrt(2 (1 + alpha)(1 + delta_1) log d)``
    for ``z ~ N(0, sigma^2 I_m)``; compared with a success floor.
``gn``
    ``||z||_2 <= sigma sqrt(m + 2 sqrt(m log m))``; success floor ``1 - 1/m``.
``lemma6``
    ``| ||Phi v||^2 - 1 | >= 2 delta`` for ``Phi = [A, I]`` with fresh
    Gaussian ``A`` and unit ``v``; compared with the cap ``3 exp(-m delta^2 / 8)``.
"""

import math
from dataclasses import asdict, dataclass

import numpy as np

from ..frames import build_frame
from ..noise import correlation_threshold, l2_noise_bound
from ..rng import hash64, make_rng
from ..sensing import SensingSpec, concentration_probe, draw_sensing, drip_exact, gaussian_hconcat

__all__ = ["ProbeResult", "empirical_probability", "EVENTS"]

EVENTS = ("lemma1", "gn", "lemma6")


@dataclass
class ProbeResult:
    """``kind`` is ``'floor'`` (rate should be at least ``bound``) or ``'cap'`` (at most)."""

    event: str
    rate: float
    bound: float
    kind: str
    trials: int
    binomial_sd: float
    params: dict

    @property
    def consistent(self):
        """Rate within three binomial standard deviations of the right side of the bound."""
        if self.kind == "floor":
            return self.rate >= self.bound - 3.0 * self.binomial_sd
        return self.rate <= self.bound + 3.0 * self.binomial_sd

    def to_dict(self):
        d = asdict(self)
        d["consistent"] = self.consistent
        return d


def _binomial_sd(p, trials):
    p = min(max(p, 0.0), 1.0)
    return math.sqrt(p * (1.0 - p) / trials)


def _lemma1(params, trials, seed):
    sigma = float(params.get("sigma", 1.0))
    m = int(params.get("m", 100))
    n = int(params.get("n", m))
    d = int(params.get("d", n))
    alpha = float(params.get("alpha", 1.0))
    frame_kind = params.get("frame", "identity" if d == n else "random_parseval")
    F = build_frame(frame_kind, n, d, seed=hash64(seed, 0))
    A = draw_sensing(SensingSpec(params.get("sensing", "gaussian"), m, n, seed=hash64(seed, 1)))
    delta1 = params.get("delta1")
    if delta1 is None:
        delta1 = drip_exact(A, F, 1).delta
    delta1 = float(delta1)
    if delta1 > 1.0:
        raise ValueError(f"order-1 D-RIP constant {delta1:.4f} exceeds 1; the threshold needs delta1 <= 1")
    threshold, floor = correlation_threshold(sigma, d, alpha, delta1)
    M = F.D.T @ A.T
    hits = 0
    for i in range(trials):
        z = sigma * make_rng(hash64(seed, 2, i)).standard_normal(m)
        if np.max(np.abs(M @ z)) <= threshold:
            hits += 1
    used = {"sigma": sigma, "m": m, "n": n, "d": d, "alpha": alpha, "delta1": delta1,
            "threshold": threshold}
    return hits / trials, floor, "floor", used


def _gn(params, trials, seed):
    sigma = float(params.get("sigma", 1.0))
    m = int(params.get("m", 100))
    bound, floor = l2_noise_bound(sigma, m)
    hits = 0
    for i in range(trials):
        z = sigma * make_rng(hash64(seed, i)).standard_normal(m)
        if np.linalg.norm(z) <= bound:
            hits += 1
    return hits / trials, floor, "floor", {"sigma": sigma, "m": m, "bound": bound}


def _lemma6(params, trials, seed):
    m = int(params.get("m", 200))
    n = int(params.get("n", m))
    delta = float(params.get("delta", 0.5))
    rate = concentration_probe(gaussian_hconcat(m, n), delta, trials=trials, seed=seed)
    cap = 3.0 * math.exp(-m * delta**2 / 8.0)
    return rate, cap, "cap", {"m": m, "n": n, "delta": delta}


def empirical_probability(event, params=None, trials=10_000, seed=0):
    """Monte Carlo rate of ``event`` next to its theoretical floor or cap.

    Parameters
    ----------
    event : {'lemma1', 'gn', 'lemma6'}
    params : dict
        lemma1: sigma, m, n, d, alpha, delta1 (exact order-1 constant of the
        drawn ``A`` when omitted), frame, sensing.  gn: sigma, m.
        lemma6: m, n, delta.
    trials : int, >= 1000
    seed : int
    """
    if trials < 1000:
        raise ValueError("trials must be >= 1000")
    params = dict(params or {})
    if event == "lemma1":
        rate, bound, kind, used = _lemma1(params, trials, seed)
    elif event == "gn":
        rate, bound, kind, used = _gn(params, trials, seed)
    elif event == "lemma6":
        rate, bound, kind, used = _lemma6(params, trials, seed)
    else:
        raise ValueError(f"unknown event {event!r}; expected one of {EVENTS}")
    return ProbeResult(event=event, rate=rate, bound=bound, kind=kind, trials=trials,
                       binomial_sd=_binomial_sd(bound, trials), params=used)
