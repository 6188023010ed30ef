"""Proximal maps and projections."""

import numpy as np

__all__ = ["prox_l1", "project_ball"]


def prox_l1(v, t):
    """Soft threshold ``sign(v) * max(|v| - t, 0)``, the prox of ``t ||.||_1``."""
    if t < 0:
        raise ValueError("threshold must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    return np.sign(v) * np.maximum(np.abs(v) - t, 0.0)


def project_ball(v, kind, center, radius):
    """Euclidean projection onto ``{x : ||x - center|| <= radius}``.

    ``kind`` selects the norm: ``'l2'`` shrinks radially toward the center,
    ``'linf'`` clamps each coordinate to ``[center_i - r, center_i + r]``.
    """
    if radius < 0:
        raise ValueError("radius must be nonnegative")
    v = np.asarray(v, dtype=np.float64)
    center = np.broadcast_to(np.asarray(center, dtype=np.float64), v.shape)
    if kind == "linf":
        return np.clip(v, center - radius, center + radius)
    if kind == "l2":
        diff = v - center
        nrm = np.linalg.norm(diff)
        if nrm <= radius:
            return v.copy()
        return center + diff * (radius / nrm)
    raise ValueError(f"unknown ball kind {kind!r}")
