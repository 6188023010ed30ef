"""Tight frames ``D`` (``n x d``, ``D D^T = I``) and their analysis/synthesis maps."""

from dataclasses import dataclass, field

import numpy as np

from .linalg import DenseOp, DimensionError, as_matrix, as_vector, sym_eig
from .mmio import read_matrix, write_matrix
from .rng import hash64, make_rng

__all__ = [
    "FRAME_TOL",
    "FRAME_KINDS",
    "TightFrame",
    "build_frame",
    "verify_tight",
    "frame_apply",
    "norm_11",
    "block_diag_frame",
    "random_onb",
    "save_frame",
]

FRAME_TOL = 1e-10
FRAME_KINDS = ("identity", "random_onb", "union_of_onb", "random_parseval", "from_file")


def verify_tight(D, tol=None):
    """Return ``||D D^T - I_n||_F``; ``tol`` is accepted for symmetry and ignored."""
    D = as_matrix(D, "D")
    n, d = D.shape
    if d < n:
        raise DimensionError(f"a frame needs d >= n, got {n}x{d}")
    return float(np.linalg.norm(D @ D.T - np.eye(n)))


@dataclass(frozen=True, eq=False)
class TightFrame:
    """A validated tight frame.

    Attributes
    ----------
    D : ndarray, shape (n, d)
        Frame matrix; its columns are the frame vectors.
    kind : str
        Construction tag.
    tightness_residual : float
        ``||D D^T - I||_F`` measured at construction.
    """

    D: np.ndarray
    kind: str = "custom"
    tightness_residual: float = field(default=0.0)

    @classmethod
    def from_matrix(cls, D, kind="custom", tol=FRAME_TOL):
        D = np.array(as_matrix(D, "D"), dtype=np.float64)
        res = verify_tight(D)
        if res > tol:
            raise ValueError(f"matrix is not a tight frame: ||DD^T - I||_F = {res:.3e} > {tol:.1e}")
        D.setflags(write=False)
        return cls(D=D, kind=kind, tightness_residual=res)

    @property
    def n(self):
        return self.D.shape[0]

    @property
    def d(self):
        return self.D.shape[1]

    @property
    def is_orthonormal(self):
        return self.n == self.d

    def analysis(self, f):
        return frame_apply(self, f, "analysis")

    def synthesis(self, x):
        return frame_apply(self, x, "synthesis")

    def synthesis_op(self):
        """``D`` as a :class:`~tightcs.linalg.LinOp` (its adjoint is the analysis map)."""
        return DenseOp(self.D)

    def analysis_op(self):
        return DenseOp(self.D.T)


def random_onb(n, rng):
    """Haar-distributed orthogonal ``n x n`` matrix (QR with sign correction)."""
    Q, R = np.linalg.qr(rng.standard_normal((n, n)))
    return Q * np.where(np.diag(R) < 0, -1.0, 1.0)


def _parseval(n, d, seed, max_attempts=100):
    for attempt in range(max_attempts):
        rng = make_rng(hash64(seed, attempt))
        G = rng.standard_normal((n, d))
        w, V = sym_eig(G @ G.T)
        if w[-1] <= 1e-12 * w[0]:
            continue
        inv_sqrt = (V / np.sqrt(w)) @ V.T
        return inv_sqrt @ G
    raise RuntimeError(f"could not draw a nondegenerate {n}x{d} Gaussian in {max_attempts} attempts")


def build_frame(kind, n, d=None, seed=0, path=None):
    """Construct a tight frame.

    Parameters
    ----------
    kind : {'identity', 'random_onb', 'union_of_onb', 'random_parseval', 'from_file'}
    n, d : int
        Ambient dimension and number of frame vectors (``d`` defaults to ``n``).
        ``identity`` and ``random_onb`` need ``d == n``; ``union_of_onb``
        needs ``d = k n`` with ``k >= 2``.
    seed : int
    path : str, optional
        Matrix Market file for ``from_file``.
    """
    d = n if d is None else int(d)
    n = int(n)
    if kind == "from_file":
        if path is None:
            raise ValueError("from_file needs a path")
        D = read_matrix(path)
        res = verify_tight(D)
        if res > FRAME_TOL:
            raise ValueError(f"{path} is not a tight frame: ||DD^T - I||_F = {res:.3e}")
        return TightFrame.from_matrix(D, kind=kind)
    if n < 1 or d < n:
        raise ValueError(f"infeasible frame size n={n}, d={d} (need 1 <= n <= d)")
    rng = make_rng(seed)
    if kind == "identity":
        if d != n:
            raise ValueError(f"identity frame needs d == n, got n={n}, d={d}")
        D = np.eye(n)
    elif kind == "random_onb":
        if d != n:
            raise ValueError(f"random_onb needs d == n, got n={n}, d={d}")
        D = random_onb(n, rng)
    elif kind == "union_of_onb":
        k, rem = divmod(d, n)
        if rem or k < 2:
            raise ValueError(f"union_of_onb needs d = k*n with k >= 2, got n={n}, d={d}")
        D = np.hstack([random_onb(n, rng) for _ in range(k)]) / np.sqrt(k)
    elif kind == "random_parseval":
        D = _parseval(n, d, seed)
    else:
        raise ValueError(f"unknown frame kind {kind!r}; expected one of {FRAME_KINDS}")
    return TightFrame.from_matrix(D, kind=kind)


def frame_apply(F, v, direction="analysis"):
    """``D^T f`` (analysis, ``f`` of length n) or ``D x`` (synthesis, ``x`` of length d)."""
    v = as_vector(v)
    if direction == "analysis":
        if v.shape[0] != F.n:
            raise DimensionError(f"analysis expects length {F.n}, got {v.shape[0]}")
        return F.D.T @ v
    if direction == "synthesis":
        if v.shape[0] != F.d:
            raise DimensionError(f"synthesis expects length {F.d}, got {v.shape[0]}")
        return F.D @ v
    raise ValueError(f"direction must be 'analysis' or 'synthesis', got {direction!r}")


def norm_11(F):
    """Induced l1 -> l1 norm of ``D^T D`` (largest absolute column sum)."""
    D = F.D if isinstance(F, TightFrame) else as_matrix(F)
    return float(np.max(np.sum(np.abs(D.T @ D), axis=0)))


def block_diag_frame(D, Omega):
    """``W = blockdiag(D, Omega)``, a tight frame for ``R^(n+m)``."""
    n, d = D.D.shape
    m, M = Omega.D.shape
    W = np.zeros((n + m, d + M))
    W[:n, :d] = D.D
    W[n:, d:] = Omega.D
    return TightFrame.from_matrix(W, kind="blockdiag")


def save_frame(path, F):
    write_matrix(path, F.D, comment=f"tight frame kind={F.kind}")
