"""Dense linear algebra kernels and the linear-operator abstraction.

Matrices are plain 2-D ``float64`` numpy arrays and vectors are 1-D arrays;
:func:`as_matrix` / :func:`as_vector` validate them.  :class:`LinOp` and its
subclasses give forward and adjoint application for dense matrices, scaled
identities, compositions, horizontal/vertical concatenation and block
diagonals.

The eigensolver is a cyclic Jacobi method using the round-robin (parallel)
ordering, so each of the ``n - 1`` rounds of a sweep rotates ``n // 2``
disjoint index pairs at once with vectorized row and column updates.
"""

import numpy as np
from scipy.linalg import solve_triangular

from .rng import make_rng

__all__ = [
    "DimensionError",
    "as_matrix",
    "as_vector",
    "LinOp",
    "DenseOp",
    "ScaledIdentity",
    "Composition",
    "HConcat",
    "VStack",
    "BlockDiag",
    "AdjointOp",
    "op_apply",
    "compose",
    "CholeskyFactor",
    "cholesky_factor",
    "cholesky_solve",
    "sym_eig",
    "generalized_sym_eig",
    "power_iteration_norm",
]

SYM_TOL = 1e-12


class DimensionError(ValueError):
    pass


def as_matrix(M, name="matrix"):
    """Return ``M`` as a finite 2-D float64 array (copying only if needed)."""
    A = np.asarray(M, dtype=np.float64)
    if A.ndim != 2:
        raise DimensionError(f"{name} must be 2-D, got shape {A.shape}")
    if not np.all(np.isfinite(A)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return A


def as_vector(v, name="vector"):
    x = np.asarray(v, dtype=np.float64)
    if x.ndim == 2 and 1 in x.shape:
        x = x.ravel()
    if x.ndim != 1:
        raise DimensionError(f"{name} must be 1-D, got shape {x.shape}")
    if not np.all(np.isfinite(x)):
        raise ValueError(f"{name} contains NaN or Inf entries")
    return x


def _check_symmetric(S, name):
    if S.shape[0] != S.shape[1]:
        raise DimensionError(f"{name} must be square, got shape {S.shape}")
    scale = max(1.0, float(np.max(np.abs(S))) if S.size else 0.0)
    asym = float(np.max(np.abs(S - S.T))) if S.size else 0.0
    if asym > SYM_TOL * scale:
        raise ValueError(f"{name} is not symmetric (max |S - S^T| = {asym:.3e})")


# ---------------------------------------------------------------------------
# Linear operators
# ---------------------------------------------------------------------------


class LinOp:
    """Abstract real linear operator ``R^input_dim -> R^output_dim``."""

    kind = "abstract"

    def __init__(self, output_dim, input_dim):
        self.output_dim = int(output_dim)
        self.input_dim = int(input_dim)

    @property
    def shape(self):
        return (self.output_dim, self.input_dim)

    def _forward(self, x):
        raise NotImplementedError

    def _adjoint(self, w):
        raise NotImplementedError

    def forward(self, x):
        x = np.asarray(x, dtype=np.float64)
        if x.shape != (self.input_dim,):
            raise DimensionError(
                f"{self.kind} forward expects length {self.input_dim}, got {x.shape}"
            )
        return self._forward(x)

    def adjoint(self, w):
        w = np.asarray(w, dtype=np.float64)
        if w.shape != (self.output_dim,):
            raise DimensionError(
                f"{self.kind} adjoint expects length {self.output_dim}, got {w.shape}"
            )
        return self._adjoint(w)

    def apply(self, v, mode="forward"):
        if mode == "forward":
            return self.forward(v)
        if mode == "adjoint":
            return self.adjoint(v)
        raise ValueError(f"mode must be 'forward' or 'adjoint', got {mode!r}")

    @property
    def T(self):
        return AdjointOp(self)

    def to_dense(self):
        """Materialize the operator as an ``output_dim x input_dim`` array."""
        eye = np.eye(self.input_dim)
        return np.column_stack([self._forward(eye[:, j]) for j in range(self.input_dim)]) \
            if self.input_dim else np.zeros((self.output_dim, 0))

    def __matmul__(self, other):
        if isinstance(other, LinOp):
            return Composition(self, other)
        return self.forward(other)

    def __repr__(self):
        return f"<{type(self).__name__} {self.output_dim}x{self.input_dim}>"


class DenseOp(LinOp):
    kind = "dense"

    def __init__(self, M):
        self.matrix = as_matrix(M)
        super().__init__(*self.matrix.shape)

    def _forward(self, x):
        return self.matrix @ x

    def _adjoint(self, w):
        return self.matrix.T @ w

    def to_dense(self):
        return self.matrix.copy()


class ScaledIdentity(LinOp):
    kind = "scaled-identity"

    def __init__(self, n, scale=1.0):
        super().__init__(n, n)
        self.scale = float(scale)

    def _forward(self, x):
        return self.scale * x

    _adjoint = _forward

    def to_dense(self):
        return self.scale * np.eye(self.input_dim)


class AdjointOp(LinOp):
    kind = "adjoint-wrapper"

    def __init__(self, op):
        super().__init__(op.input_dim, op.output_dim)
        self.op = op

    def _forward(self, x):
        return self.op._adjoint(x)

    def _adjoint(self, w):
        return self.op._forward(w)

    @property
    def T(self):
        return self.op

    def to_dense(self):
        return self.op.to_dense().T


class Composition(LinOp):
    """``outer @ inner``: apply ``inner`` first."""

    kind = "composition"

    def __init__(self, outer, inner):
        if outer.input_dim != inner.output_dim:
            raise DimensionError(
                f"cannot compose {outer.shape} after {inner.shape}"
            )
        super().__init__(outer.output_dim, inner.input_dim)
        self.outer = outer
        self.inner = inner

    def _forward(self, x):
        return self.outer._forward(self.inner._forward(x))

    def _adjoint(self, w):
        return self.inner._adjoint(self.outer._adjoint(w))

    def to_dense(self):
        return self.outer.to_dense() @ self.inner.to_dense()


def compose(*ops):
    """``compose(L3, L2, L1)`` is ``L3 L2 L1`` (rightmost applied first)."""
    if not ops:
        raise ValueError("compose needs at least one operator")
    out = ops[-1]
    for op in reversed(ops[:-1]):
        out = Composition(op, out)
    return out


class HConcat(LinOp):
    """``[L1, L2, ...]`` acting on stacked inputs."""

    kind = "hconcat"

    def __init__(self, *ops):
        rows = {op.output_dim for op in ops}
        if len(rows) != 1:
            raise DimensionError(f"hconcat blocks disagree on output dim: {sorted(rows)}")
        self.ops = ops
        self.offsets = np.cumsum([0] + [op.input_dim for op in ops])
        super().__init__(ops[0].output_dim, int(self.offsets[-1]))

    def _forward(self, x):
        out = np.zeros(self.output_dim)
        for op, a, b in zip(self.ops, self.offsets[:-1], self.offsets[1:]):
            out += op._forward(x[a:b])
        return out

    def _adjoint(self, w):
        return np.concatenate([op._adjoint(w) for op in self.ops])

    def to_dense(self):
        return np.hstack([op.to_dense() for op in self.ops])


class VStack(LinOp):
    """Row blocks ``[L1; L2; ...]`` sharing one input."""

    kind = "vstack"

    def __init__(self, *ops):
        cols = {op.input_dim for op in ops}
        if len(cols) != 1:
            raise DimensionError(f"vstack blocks disagree on input dim: {sorted(cols)}")
        self.ops = ops
        self.offsets = np.cumsum([0] + [op.output_dim for op in ops])
        super().__init__(int(self.offsets[-1]), ops[0].input_dim)

    def _forward(self, x):
        return np.concatenate([op._forward(x) for op in self.ops])

    def _adjoint(self, w):
        out = np.zeros(self.input_dim)
        for op, a, b in zip(self.ops, self.offsets[:-1], self.offsets[1:]):
            out += op._adjoint(w[a:b])
        return out

    def split(self, w):
        return [w[a:b] for a, b in zip(self.offsets[:-1], self.offsets[1:])]

    def to_dense(self):
        return np.vstack([op.to_dense() for op in self.ops])


class BlockDiag(LinOp):
    kind = "blockdiag"

    def __init__(self, *ops):
        self.ops = ops
        self.in_offsets = np.cumsum([0] + [op.input_dim for op in ops])
        self.out_offsets = np.cumsum([0] + [op.output_dim for op in ops])
        super().__init__(int(self.out_offsets[-1]), int(self.in_offsets[-1]))

    def _forward(self, x):
        return np.concatenate([
            op._forward(x[a:b])
            for op, a, b in zip(self.ops, self.in_offsets[:-1], self.in_offsets[1:])
        ])

    def _adjoint(self, w):
        return np.concatenate([
            op._adjoint(w[a:b])
            for op, a, b in zip(self.ops, self.out_offsets[:-1], self.out_offsets[1:])
        ])

    def to_dense(self):
        out = np.zeros(self.shape)
        for op, r, c in zip(self.ops, self.out_offsets, self.in_offsets):
            out[r:r + op.output_dim, c:c + op.input_dim] = op.to_dense()
        return out


def op_apply(op, v, mode="forward"):
    """Apply ``op`` (or its adjoint) to ``v``; the input is never modified."""
    return op.apply(v, mode)


# ---------------------------------------------------------------------------
# Cholesky
# ---------------------------------------------------------------------------


class CholeskyFactor:
    """Lower-triangular factor ``L`` with ``G = L L^T``, reusable across solves."""

    def __init__(self, L):
        self.L = L

    @property
    def n(self):
        return self.L.shape[0]

    def solve(self, b):
        b = np.asarray(b, dtype=np.float64)
        if b.shape[0] != self.n:
            raise DimensionError(f"right-hand side has length {b.shape[0]}, expected {self.n}")
        z = solve_triangular(self.L, b, lower=True, check_finite=False)
        return solve_triangular(self.L.T, z, lower=False, check_finite=False)


def cholesky_factor(G):
    G = as_matrix(G, "G")
    _check_symmetric(G, "G")
    n = G.shape[0]
    L = np.zeros_like(G)
    for j in range(n):
        row = L[j, :j]
        pivot = G[j, j] - row @ row
        if not pivot > 0.0:
            raise np.linalg.LinAlgError(
                f"matrix is not positive definite: pivot {j} is {pivot:.3e}"
            )
        L[j, j] = np.sqrt(pivot)
        L[j + 1:, j] = (G[j + 1:, j] - L[j + 1:, :j] @ row) / L[j, j]
    return CholeskyFactor(L)


def cholesky_solve(G, b):
    """Solve ``G x = b`` for symmetric positive definite ``G``.

    ``G`` may be a matrix or an existing :class:`CholeskyFactor`.
    """
    factor = G if isinstance(G, CholeskyFactor) else cholesky_factor(G)
    return factor.solve(b)


# ---------------------------------------------------------------------------
# Symmetric eigenproblems
# ---------------------------------------------------------------------------


def _round_robin(n):
    """Rounds of disjoint index pairs covering every pair exactly once."""
    players = list(range(n)) + ([-1] if n % 2 else [])
    m = len(players)
    rounds = []
    for _ in range(m - 1):
        pairs = [(players[i], players[m - 1 - i]) for i in range(m // 2)]
        pairs = [(min(p, q), max(p, q)) for p, q in pairs if p >= 0 and q >= 0]
        p = np.array([a for a, _ in pairs], dtype=np.intp)
        q = np.array([b for _, b in pairs], dtype=np.intp)
        rounds.append((p, q))
        players = [players[0], players[-1]] + players[1:-1]
    return rounds


def sym_eig(S, tol=1e-14, max_sweeps=60):
    """Eigen-decomposition of a real symmetric matrix by cyclic Jacobi.

    Parameters
    ----------
    S : array_like, shape (n, n)
        Symmetric to within ``1e-12`` (relative to its largest entry).
    tol : float
        Sweeps stop once the off-diagonal Frobenius norm is at most
        ``tol * ||S||_F``.

    Returns
    -------
    w : ndarray, shape (n,)
        Eigenvalues in descending order.
    V : ndarray, shape (n, n)
        Orthonormal eigenvectors, ``V[:, i]`` pairs with ``w[i]``.
    """
    S = as_matrix(S, "S")
    _check_symmetric(S, "S")
    n = S.shape[0]
    A = 0.5 * (S + S.T)
    V = np.eye(n)
    scale = np.linalg.norm(A)
    if n <= 1 or scale == 0.0:
        return np.diag(A).copy(), V

    eps = np.finfo(float).eps
    rounds = _round_robin(n)
    offmask = ~np.eye(n, dtype=bool)
    for _ in range(max_sweeps):
        if np.sqrt(np.sum(A[offmask] ** 2)) <= tol * scale:
            break
        for p, q in rounds:
            apq = A[p, q]
            app = A[p, p]
            aqq = A[q, q]
            negligible = np.abs(apq) <= eps * np.sqrt(np.abs(app * aqq))
            A[p[negligible], q[negligible]] = 0.0
            A[q[negligible], p[negligible]] = 0.0
            act = ~negligible
            if not act.any():
                continue
            p, q, apq, app, aqq = p[act], q[act], apq[act], app[act], aqq[act]
            theta = (aqq - app) / (2.0 * apq)
            sgn = np.where(theta >= 0.0, 1.0, -1.0)
            t = sgn / (np.abs(theta) + np.hypot(theta, 1.0))
            c = 1.0 / np.hypot(t, 1.0)
            s = t * c

            Ap = A[:, p].copy()
            Aq = A[:, q]
            A[:, p] = c * Ap - s * Aq
            A[:, q] = s * Ap + c * Aq
            Ap = A[p, :].copy()
            Aq = A[q, :]
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            A[p, q] = 0.0
            A[q, p] = 0.0
            Vp = V[:, p].copy()
            Vq = V[:, q]
            V[:, p] = c * Vp - s * Vq
            V[:, q] = s * Vp + c * Vq

    w = np.diag(A).copy()
    order = np.argsort(-w, kind="stable")
    return w[order], V[:, order]


def generalized_sym_eig(Sa, Sb, null_tol=1e-10):
    """Eigenvalues of the pencil ``(Sa, Sb)`` restricted to ``range(Sb)``.

    ``Sb`` is whitened through its own eigendecomposition; directions whose
    ``Sb``-eigenvalue is at most ``null_tol * max`` are dropped.  Returns the
    eigenvalues in descending order, or an empty array when ``Sb`` is
    numerically zero.
    """
    Sa = as_matrix(Sa, "Sa")
    Sb = as_matrix(Sb, "Sb")
    if Sa.shape != Sb.shape:
        raise DimensionError(f"pencil shapes differ: {Sa.shape} vs {Sb.shape}")
    _check_symmetric(Sa, "Sa")
    wb, Ub = sym_eig(Sb)
    top = wb[0] if wb.size else 0.0
    if top <= 0.0:
        if wb.size and wb[-1] < -null_tol * max(1.0, abs(wb[-1])):
            raise ValueError("Sb is not positive semidefinite")
        return np.empty(0)
    if wb[-1] < -null_tol * top:
        raise ValueError(f"Sb is not positive semidefinite (eigenvalue {wb[-1]:.3e})")
    keep = wb > null_tol * top
    B = Ub[:, keep] / np.sqrt(wb[keep])
    M = B.T @ Sa @ B
    return sym_eig(0.5 * (M + M.T))[0]


def power_iteration_norm(op, iters=200, seed=0):
    """Estimate the largest singular value of ``op`` by power iteration on ``op^T op``.

    The estimate ``sqrt(||M x_k||)`` for unit ``x_k`` never decreases with
    ``iters`` for a fixed start.
    """
    if iters < 1:
        raise ValueError("iters must be >= 1")
    if isinstance(op, np.ndarray):
        op = DenseOp(op)
    x = make_rng(seed).standard_normal(op.input_dim)
    nx = np.linalg.norm(x)
    if nx == 0.0:
        return 0.0
    x /= nx
    est = 0.0
    for _ in range(iters):
        y = op._adjoint(op._forward(x))
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return est
        est = max(est, np.sqrt(ny))
        x = y / ny
    return float(est)
