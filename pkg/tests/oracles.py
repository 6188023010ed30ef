"""Independent reference computations shared by the test modules."""

from itertools import combinations

import numpy as np


def ads_lp_vertex_oracle(A, D, y, lam):
    """Optimal value of the analysis Dantzig selector by vertex enumeration.

    The program is rewritten as the LP over ``(f, t)``::

        min sum(t)  s.t.  |D^T f| <= t,  |D^T A^T (A f - y)| <= lam

    and every basic solution (choice of ``n + d`` active inequalities) is
    solved directly; the best feasible one is returned.  Pointedness of the
    feasible set (the ``|D^T f| <= t`` rows pin every direction) guarantees
    the optimum sits at a vertex.
    """
    n, d = D.shape
    Dt = D.T
    M = Dt @ A.T @ A
    c = Dt @ A.T @ y
    Id = np.eye(d)
    G = np.block([[Dt, -Id], [-Dt, -Id], [M, np.zeros((d, d))], [-M, np.zeros((d, d))]])
    h = np.concatenate([np.zeros(2 * d), lam + c, lam - c])
    nv = n + d
    best = np.inf
    for rows in combinations(range(G.shape[0]), nv):
        Gs = G[list(rows)]
        if abs(np.linalg.det(Gs)) < 1e-10:
            continue
        x = np.linalg.solve(Gs, h[list(rows)])
        if np.all(G @ x <= h + 1e-9):
            best = min(best, x[n:].sum())
    return best
