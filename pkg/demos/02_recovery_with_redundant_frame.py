"""Recovery through an orthonormal basis and through a redundant frame.

The same three-atom construction ``f = D x`` is exactly analysis-sparse
when ``D`` is orthonormal, but not when ``D`` is a union of two bases:
``D^T f`` then spreads over many coefficients and its l1 tail drives the
error.  ADS, ALASSO and ABP run with the noise-level parameter rules and
each outcome is checked with ``verify_outcome``.
"""

import numpy as np

from tightcs.experiments import SignalSpec, generate_signal
from tightcs.frames import build_frame
from tightcs.noise import ads_lambda, alasso_mu, l2_noise_bound
from tightcs.rng import make_rng
from tightcs.solvers import RecoveryProblem, solve, verify_outcome

n, m, sigma, s = 48, 32, 0.01, 3
rng = make_rng(4)
A = rng.standard_normal((m, n)) / np.sqrt(m)
z = sigma * rng.standard_normal(m)

for kind, d in [("random_onb", n), ("union_of_onb", 2 * n)]:
    F = build_frame(kind, n, d, seed=4)
    f, tails = generate_signal(SignalSpec("synthesis_sparse", s=s, amplitude_law="gaussian"), F, seed=5)
    y = A @ f + z
    print(f"{kind} (d={d}): analysis tail beyond {s} terms = {tails[-1]:.3f}")
    params = {"ads": ads_lambda(sigma, d), "alasso": alasso_mu(sigma, d),
              "abp": l2_noise_bound(sigma, m)[0]}
    for method, param in params.items():
        prob = RecoveryProblem(A, F, y, method, param)
        out = solve(prob)
        rep = verify_outcome(prob, out, f_true=f)
        err = np.linalg.norm(out.f_hat - f) / np.linalg.norm(f)
        print(f"  {method:7s} param={param:.4f}  relative error={err:.3e}  "
              f"iterations={out.iterations:5d}  converged={out.converged}  feasible={rep.feasible}")
