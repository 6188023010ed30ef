"""Tight frames and their restricted isometry constants.

Builds each kind of tight frame, checks perfect reconstruction, then
compares the exact D-RIP constant of a Gaussian sensing matrix with the
Monte Carlo lower estimate.  The Monte Carlo number can only undershoot.
"""

import numpy as np

from tightcs.frames import build_frame, norm_11
from tightcs.sensing import SensingSpec, draw_sensing, drip_exact, drip_monte_carlo

n = 12
for kind, d in [("identity", 12), ("random_onb", 12), ("union_of_onb", 24), ("random_parseval", 20)]:
    F = build_frame(kind, n, d, seed=1)
    f = np.random.default_rng(0).standard_normal(n)
    recon = np.linalg.norm(F.D @ (F.D.T @ f) - f)
    print(f"{kind:16s} d={F.d:3d}  ||DD*-I||_F={F.tightness_residual:.1e}  "
          f"reconstruction error={recon:.1e}  ||D*D||_11={norm_11(F):.3f}")

# a redundant frame: analysis coefficients are not unique, so the D-RIP
# looks at the range of D_T only
F = build_frame("union_of_onb", n, 24, seed=1)
A = draw_sensing(SensingSpec("gaussian", 10, n, seed=2))
print()
for s in (1, 2, 3):
    exact = drip_exact(A, F, s)
    mc = drip_monte_carlo(A, F, s, trials=2000, seed=3)
    print(f"order {s}: exact delta={exact.delta:.4f} over {exact.supports_examined} supports "
          f"(worst {exact.worst_support}), Monte Carlo={mc.delta:.4f}")
