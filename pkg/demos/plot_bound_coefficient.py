"""
How the class prior shapes the estimation error bound
=====================================================

The error bound of the triplet risk minimizer scales with a coefficient
that depends only on the class prior. It blows up as the prior approaches
1/2, where the three bags become indistinguishable mixtures, and shrinks as
the classes become unbalanced.
"""

import numpy as np

from tripletclf.eval_bench import bound_curve, bound_curve_csv, bound_grid
from tripletclf.prior_model import BoundParams, estimation_error_bound

###############################################################################
# Evaluate the coefficient on both sides of 1/2.
grid = np.concatenate([bound_grid(0.05, 0.45, 0.01), bound_grid(0.55, 0.95, 0.01)])
rows = bound_curve(grid)
for p, coef in rows[::10]:
    print(f"prior={p:.2f}  coefficient={coef:8.3f}")

###############################################################################
# The curve is symmetric: relabeling the classes maps p to 1 - p.
table = dict(rows)
print("coef(0.3) =", table[0.3], " coef(0.7) =", table[0.7])

###############################################################################
# The full bound for 1000 triplets, a 1-Lipschitz loss bounded by 1, and a
# model class with complexity constant 1.
params = BoundParams(n=1000, delta=0.05, rho=1.0, c_f=1.0, c_ell=1.0)
for p in (0.6, 0.7, 0.8, 0.9):
    print(f"prior={p}: R(f_hat) - R(f*) <= {estimation_error_bound(params, p):.4f}")

###############################################################################
# Save the curve; plot it if matplotlib is around.
with open("bound_curve.csv", "w") as fh:
    fh.write(bound_curve_csv(rows))

try:
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    p, c = np.array(rows).T
    fig, ax = plt.subplots(figsize=(5, 3.5))
    ax.plot(p[p < 0.5], c[p < 0.5], "C0")
    ax.plot(p[p > 0.5], c[p > 0.5], "C0")
    ax.set_yscale("log")
    ax.set_xlabel("class prior (train = test)")
    ax.set_ylabel("bound coefficient")
    fig.tight_layout()
    fig.savefig("bound_coefficient.png", dpi=120)
    print("wrote bound_coefficient.png")
