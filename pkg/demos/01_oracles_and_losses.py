"""Tour of the finite-sum losses and their first-order oracles.

Builds a small synthetic classification instance, inspects the smoothness
constants that drive every step-size rule in the library, and cross-checks
the analytic gradients against central finite differences.
"""

import numpy as np

from vropt import IfoCounter, LogisticModel, NonconvexLogisticModel
from vropt.data import SyntheticSpec, generate_synthetic
from vropt.diagnostics import check_gradient_fd

ds = generate_synthetic(SyntheticSpec(n=50, d=8, spread=4.0, noise_rate=0.1,
                                      seed=1))
print(f"dataset: {ds.name}, n={ds.n}, d={ds.d}")

model = LogisticModel(ds, lam=0.01)
print(f"\nlogistic model (lam=0.01): convexity={model.convexity}")
print(f"  per-component smoothness L_i in "
      f"[{model.lipschitz.min():.3f}, {model.lipschitz.max():.3f}]")
print(f"  L = max L_i = {model.L:.3f},  L_bar = mean L_i = {model.L_bar:.3f},"
      f"  mu = {model.mu}")

x = np.zeros(model.d)
counter = IfoCounter()
g_i = model.component_gradient(3, x, counter)
g = model.full_gradient(x, counter)
print(f"\nat x = 0: F(x) = {model.objective(x):.6f} (= ln 2), "
      f"||grad F|| = {np.linalg.norm(g):.4f}")
print(f"IFO ledger after one component + one full gradient: {counter.count} "
      f"(= 1 + n)")

for name, m in (("logistic", model),
                ("nonconvex", NonconvexLogisticModel(ds, alpha=1.0))):
    rep = check_gradient_fd(m, trials=200, seed=0)
    print(f"finite-difference check, {name}: worst relative error "
          f"{rep.max_rel_err:.2e} over {rep.trials} trials -> "
          f"{'OK' if rep.passed else 'BROKEN'}")
