# %% [markdown]
# Solving a_1 lambda_1(D^2 u) + a_2 lambda_2(D^2 u) = f
#
# A monotone wide-stencil scheme relaxed in pseudo-time. The run below is
# small enough for a laptop; raise n to 129 for the exponent check.

# %%
import numpy as np

from partialtrace.regularity import beta
from partialtrace.solver import Grid, SolverConfig, default_region, estimate_exponent, holder_seminorm, solve

n = 65
g = Grid.unit_square(n, lambda x, y: np.abs(x - 0.5) + 0.3 * np.abs(y - 0.3))
res = solve(g, (1.0, 2.0), f=lambda x, y: np.sign(x - 0.37), config=SolverConfig(tol=1e-8))
print(res.iterations, "iterations, residual", res.residual)

# %%
region = default_region(g)
alpha, r2 = estimate_exponent(res.u, region)
print(f"alpha_hat = {alpha:.3f} (r2 {r2:.3f}), beta = {beta(1, 2):.4f}")
print("seminorm at beta:", holder_seminorm(res.u, beta(1, 2), region))

# %% [markdown]
# Wider stencils resolve more directions at the cost of a smaller step.

# %%
for w in (1, 2, 3):
    r = solve(g, (1.0, 2.0), f=lambda x, y: np.sign(x - 0.37), config=SolverConfig(tol=1e-6, stencil_width=w))
    print(w, r.iterations, float(r.u.values[n // 2, n // 2]))
