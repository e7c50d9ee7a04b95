# %% [markdown]
# No Hölder modulus without the extreme weights
#
# u(x) = f(x_1) with f(t) = 1/(2 - log|t|) is continuous, concave on each
# side of 0, and solves the equation with a_1 = a_N = 0, yet
# f(t)/|t|^alpha is unbounded for every alpha > 0.

# %%
import numpy as np

from partialtrace import counterexample as cex

print(cex.concavity_check(1000))

# %% [markdown]
# The ratio grows, but for small alpha only at very small t.

# %%
table = cex.holder_blowup([0.05, 0.2, 0.5, 1.0], 40)
for alpha in (0.05, 0.2, 0.5, 1.0):
    R = table.ratios(alpha)
    first = next((k for k, v in enumerate(R, 1) if v > 10), None)
    print(f"alpha={alpha}: increasing from k={table.onset(alpha)}, exceeds 10 at k={first}")

# %%
print(cex.supersolution_spotcheck(200, seed=0, N=3).as_dict())
print("touching from above:", cex.subsolution_search(200, seed=0))
print(cex.viscosity_residual_away_from_plane((0, 1, 1, 0)))
