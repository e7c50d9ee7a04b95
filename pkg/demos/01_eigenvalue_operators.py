# %% [markdown]
# Weighted sums of ordered eigenvalues
#
# The operator M_a(X) = a_1 lambda_1(X) + ... + a_N lambda_N(X) is evaluated
# with a small Jacobi eigensolver. Here we look at a few weight patterns and
# at the sampled min-max form of lambda_1 + lambda_N.

# %%
import numpy as np

from partialtrace.operators import evaluate, isaacs_minmax, pucci_weights, degenerate_ellipticity_check
from partialtrace.spectral import eigen_decompose, random_orthogonal

rng = np.random.default_rng(0)
Q = random_orthogonal(3, rng)
X = Q @ np.diag([-1.0, 0.5, 2.0]) @ Q.T
print("eigenvalues:", eigen_decompose(X).eigenvalues)

# %%
for name, a in [("trace", (1, 1, 1)), ("lambda_1 + lambda_3", (1, 0, 1)),
                ("P-_1", pucci_weights("minus", 1, 3).weights), ("P+_2", pucci_weights("plus", 2, 3).weights)]:
    print(f"{name:22s} {evaluate(a, X): .6f}")

# %% [markdown]
# The min-max representation converges slowly in the number of directions.

# %%
for n in (10, 100, 1000, 10_000, 100_000):
    print(n, isaacs_minmax(X, n, seed=1) - evaluate((1, 0, 1), X))

# %%
# monotone in the Loewner order even when interior weights vanish
print(degenerate_ellipticity_check((1, 0, 0, 1), 1000, seed=2))
