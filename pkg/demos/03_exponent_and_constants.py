# %% [markdown]
# Exponent and constants
#
# beta depends only on the extreme weights a_1 and a_N, and equals 1/2
# exactly when they agree.

# %%
import numpy as np

from partialtrace import regularity as reg
from partialtrace.operators import WeightVector

for aN in (1.0, 0.5, 0.1, 0.01, 0.001):
    print(f"beta(1, {aN}) = {reg.beta(1.0, aN):.6f}")

# %%
data = reg.ProblemData(WeightVector((1.0, 0.0, 2.0)), c_h=0.5, u_sup=1.0, f_sup=1.0, delta=1.0)
print(reg.theorem_constants(data))
print(reg.barrier_params_for(data))

# %% [markdown]
# The full chain of computable steps: barrier, radial ODE, the matrix Theta
# and its spectrum, and the three eigenvalue inequalities on random pairs.

# %%
out = reg.proofcheck(data, trials=300, seed=1)
print("ODE residual (relative):", out["comparison_ode_max_relative_residual"])
print("Theta:", out["theta"])
print("pairs:", out["doubling"])
