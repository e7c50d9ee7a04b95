# %% [markdown]
# The radial barrier
#
# phi solves phi'' + (A/r + B) phi' = -C on (0, delta] with phi(0) = 0 and
# phi'(delta) = D/delta. For B = 0 it has a closed form, which makes a good
# sanity check for the quadrature.

# %%
import numpy as np

from partialtrace import barrier as bar

p = bar.BarrierParams(A=0.5, B=0.0, C=1.0, D=1.0, delta=1.0)
b = bar.build(p)
c1, c2 = bar.closed_form_b0(p)
r = np.geomspace(1e-6, 1, 7)
print("K =", b.K)
print(np.column_stack([r, bar.phi(b, r), c1 * r**0.5 - c2 * r**2]))

# %% [markdown]
# With a drift term there is no closed form; the node-wise property report
# is what we have.

# %%
q = bar.BarrierParams(A=0.7, B=3.0, C=5.0, D=2.0, delta=0.5)
report = bar.verify_properties(bar.build(q), 200)
for check in report.checks:
    print(f"{check.name:20s} {check.passed}  margin {check.worst_margin:.3g}")

# %%
print(bar.to_csv(bar.build(q), [0.1, 0.25, 0.5]))
