# %% [markdown]
# # Truncated singular integrals and their variation
#
# We put the arc-length measure on a flat segment, evaluate the Cauchy
# kernel truncated at a range of scales, and measure how much the
# truncations move as the scale shrinks.

# %%
import math

import numpy as np

from czvar.geometry import flat_graph, sawtooth_graph
from czvar.kernels import cauchy
from czvar.measures import DiscreteMeasure, graph_measure
from czvar.operators import TruncationGrid, family_eval, truncated
from czvar.variation import oscillation, rho_variation, variation_field

# %% [markdown]
# A sanity check with a closed form: at the left end of the unit segment
# the truncation at 0.1 equals -ln 10.

# %%
mu = graph_measure(flat_graph(), [(0, 1)], 1e-4)
val = truncated(cauchy(), mu, np.zeros(2), 0.1)
print(val.real, -math.log(10))

# %% [markdown]
# The family of truncations at one point, over 12 dyadic scales.

# %%
grid = TruncationGrid.dyadic(1.0, 12)
x = np.array([[0.37, 0.0]])
fam = family_eval(cauchy(), mu, x, grid)
print(np.round(fam.values[0].real, 4))

# %% [markdown]
# The rho-variation picks the chain of scales with the largest
# l^rho sum of jumps. The oscillation only compares scales inside
# fixed windows, so it never exceeds the 2-variation.

# %%
F = fam.values[0]
r = rho_variation(F, 2.1)
print("V_2.1 =", r.value, "chain", r.chain)
print("O =", oscillation(F, grid, [1.0, 0.1, 1e-3]), "<= V_2 =", rho_variation(F, 2).value)

# %% [markdown]
# The variation field of a Dirac mass, sampled along a sawtooth graph.
# Away from the mass the field decays like the kernel.

# %%
saw = graph_measure(sawtooth_graph(0.2, 0.4), [(-1, 1)], 1e-3)
nu = DiscreteMeasure.dirac([0.05, 0.3])
pts = saw.points[::100]
field = variation_field(cauchy(), nu, pts, TruncationGrid.dyadic(2.0, 16), allow_floor=True)
for p, v in zip(pts, field):
    print(f"{p[0]:+.3f} {p[1]:+.3f}  {v:.4f}")
