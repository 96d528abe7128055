# %% [markdown]
# # Calderon-Zygmund decomposition of a measure
#
# We split a complex measure into a good part with bounded density and
# bad parts with zero total mass, each living near a doubling cube.

# %%
import numpy as np

from czvar.czdecomp import cz_decompose, good_bad_split, reconstruction_error, verify_cz
from czvar.geometry import flat_graph
from czvar.measures import DiscreteMeasure, graph_measure

# %%
mu = graph_measure(flat_graph(), [(-1, 1)], 0.01)
nu = DiscreteMeasure.dirac([0.3, 0.4], 2 - 1j) + mu.with_density(0.5)
lam = 40.0
res = cz_decompose(mu, nu, lam)
print(len(res), "cubes")
print(res.cubes_csv())

# %% [markdown]
# Every invariant of the decomposition is checked directly.

# %%
rep = verify_cz(res, mu, nu)
print("all pass:", rep.passed)
print(rep.to_text())

# %% [markdown]
# Good plus bad reconstructs the original measure, and each bad part
# has zero total mass.

# %%
good, bad = good_bad_split(nu, res)
print("reconstruction error", reconstruction_error(nu, good, bad))
print("bad masses", [abs(b.total_mass) for b in bad])
