# %% [markdown]
# # Lipschitz graphs, cones and annuli
#
# Mass of thin annuli around points on a graph of slope below one stays
# proportional to the annulus width. On a graph steeper than one it does
# not.

# %%
import numpy as np

from czvar.geometry import (circle_arc_graph, cone_inequality_ratio, measure_slope, sample_cone,
                            sawtooth_graph, upsilon_map)

# %% [markdown]
# Measured slope of a sawtooth profile.

# %%
saw = sawtooth_graph(0.9, 0.4)
print("slope", measure_slope(saw, [(-1, 1)]))

# %% [markdown]
# The cone ratio |x_V - y_V| / Phi(x, y) stays below the bound derived
# from the slope, for every slope below one.

# %%
for s in (0.1, 0.5, 0.9):
    rep = cone_inequality_ratio(s, 20000)
    print(f"s={s}: max ratio {rep.max_ratio:.3f}, bound {rep.bound:.1f}")

# %% [markdown]
# The map that flattens annuli is invertible on the cone.

# %%
x = sample_cone(np.random.default_rng(0), 5, 0.5) * 3.0
print(np.abs(upsilon_map(upsilon_map(x, 1), 1, "inverse") - x).max())

# %% [markdown]
# The steep circle arc used in the sharpness experiment.

# %%
arc = circle_arc_graph(20.0)
print("declared slope", arc.slope, "flags counterexample:", arc.sharpness_counterexample)
