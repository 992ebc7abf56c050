# %% [markdown]
# # The 3-adic odometer as a Bratteli-Vershik system
# One vertex per level and three edges. The Vershik map is "add one with
# carry", with digits read left to right.

# %%
from cantorext import odometer, min_point, max_point, vershik_map, orbit, with_tail
from cantorext.vershik import successor

d = odometer(3)
x = min_point(d)
for i in range(10):
    print(i, x.edges(4))
    x = vershik_map(d, x)

# %% [markdown]
# The carry propagates through a run of maximal edges.

# %%
print(successor(d, with_tail(d, (2, 2, 1), "min")).edges(4))

# %% [markdown]
# The only maximal path wraps around to the only minimal one.

# %%
print(vershik_map(d, max_point(d)) == min_point(d))
pts = orbit(d, min_point(d), 27)
print(len({p.edges(3) for p in pts[:27]}), "distinct depth-3 cylinders in 27 steps")
