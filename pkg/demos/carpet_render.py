# %% [markdown]
# # Rendering attractors
# `attractor_sample` gives the level-n boxes of an attractor as exact rationals.
# Here they are drawn as a text raster.

# %%
from cantorext import attractor_sample, preset

def show(name, depth):
    sys = preset(name)
    boxes = attractor_sample(sys, depth)
    n = 3 ** depth
    grid = [[" "] * n for _ in range(n)]
    for b in boxes:
        i, j = (int(v * n) for v in b.lower)
        grid[n - 1 - j][i] = "#"
    print("\n".join("".join(r) for r in grid))

show("carpet", 2)

# %% [markdown]
# The Cantor digit set is handled symbolically, so its boxes are digit prefixes.

# %%
for b in attractor_sample(preset("cantor3"), 2):
    print(b)
