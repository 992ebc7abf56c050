# %% [markdown]
# # Invariant measures and the dimension group
# A primitive stationary diagram carries a unique invariant measure, which
# the Perron vector determines. When that vector is rational the cylinder
# measures come out exact.

# %%
from cantorext import K0Element, OrderedBratteliDiagram, auto_label, cylinder_measure, k0_equal, odometer, preset
from cantorext.extension import lift_measure
from cantorext.vershik import cylinder_points

d = odometer(3)
print([cylinder_measure(d, (0,) * n) for n in range(5)])

# %% [markdown]
# The golden-mean diagram has an irrational Perron vector. In that case the
# measure comes back as a certified rational interval.

# %%
fib = OrderedBratteliDiagram.from_counts(
    [1, 2, 2], [[(0, 0, 0), (0, 1, 0)], [(0, 0, 0), (1, 0, 1), (0, 1, 0)]], 1)
print(cylinder_measure(fib, (0,)))

# %% [markdown]
# Lifted measures on the extension add up to one at every depth.

# %%
t, lab = auto_label(d, preset("interval2"))
print([sum(lift_measure(lab, p) for p in cylinder_points(t, n)) for n in range(4)])

# %% [markdown]
# K0 is the direct limit of Z under multiplication by 3, so [1] at level k
# and [3^m] at level k+m are the same class.

# %%
print(k0_equal(d, K0Element(2, (1,)), K0Element(5, (27,))))
print(k0_equal(d, K0Element(2, (1,)), K0Element(3, (1,))))
