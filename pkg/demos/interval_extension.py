# %% [markdown]
# # Extending the odometer by the halving IFS on [0, 1]
# Every edge gets a label: either a map of the IFS or the identity.
# `auto_label` telescopes the diagram until each vertex pair has enough
# edges and then chooses the labels.

# %%
from fractions import Fraction

from cantorext import (
    auto_label, check_semiconjugacy, classify_point, extended_orbit, fiber,
    identity_point, odometer, preset, validate_labeling,
)
from cantorext.extension import exact_from_pulled, coordinate

t, lab = auto_label(odometer(3), preset("interval2"))
print("edges per level after telescoping:", len(t.edges[0]))
print(validate_labeling(lab))

# %% [markdown]
# A path whose labels end in the identity (Type 2) has a whole interval as
# its fiber. A path with infinitely many contractions (Type 1) has a single point.

# %%
x = identity_point(lab, (1,))
print(classify_point(x, lab), fiber(x, lab, 20))

# %%
p = exact_from_pulled(lab, x, (Fraction(1, 3),), 1)
for q in extended_orbit(p, lab, 6):
    print(q.base.edges(3), coordinate(q, lab))

# %% [markdown]
# Projecting to the base commutes with the dynamics.

# %%
print(bool(check_semiconjugacy(p, lab, 500)))
