# %% [markdown]
# # The bound calculus as a function of sigma

# %%
import numpy as np

from quasislit import bounds

# %% [markdown]
# ### Cone constants
# `L` holds for every `sigma < 4` and blows up at 4.  The second constant
# only exists below `8/pi` and is much smaller there.

# %%
print(f"{'sigma':>6} {'p':>10} {'L':>12} {'part_ii':>10} {'m':>10} {'alpha_cap':>10}")
for s in np.arange(0.25, 4.0, 0.25):
    bp = bounds.bound_profile(float(s))
    pii = "" if bp.part_ii is None else f"{bp.part_ii:.6f}"
    print(f"{s:6.2f} {bp.p:10.6f} {bp.L:12.6g} {pii:>10} {bp.m:10.6f} {bp.alpha_cap:10.6f}")

# %% [markdown]
# ### Small sigma
# `L` is linear near 0 with slope `(1 + 1/W(1))/4`.

# %%
for s in (1e-1, 1e-2, 1e-3):
    print(s, bounds.big_l(s) / s)
print("limit", (1 + 1 / bounds.lambert_w(1.0)) / 4)

# %% [markdown]
# ### Comparison ODE
# `Z` solves the square-root forced comparison equation exactly.

# %%
for s in (0.0, 0.25, 1.0, 4.0):
    print(s, bounds.comparison_z(1.0, 2.0, s))
