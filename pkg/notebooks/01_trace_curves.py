# %% [markdown]
# # Tracing quasislits
#
# Each tip is one reverse flow of a point just above the driver, pushed to
# the limit by Richardson extrapolation in the start height.

# %%
import numpy as np

from quasislit import bounds, make_driver, trace_curve
from quasislit.cli import render_svg

times = np.linspace(0.02, 1.0, 50)

# %% [markdown]
# ### The vertical slit
# With a zero driver the curve is `2i sqrt(t)`.

# %%
zero = trace_curve(make_driver("constant", 0.0, 1.0), times)
print("max error:", np.max(np.abs(zero.gamma - 2j * np.sqrt(times))))

# %% [markdown]
# ### Square-root drivers are rays
# `sigma sqrt(t)` is scale invariant, so the traced curve is a straight line
# and `Re/Im` is constant.  Its slope sits between the two cone formulas.

# %%
for sigma in (0.25, 0.5, 1.0, 2.0):
    c = trace_curve(make_driver("sqrt_forward", sigma, 1.0), times)
    print(f"sigma={sigma:<5} ratio={c.ratio.mean():.6f} spread={np.ptp(c.ratio):.1e} "
          f"lower={bounds.cone_lower(sigma):.6f} m={bounds.m_sigma(sigma):.6f}")

# %% [markdown]
# ### A spiral
# Reversing the driver in time gives a curve that winds into its endpoint.

# %%
spiral = trace_curve(make_driver("sqrt_backward", 1.0, 1.0), np.linspace(0.5, 1.0, 65))
print(spiral.gamma[-5:])

# %%
with open("spiral.svg", "w") as fh:
    fh.write(render_svg(spiral.gamma, bounds.m_sigma(1.0)))
