# %% [markdown]
# # Running the verification sweep
#
# The default sweep covers eight seminorms, two horizons, two start heights
# and twenty random walks per seminorm.  It takes roughly half a minute.

# %%
from quasislit.verify import SweepConfig, run_suite

rep = run_suite(SweepConfig())
print("passed:", rep.passed)

# %%
for name, counts in sorted(rep.summary().items()):
    print(f"{name:28s} {counts}")

# %% [markdown]
# ### Tightest cases
# Margins closest to zero for the cone bound, relative to the bound.

# %%
cone = sorted((e for e in rep.entries if e.check == "cone_L"),
              key=lambda e: e.margin / e.bound)
for e in cone[:5]:
    print(e.driver, e.t, e.y0, f"{e.measured:.4f} <= {e.bound:.4f}")

# %%
rep.to_json("report.json")
rep.to_csv("summary.csv")
