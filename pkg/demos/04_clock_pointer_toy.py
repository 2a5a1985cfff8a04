# %% [markdown]
# # Classical clock-pointer toy
#
# Both objects leave with a pointer at the same random angle.  Each side adds
# its setting; a pointer in `(0, pi]` takes the upper branch.  With settings
# drawn from 0, 2pi/3, 4pi/3 the two sides agree 1/3 of the time whenever the
# settings differ.

# %%
from pathspace.toy import STATED_INTERMEDIATES, toy_correlation, toy_table

# %%
for row in toy_table(n_trials=1_000_000, seed=7):
    print(f"{row['alpha']:.4f} {row['beta']:.4f}  exact {row['p_analytic']:.6f}  MC {row['p_mc']:.6f}")

# %% [markdown]
# For arbitrary settings the agreement falls off linearly with the circular
# gap, unlike the cosine-squared law of the interferometer.

# %%
for gap in (0.0, 0.5, 1.0, 1.5, 2.0, 2.5, 3.0):
    print(f"gap {gap:.1f}: {toy_correlation(gap, 0.0):.4f}")

# %%
print(STATED_INTERMEDIATES)
