# %% [markdown]
# # Mach-Zehnder interferometer and the bomb test
#
# Each route through a square interferometer picks up a factor `i` per
# reflection.  The two routes into D1 carry one and three reflections and
# cancel; the two into D2 carry two each and add.

# %%
from pathspace.interferometers import MziSpec, ifm_report, mzi_amplitudes, mzi_probabilities
from pathspace.sqm import sqm_mzi

# %%
spec = MziSpec(side_length=0.1, wavelength=1e-6)
a1, a2 = mzi_amplitudes(spec)
print("amp D1 =", complex(a1), " amp D2 =", complex(a2))
print("P(D1, D2, absorbed) =", mzi_probabilities(spec))
print("matrix oracle       =", sqm_mzi(0.0))

# %% [markdown]
# Block one arm and the cancellation at D1 disappears.  A which-path probe
# has the same effect without absorbing anything.

# %%
for blocked, probe in [("lower", False), ("upper", False), (None, True)]:
    print(blocked, probe, mzi_probabilities(MziSpec(blocked_arm=blocked, which_path_probe=probe)))

# %% [markdown]
# Put a bomb in the lower arm.  A live bomb absorbs the photon half the time;
# a click at D1 certifies a live bomb that never saw a photon.

# %%
n = 1_000_000
live = ifm_report(n, 1.0, seed=2024)
dud = ifm_report(n, 0.0, seed=2024)
print("live:", {k: v / n for k, v in live.items() if k != "n_bombs"})
print("dud: ", {k: v / n for k, v in dud.items() if k != "n_bombs"})
