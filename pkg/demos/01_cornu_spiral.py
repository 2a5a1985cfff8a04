# %% [markdown]
# # Summing phasors over mirror paths
#
# A source and a detector sit above a flat mirror.  Every straight-line bounce
# off the mirror is one path, and every path contributes one unit phasor
# `exp(i 2 pi L / lambda)`.  Adding them head to tail traces a Cornu spiral.

# %%
import numpy as np

from pathspace.paths import cornu_partial_sums, stationary_phase_shares, stream_sum, symmetric_mirror_stream

# %%
stream = symmetric_mirror_stream(10_000)
lengths = np.array([p.length for p in stream.paths])
print("paths:", len(stream), " shortest at index", lengths.argmin(), "of", len(lengths))

# %% [markdown]
# The trace curls up at both ends, where neighbouring paths differ most in
# length, and runs straight through the middle near the specular path.

# %%
trace = np.array(cornu_partial_sums(stream))
steps = np.linalg.norm(np.diff(trace, axis=0), axis=1)
chord = np.linalg.norm(trace[5500] - trace[4500])
print("middle 1000 steps cover a chord of", round(chord, 1), "out of", int(steps[4500:5500].sum()))

# %%
shares = stationary_phase_shares(stream)
for key in ("central", "head", "tail"):
    print(f"{key:>8}: {shares[key]:.4f} of |full sum| = {shares['full']:.2f}")

# %% [markdown]
# Doubling the number of paths changes the sum's direction very little.

# %%
a = stream_sum(stream).phase
b = stream_sum(symmetric_mirror_stream(20_000)).phase
print("direction change on refinement:", abs(np.angle(np.exp(1j * (a - b)))), "rad")
