"""Spaces, the unit-cube encoding, and Latin Hypercube starts.

Every optimizer component works on [0, 1]^D; spaces translate between
raw parameter values and that cube. Bounds here are illustrative
choices, not recommendations.
"""

import numpy as np

from houses import ParamSpec, SearchSpace, lhs_sample

space = SearchSpace([
    ParamSpec("learning_rate", "continuous", 1e-4, 1e-1, "logarithmic"),
    ParamSpec("layers", "integer", 1, 8),
    ParamSpec("dropout", "continuous", 0.0, 0.9),
])

print(f"space with {space.dim} parameters: {space.names}")

raw = [1e-3, 4, 0.45]
unit = space.normalize(raw)
print(f"raw {raw} -> unit {np.round(unit, 4)}")
print(f"back to raw: {space.denormalize(unit)}")

# log-scaled parameters move linearly in exponent space
for lr in (1e-4, 1e-3, 1e-2, 1e-1):
    print(f"  lr={lr:g} sits at unit coordinate {space.params[0].to_unit(lr):.3f}")

# a Latin Hypercube start covers every axis evenly: exactly one point
# per 1/n slice of every dimension
samples = lhs_sample(space, n=6, seed=42)
units = np.array([c.unit for c in samples])
print("\nLHS sample (unit coordinates):")
print(np.round(units, 3))
for d in range(space.dim):
    bins = sorted(int(b) for b in np.minimum((units[:, d] * 6).astype(int), 5))
    print(f"  dimension {d} occupies bins {bins}")
