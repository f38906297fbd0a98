"""
Interpolating scattered data
============================

Build a thin-plate interpolant on Halton points, check that it hits the
data, reproduces linear functions, and survive a JSON round trip.
"""

import numpy as np

from roughspline import Domain, Interpolant, generate_halton, interpolate, make_kernel

tps = make_kernel(2, 2)
nodes = generate_halton(Domain.unit_box(2), 100)
x, y = nodes.points.T
vals = np.sin(3 * x) * np.cos(2 * y)

s = interpolate(tps, nodes, vals)
print(f"condition estimate {s.condition_estimate:.2e}")
print(f"node residual {np.max(np.abs(s(nodes.points) - vals)):.1e}")

# %%
# Error away from the nodes.
probe = np.random.default_rng(0).random((2000, 2))
exact = np.sin(3 * probe[:, 0]) * np.cos(2 * probe[:, 1])
print(f"max error on random probes {np.max(np.abs(s(probe) - exact)):.2e}")

# %%
# Linear data is matched by the polynomial part alone.
lin = interpolate(tps, nodes, 1 + 2 * x - y)
print(f"kernel coefficients for linear data: {np.max(np.abs(lin.b)):.1e}")

# %%
# Native energy grows as nodes are added.
more = generate_halton(Domain.unit_box(2), 200)
big = interpolate(tps, more, np.sin(3 * more.points[:, 0]) * np.cos(2 * more.points[:, 1]))
print(f"energy 100 nodes {s.native_energy():.4f}, 200 nodes {big.native_energy():.4f}")

back = Interpolant.from_json(s.to_json())
print("round trip identical:", np.array_equal(back(probe), s(probe)))
