"""
Point sets and their geometry
=============================

Fill distance ``h`` measures the largest hole, separation ``q`` the
closest pair, and the mesh ratio ``h/q`` how uniform a set is.
"""

import numpy as np

from roughspline import (Domain, generate_halton, generate_jittered_grid,
                         geometry_stats, is_unisolvent)

square = Domain.unit_box(2)

# %%
# A perfect grid has h = sqrt(d)/(2n) and q = 1/(2n).
grid = generate_jittered_grid(square, 8, 0.0, seed=0)
st = geometry_stats(grid, 257)
print(f"grid: h={st.fill_distance:.4f} (exact {np.sqrt(2) / 16:.4f}), q={st.separation:.4f}")

# %%
# Jitter keeps the mesh ratio bounded; Halton points are quasi-uniform too.
for j in (0.1, 0.3, 0.6):
    st = geometry_stats(generate_jittered_grid(square, 8, j, seed=1), 257)
    print(f"jitter {j}: mesh ratio {st.mesh_ratio:.2f}")
st = geometry_stats(generate_halton(square, 64), 257)
print(f"halton 64: mesh ratio {st.mesh_ratio:.2f}")

# %%
# Collinear points cannot determine a plane.
from roughspline import PointSet
line = PointSet(np.column_stack([np.linspace(0, 1, 5), np.linspace(0, 1, 5)]), square)
print("collinear, degree 1:", is_unisolvent(line, 1))
print("grid, degree 1:", is_unisolvent(grid, 1))
