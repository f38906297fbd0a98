"""
Rough targets and their seminorms
=================================

``|x - c|^alpha`` has only finitely many square-integrable derivatives.
Below that order the seminorm converges under panel refinement; above it
the values keep growing.
"""

from roughspline import Domain, beppo_levi_seminorm, make_power_cusp, make_smooth_reference

unit = Domain.unit_box(1)
cusp = make_power_cusp(1, [0.5], 0.6)
print(f"cusp alpha=0.6: smoothness order {cusp.k_max():.2f}")

# %%
# Order 1 is fine, but the integrand is singular at the cusp, so ask for
# deeper grading toward it.
for panels in (8, 16, 32):
    v = beppo_levi_seminorm(cusp, 1, unit, panels=panels, grading_levels=40)
    print(f"|f|_1 with {panels} panels: {v:.6f}")

# %%
# Order 2 diverges: every doubling adds a sizeable chunk.
for panels in (8, 16, 32, 64):
    print(f"|f|_2 with {panels} panels: {beppo_levi_seminorm(cusp, 2, unit, panels=panels):.1f}")

# %%
# Smooth references for comparison.
wave = make_smooth_reference("sine", d=1, frequency=2.0)
print(f"sine |f|_2 = {beppo_levi_seminorm(wave, 2, unit):.6f}")
