"""
Kernels and predicted rates
===========================

A kernel is fixed by the dimension ``d``, the order ``m`` and a shift
``mu``. Here we look at which radial function comes out, the lowest
polynomial degree the interpolation system needs, and the error slope
predicted for data of smoothness ``k``.
"""

import numpy as np

from roughspline import eval_kernel, make_kernel, predicted_rate

# %%
# Odd powers, and the log branch for even exponents (thin-plate in 2D).
for d, m, mu in [(1, 2, 0.0), (2, 2, 0.0), (3, 2, 0.0), (2, 3, 0.5)]:
    k = make_kernel(d, m, mu)
    form = f"r^{k.beta:g} log r" if k.log_branch else f"r^{k.beta:g}"
    print(f"d={d} m={m} mu={mu}: {form}, poly degree {k.poly_degree}, sign {k.sign:+d}")

# %%
# Values on a few radii. r = 0 is handled explicitly for the log branch.
tps = make_kernel(2, 2)
r = np.array([0.0, 0.5, 1.0, 2.0])
print("thin-plate:", eval_kernel(tps, r))

# %%
# Rough data: the predicted rate drops with k.
cubic = make_kernel(1, 2)
for k in (1, 2):
    print(f"k={k}: predicted slope {predicted_rate(cubic, k):.3f}")
