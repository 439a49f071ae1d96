# Tuning one momentum mode onto an exact Loschmidt zero
#
# A 50-site Ising chain starts in the ground state at h = 0.5 and the field
# is ramped linearly to h = 1.5 over a time tau.  A sudden quench would need
# a mode at k_s to produce exact zeros of the echo, and k_s is generally not
# on the finite grid.  Changing tau moves the balance |A| - |B| of every
# mode, so we can pick a grid mode and solve for the tau at which it
# balances.
import math

import numpy as np

from lezquench import TfimParams, chain_grid, find_tau_c, quench_coefficients, rate_trace, sudden_ks
from lezquench.loschmidt import tf_grid

initial, final = TfimParams(0.5), TfimParams(1.5)
N = 50

ks = sudden_ks(0.5, 1.5)
grid = chain_grid(N)
print(f"k_s = {ks:.5f}; nearest grid momenta {grid.points[3]:.5f}, {grid.points[4]:.5f}")

# Solve |A| = |B| for the mode k = 7 pi / 50 (grid index 4, counting from 1)
res = find_tau_c(initial, final, 7 * math.pi / N)
print(f"tau_c = {res.tau_c:.7f}, residual {res.residual:.1e}, phi = {res.phi:.5f}")
print("predicted zeros t_c(n):", np.round(res.train.times[:6], 5))

# The rate function now spikes at exactly those times
coeffs = quench_coefficients(initial, final, res.tau_c, grid)
trace = rate_trace(coeffs, tf_grid(12.0, 1e-3))
peaks = trace.t[trace.peaks()]
print("sampled rate maxima near them:", np.round(np.sort(peaks[np.argsort(-trace.rate[trace.peaks()])][:6]), 3))

# Sampling exactly at t_c shows how deep the zero is
print("|G(t_c)|^2 at n = 0..5:", [f"{x:.1e}" for x in rate_trace(coeffs, res.train.times[:6]).echo])

# Away from tau_c the same mode no longer balances and the spikes are finite
for tau in (0.9 * res.tau_c, 1.1 * res.tau_c):
    c = quench_coefficients(initial, final, tau, grid)
    print(f"tau = {tau:.3f}: max rate {rate_trace(c, tf_grid(12.0, 1e-3)).rate.max():.3f}")
