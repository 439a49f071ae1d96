# The winding of the geometric phase on a finite grid
#
# Away from its zeros every mode has a well-defined Pancharatnam phase:
# the phase of its Loschmidt factor minus the dynamical phase.  Summing the
# wrapped differences between neighbouring modes gives a winding number.
# With the tuned mode on the grid the first jump lands on t_c(0); later
# jumps drift away from the critical times because neighbouring modes
# accumulate different phase velocities, and a coarse grid cannot resolve
# the jump region.  A finer grid pushes that breakdown to later times.
import math

import numpy as np

from lezquench import TfimParams, chain_grid, dtop_trace, find_tau_c, quench_coefficients

initial, final = TfimParams(0.5), TfimParams(1.5)
t = np.arange(0.0, 12.0, 1e-3)
for N, j in [(50, 7), (200, 28)]:
    res = find_tau_c(initial, final, j * math.pi / N)
    trace = dtop_trace(quench_coefficients(initial, final, res.tau_c, chain_grid(N)), t)
    w = trace.winding
    jumps = t[1:][np.diff(w) != 0]
    print(f"N = {N}: t_c = {np.round(res.train.times[:6], 3)}")
    print(f"        winding changes at {np.round(jumps, 3)}")
