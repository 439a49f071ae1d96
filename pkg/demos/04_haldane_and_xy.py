# Beyond the Ising chain
#
# The same machinery handles any two-band model whose drive enters the
# d-vector linearly or through sin/cos.  In the anisotropic XY chain only
# part of the zone can be tuned; in the Haldane model the drive is the
# next-nearest-neighbour phase theta, ramped from 0 to pi/2 across the
# topological transition at theta = pi/3 (for M = 4.5, t2 = 1).
import math

import numpy as np

from lezquench import HaldaneParams, haldane_phase_boundary, select_haldane_convention, xy_lez_modes

print("Haldane critical angles for M = 4.5:", np.round(haldane_phase_boundary(1.0, 4.5), 6))

k = np.array([4 * math.sqrt(3) * math.pi / 15, 2 * math.pi / 3])
start = HaldaneParams(1.0, 1.0, 0.0, 4.5)
conv, res, log = select_haldane_convention(start, start.with_drive(math.pi / 2), k, 15.3199)
for entry in log:
    print("  tried", entry)
print(f"chosen lattice convention: {conv.name}; tau_c = {res.tau_c:.6f}")

# The XY census takes a little while: every mode is scanned over tau in [1e-3, 1e3]
modes = xy_lez_modes(0.5, 0.5, 1.5, 50)
print("XY (kappa = 0.5) tunable modes, in units of pi/50:", [round(k * 50 / math.pi) for k in modes])
