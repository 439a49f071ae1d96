# How slow can the ramp be?
#
# Each mode has its own critical duration, and the smallest momentum pi / N
# needs the longest ramp.  Beyond that duration, tau_max, the evolution is
# too adiabatic for any mode to balance.  Here we list the critical
# durations across the inter-phase quench 0.5 -> 1.5, then watch tau_max
# grow with the chain length.
import math

import numpy as np

from lezquench import TfimParams, find_tau_c, fit_power_law, tau_max

initial, final = TfimParams(0.5), TfimParams(1.5)

for j in (7, 5, 3, 1):
    r = find_tau_c(initial, final, j * math.pi / 50)
    print(f"k = {j}pi/50: tau_c = {r.tau_c:.6g}")

# A quench inside one phase never balances any mode
try:
    find_tau_c(TfimParams(0.5), TfimParams(0.9), 7 * math.pi / 50, tau_range=(1e-3, 1e2), n_scan=120)
except Exception as exc:
    print("0.5 -> 0.9:", type(exc).__name__)

sizes = np.array([10, 20, 40, 60])
taus = np.array([tau_max(initial, final, int(n)).tau_c for n in sizes])
for n, t in zip(sizes, taus):
    print(f"N = {n:3d}: tau_max = {t:.4g}")
a, b, rms = fit_power_law(sizes, taus)
print(f"log-log fit over these sizes: tau_max ~ {a:.4g} N^{b:.4f}")

# Pairwise slopes show the effective exponent; beyond N ~ 40 it falls slowly with N
print("pairwise slopes:", np.round(np.diff(np.log(taus)) / np.diff(np.log(sizes)), 3))
