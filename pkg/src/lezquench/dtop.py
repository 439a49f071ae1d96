"""Dynamical topological order parameter from Pancharatnam geometric phases.

For each mode the geometric phase is the total phase of its Loschmidt
factor with the dynamical phase removed,

    phi_G(k, t) = Arg g_k(t) - Arg g_k(0) + t * (w_minus E_minus + w_plus E_plus),

where w_minus, w_plus are the populations of the post-ramp state in the
final eigenbasis.  The order parameter is the winding of phi_G across the
positive half of the zone, summed from wrapped nearest-neighbour
differences on the finite momentum grid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UndefinedAtZero
from .loschmidt import ModeOverlap, OverlapCoefficients, mode_factors

ZERO_TOL = 1e-14


def _wrap(x):
    return np.angle(np.exp(1j * x))


def geometric_phase(mode: ModeOverlap, t_f: float) -> float:
    """Pancharatnam phase of one mode at hold time ``t_f``, wrapped to (-pi, pi]."""
    g = mode.factor(t_f)
    g0 = mode.factor(0.0)
    if abs(g) < ZERO_TOL or abs(g0) < ZERO_TOL:
        raise UndefinedAtZero(f"mode factor vanishes at t_f={t_f}")
    dyn = t_f * (mode.w_minus * mode.E_minus + mode.w_plus * mode.E_plus)
    phase = float(_wrap(np.angle(g) - np.angle(g0) + dyn))
    return np.pi if phase <= -np.pi else phase


@dataclass(frozen=True)
class DtopTrace:
    t: np.ndarray
    nu: np.ndarray
    phases: np.ndarray

    @property
    def winding(self) -> np.ndarray:
        return np.rint(self.nu).astype(int)


def geometric_phases(coeffs: OverlapCoefficients, t_grid) -> np.ndarray:
    """phi_G for every (t, k), shape ``(len(t), M)``."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    g = mode_factors(coeffs, t)
    g0 = coeffs.A + coeffs.B
    dyn = t[:, None] * (coeffs.w_minus * coeffs.E_minus + coeffs.w_plus * coeffs.E_plus)
    return _wrap(np.angle(g) - np.angle(g0) + dyn)


def dtop_trace(coeffs: OverlapCoefficients, t_grid) -> DtopTrace:
    """nu(t) = (1 / 2 pi) * sum of wrapped phase differences between adjacent modes."""
    t = np.atleast_1d(np.asarray(t_grid, dtype=float))
    phases = geometric_phases(coeffs, t)
    nu = _wrap(np.diff(phases, axis=1)).sum(axis=1) / (2 * np.pi)
    return DtopTrace(t, nu, phases)


def plateaus(trace: DtopTrace, crossings, margin: float):
    """Rounded winding on each window between consecutive ``crossings``.

    Samples closer than ``margin`` to any crossing are excluded.  Returns a
    list of ``(window_start, window_end, values, max_dev)`` where ``values``
    is the sorted set of rounded windings seen in the window and ``max_dev``
    the largest distance of nu from its rounded value there.
    """
    edges = np.concatenate([[-np.inf], np.sort(np.asarray(crossings, dtype=float)), [np.inf]])
    out = []
    for lo, hi in zip(edges[:-1], edges[1:]):
        sel = (trace.t > lo + margin) & (trace.t < hi - margin)
        if np.any(sel):
            out.append((lo, hi, sorted(set(trace.winding[sel].tolist())), float(np.max(np.abs(trace.nu[sel] - trace.winding[sel])))))
    return out
