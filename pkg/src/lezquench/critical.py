"""Quench durations that tune a momentum mode onto an exact Loschmidt zero.

A mode produces exact zeros of the Loschmidt amplitude when |A| = |B|.  The
residual |A| - |B| is a smooth function of the ramp duration tau; roots are
bracketed by a sign scan on a log-spaced tau grid and refined with Brent's
method.  The scan itself runs the integrator at a looser tolerance (only
signs matter there); every bracket is re-checked at the full tolerance
before refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from .errors import NoRealSolution, NoRootInRange, ValidationError
from .loschmidt import DEFAULT_N_MAX, CriticalTimeTrain, ModeOverlap, critical_times, overlap_coefficients
from .models import (
    HALDANE_CONVENTIONS,
    HaldaneParams,
    ModelParams,
    TfimParams,
    XyParams,
    chain_grid,
    eigenbasis,
    ground_spinor,
    locate_on_haldane_grid,
    validate_pair,
)
from .ramp import DEFAULT_TOL, RampSchedule, evolve_ramp, parallel_map

SCAN_POINTS = 400
SCAN_TOL = 1e-6
DEFAULT_TAU_RANGE = (1e-3, 1e3)


@dataclass(frozen=True)
class CriticalRateResult:
    k: object
    tau_c: float
    residual: float
    phi: float
    train: CriticalTimeTrain
    mode: ModeOverlap = field(repr=False)
    bracket: tuple = ()


@dataclass(frozen=True)
class ScalingFit:
    """tau_max(N) = prefactor * N ** exponent, fitted in log-log space."""

    prefactor: float
    exponent: float
    sizes: np.ndarray
    taus: np.ndarray
    rms: float

    def predict(self, N):
        return self.prefactor * np.asarray(N, dtype=float) ** self.exponent


def mode_overlap(initial: ModelParams, final: ModelParams, k, tau: float,
                 tol: float = DEFAULT_TOL) -> ModeOverlap:
    """A, B and final energies of a single mode after a ramp of length ``tau``."""
    psi_i = ground_spinor(initial.kernel(k))
    psi_tau = evolve_ramp(initial, RampSchedule(initial.drive, final.drive, tau), k, psi_i, tol=tol)
    basis = eigenbasis(final.kernel(k))
    return overlap_coefficients(psi_i, psi_tau, basis, k=[k], normalizer=1).mode(0)


def lez_residual(initial: ModelParams, final: ModelParams, k, tau: float,
                 tol: float = DEFAULT_TOL) -> float:
    """Signed residual |A| - |B| of mode ``k`` for a ramp of duration ``tau``."""
    if not tau >= 0:
        raise ValidationError("tau must be non-negative")
    return mode_overlap(initial, final, k, tau, tol).residual


def scan_grid(tau_range, n_scan: int = SCAN_POINTS) -> np.ndarray:
    lo, hi = tau_range
    if not 0 < lo < hi:
        raise ValidationError(f"tau range must satisfy 0 < lo < hi, got {tau_range}")
    return np.geomspace(lo, hi, n_scan)


def scan_brackets(initial, final, k, taus, which: str = "all", scan_tol: float = SCAN_TOL):
    """Sign-change brackets of the residual on the points ``taus``.

    ``which="smallest"`` walks upward and stops at the first bracket,
    ``"largest"`` walks downward, ``"all"`` returns every bracket in
    ascending order.
    """
    if which not in ("smallest", "largest", "all"):
        raise ValidationError(f"which must be smallest, largest or all, got {which!r}")
    order = taus[::-1] if which == "largest" else taus
    brackets = []
    prev_t, prev_r = None, None
    for t in order:
        r = lez_residual(initial, final, k, t, tol=scan_tol)
        if prev_r is not None and (r == 0 or prev_r * r < 0):
            brackets.append((min(prev_t, t), max(prev_t, t)))
            if which != "all":
                break
        prev_t, prev_r = t, r
    return brackets


def _refine(initial, final, k, bracket, tol, n_max):
    f = lambda t: lez_residual(initial, final, k, t, tol=tol)  # noqa: E731
    a, b = bracket
    fa, fb = f(a), f(b)
    if fa * fb > 0:
        return None
    root = a if fa == 0 else b if fb == 0 else brentq(f, a, b, xtol=1e-14, rtol=4 * np.finfo(float).eps,
                                                       maxiter=500)
    mode = mode_overlap(initial, final, k, root, tol)
    half = 5e-9 * root
    lo, hi = f(root - half), f(root + half)
    if lo * hi > 0 and mode.residual != 0:
        return None
    train = critical_times(mode, n_max=n_max)
    return CriticalRateResult(k, float(root), mode.residual, train.phi, train, mode, (root - half, root + half))


def find_tau_c(initial: ModelParams, final: ModelParams, k, tau_range=DEFAULT_TAU_RANGE,
               which: str = "smallest", n_scan: int = SCAN_POINTS, tol: float = DEFAULT_TOL,
               scan_tol: float = SCAN_TOL, n_max: int = DEFAULT_N_MAX):
    """Ramp duration(s) at which mode ``k`` satisfies |A| = |B|.

    Parameters
    ----------
    initial, final : model parameters
        Pre- and post-quench models; they may differ only in the drive.
    k : float or (2,) array
        Momentum of the mode to tune.
    tau_range : (float, float)
        Positive scan interval.
    which : {"smallest", "largest", "all"}
        Root selection.  ``"all"`` returns a list.

    Raises
    ------
    NoRootInRange
        If no sign change is found (e.g. k > k_s, or an intra-phase TFIM quench).
    """
    validate_pair(initial, final)
    taus = scan_grid(tau_range, n_scan)
    brackets = scan_brackets(initial, final, k, taus, which=which, scan_tol=scan_tol)
    results = [r for r in (_refine(initial, final, k, b, tol, n_max) for b in brackets) if r is not None]
    if brackets and not results and which != "all":
        # the coarse bracket failed the full-tolerance check; fall back to every bracket
        ordered = scan_brackets(initial, final, k, taus, "all", scan_tol)
        for b in (ordered[::-1] if which == "largest" else ordered):
            res = _refine(initial, final, k, b, tol, n_max)
            if res is not None:
                results = [res]
                break
    if not results:
        raise NoRootInRange(f"no |A|=|B| crossing for k={k} in tau range {tau_range}")
    if which == "all":
        return sorted(results, key=lambda r: r.tau_c)
    return results[0]


def sudden_ks(h_i: float, h_f: float) -> float:
    """Momentum at which a sudden TFIM quench h_i -> h_f has |A| = |B|."""
    if not (h_i > 0 and h_f > 0):
        raise ValidationError("h_i and h_f must be positive")
    prod = -(h_i - 1.0) * (h_f - 1.0)
    if not prod > 0:
        raise NoRealSolution(f"h_i={h_i} and h_f={h_f} lie in the same phase")
    return 2.0 * math.atan(math.sqrt(prod) / math.sqrt((1.0 + h_i) * (1.0 + h_f)))


def default_tau_range(N: int, prefactor_guess: float = 1.0):
    return (1e-3, 10.0 * N * N * max(1.0, prefactor_guess))


def tau_max(initial: ModelParams, final: ModelParams, N: int, tau_range=None, **kw) -> CriticalRateResult:
    """Largest critical duration of the slowest mode k = pi / N."""
    chain_grid(N)
    if tau_range is None:
        tau_range = default_tau_range(N)
    return find_tau_c(initial, final, math.pi / N, tau_range=tau_range, which="largest", **kw)


def fit_power_law(sizes, taus):
    """Least-squares line through (ln N, ln tau); returns (prefactor, exponent, rms)."""
    x = np.log(np.asarray(sizes, dtype=float))
    y = np.log(np.asarray(taus, dtype=float))
    slope, intercept = np.polyfit(x, y, 1)
    rms = float(np.sqrt(np.mean((y - (slope * x + intercept)) ** 2)))
    return float(math.exp(intercept)), float(slope), rms


def scaling_fit(initial: ModelParams, final: ModelParams, sizes, **kw) -> ScalingFit:
    """Fit tau_max(N) = a N^b over ``sizes`` (at least five even chain lengths)."""
    sizes = [int(n) for n in sizes]
    if len(sizes) < 5:
        raise ValidationError("scaling fit needs at least five sizes")
    for n in sizes:
        chain_grid(n)
    results = parallel_map(lambda n: tau_max(initial, final, n, **kw), sizes)
    taus = np.array([r.tau_c for r in results])
    a, b, rms = fit_power_law(sizes, taus)
    return ScalingFit(a, b, np.array(sizes), taus, rms)


def lez_modes(initial: ModelParams, final: ModelParams, grid_points, tau_range=DEFAULT_TAU_RANGE,
              n_scan: int = SCAN_POINTS, scan_tol: float = SCAN_TOL, tol: float = DEFAULT_TOL):
    """Momenta whose residual changes sign somewhere in ``tau_range``.

    Sign changes found by the coarse scan are confirmed at ``tol``.
    """
    validate_pair(initial, final)
    taus = scan_grid(tau_range, n_scan)

    def tunable(k):
        for a, b in scan_brackets(initial, final, k, taus, "all", scan_tol):
            if lez_residual(initial, final, k, a, tol) * lez_residual(initial, final, k, b, tol) <= 0:
                return True
        return False

    points = list(grid_points)
    flags = parallel_map(tunable, points)
    return [k for k, ok in zip(points, flags) if ok]


def xy_lez_modes(kappa: float, h_i: float, h_f: float, N: int, tau_range=DEFAULT_TAU_RANGE, **kw):
    """LEZ-tunable momenta of the XY chain on the N-site grid (ascending)."""
    return lez_modes(XyParams(kappa, h_i), XyParams(kappa, h_f), chain_grid(N).points, tau_range, **kw)


def tfim_lez_modes(h_i: float, h_f: float, N: int, tau_range=DEFAULT_TAU_RANGE, **kw):
    return lez_modes(TfimParams(h_i), TfimParams(h_f), chain_grid(N).points, tau_range, **kw)


def haldane_find_tau(initial: HaldaneParams, final: HaldaneParams, k, L=(50, 50),
                     tau_range=(1e-2, 1e2), **kw) -> CriticalRateResult:
    """find_tau_c for a Haldane mode; ``k`` must lie on the Lx x Ly grid."""
    on_grid, mn, k_grid = locate_on_haldane_grid(k, L[0], L[1], initial.convention)
    if not on_grid:
        raise ValidationError(f"k={tuple(k)} is not on the {L[0]}x{L[1]} grid; nearest point {mn} at {tuple(k_grid)}")
    return find_tau_c(initial, final, np.asarray(k, dtype=float), tau_range=tau_range, **kw)


def select_haldane_convention(initial: HaldaneParams, final: HaldaneParams, k, target_tau: float,
                              rel_tol: float = 5e-3, L=(50, 50), tau_range=(1e-2, 1e2),
                              conventions=HALDANE_CONVENTIONS):
    """First lattice convention whose critical duration at ``k`` matches ``target_tau``.

    Returns ``(convention, result, log)``; ``log`` records every attempt as a
    dict.  ``convention`` is None when nothing matches.
    """
    from dataclasses import replace

    log = []
    for conv in conventions:
        ini, fin = replace(initial, convention=conv), replace(final, convention=conv)
        on_grid, mn, k_grid = locate_on_haldane_grid(k, L[0], L[1], conv)
        entry = {"convention": conv.name, "on_grid": on_grid, "grid_index": list(mn), "tau_c": None}
        try:
            res = find_tau_c(ini, fin, np.asarray(k_grid if not on_grid else k, dtype=float), tau_range=tau_range)
        except NoRootInRange:
            log.append(entry)
            continue
        entry["tau_c"] = res.tau_c
        log.append(entry)
        if on_grid and abs(res.tau_c - target_tau) <= rel_tol * target_tau:
            return conv, res, log
    return None, None, log
