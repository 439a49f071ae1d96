"""Loschmidt amplitude, rate function and critical-time trains.

Each mode contributes a factor

    g_k(t) = A_k exp(-i E_minus t) + B_k exp(-i E_plus t)

with A_k = <psi_i|-><-|psi_tau> (overlap through the lower final band) and
B_k = <psi_i|+><+|psi_tau>.  For the TFIM these are exactly the real
(u, v) products (u_i u_f + v_i v_f)(u_tau u_f + v_tau v_f) and
(u_i v_f - v_i u_f)(u_tau v_f - v_tau u_f).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import NotAtCriticalRate, PhaseUndefined, ValidationError
from .models import ModeGrid, ModelParams, eigenbasis, ground_spinor, validate_pair
from .ramp import DEFAULT_TOL, RampSchedule, evolve_ramp_batch

TINY = 1e-300
CRITICAL_REL_TOL = 1e-6
DEFAULT_N_MAX = 10
DEFAULT_TF_STEP = 1e-3


@dataclass(frozen=True)
class ModeOverlap:
    """Overlap data of a single mode."""

    k: object
    A: complex
    B: complex
    E_minus: float
    E_plus: float
    w_minus: float
    w_plus: float

    @property
    def gap(self) -> float:
        return self.E_plus - self.E_minus

    @property
    def phase_defined(self) -> bool:
        return abs(self.A) >= TINY and abs(self.B) >= TINY

    @property
    def phi(self) -> float:
        """Arg(A / B) in (-pi, pi]."""
        if not self.phase_defined:
            raise PhaseUndefined(f"|A|={abs(self.A):.3g}, |B|={abs(self.B):.3g}")
        return _arg(self.A / self.B)

    @property
    def residual(self) -> float:
        return abs(self.A) - abs(self.B)

    def factor(self, t):
        t = np.asarray(t, dtype=float)
        return self.A * np.exp(-1j * self.E_minus * t) + self.B * np.exp(-1j * self.E_plus * t)


def _arg(z):
    # np.angle returns [-pi, pi]; fold -pi onto pi
    a = np.where(np.angle(z) <= -np.pi, np.pi, np.angle(z))
    return a if a.ndim else float(a)


@dataclass(frozen=True)
class OverlapCoefficients:
    """Per-mode overlap data for a full grid (arrays in grid order).

    ``w_minus`` and ``w_plus`` are the populations |<-|psi_tau>|^2 and
    |<+|psi_tau>|^2 of the post-ramp state in the final eigenbasis.
    """

    k: np.ndarray
    A: np.ndarray
    B: np.ndarray
    E_minus: np.ndarray
    E_plus: np.ndarray
    w_minus: np.ndarray
    w_plus: np.ndarray
    normalizer: int

    def __len__(self):
        return len(self.A)

    @property
    def phase_defined(self) -> np.ndarray:
        return (np.abs(self.A) >= TINY) & (np.abs(self.B) >= TINY)

    @property
    def phi(self) -> np.ndarray:
        """Arg(A / B) per mode, NaN where undefined."""
        ok = self.phase_defined
        out = np.full(len(self), np.nan)
        out[ok] = _arg(self.A[ok] / self.B[ok])
        return out

    @property
    def residual(self) -> np.ndarray:
        return np.abs(self.A) - np.abs(self.B)

    def mode(self, j: int) -> ModeOverlap:
        return ModeOverlap(self.k[j], complex(self.A[j]), complex(self.B[j]), float(self.E_minus[j]),
                           float(self.E_plus[j]), float(self.w_minus[j]), float(self.w_plus[j]))

    def with_phase(self, j: int, phase: float) -> "OverlapCoefficients":
        """Copy with mode ``j``'s A and B multiplied by exp(i phase)."""
        A = self.A.copy()
        B = self.B.copy()
        A[j] *= np.exp(1j * phase)
        B[j] *= np.exp(1j * phase)
        return OverlapCoefficients(self.k, A, B, self.E_minus, self.E_plus, self.w_minus, self.w_plus,
                                   self.normalizer)


def overlap_coefficients(psi_i, psi_tau, basis, k=None, normalizer: int | None = None) -> OverlapCoefficients:
    """Assemble A, B for spinor stacks ``psi_i``, ``psi_tau`` of shape (M, 2).

    ``basis`` is the :class:`FinalEigenbasis` of the post-quench kernels.
    """
    psi_i = np.atleast_2d(np.asarray(psi_i, dtype=complex))
    psi_tau = np.atleast_2d(np.asarray(psi_tau, dtype=complex))
    lo, up = basis.minus, basis.plus
    o_lo_i = np.einsum("mi,mi->m", psi_i.conj(), lo)
    o_lo_t = np.einsum("mi,mi->m", lo.conj(), psi_tau)
    o_up_i = np.einsum("mi,mi->m", psi_i.conj(), up)
    o_up_t = np.einsum("mi,mi->m", up.conj(), psi_tau)
    if k is None:
        k = np.arange(len(psi_i))
    return OverlapCoefficients(
        k=np.asarray(k),
        A=o_lo_i * o_lo_t,
        B=o_up_i * o_up_t,
        E_minus=np.asarray(basis.E_minus, dtype=float),
        E_plus=np.asarray(basis.E_plus, dtype=float),
        w_minus=np.abs(o_lo_t) ** 2,
        w_plus=np.abs(o_up_t) ** 2,
        normalizer=int(normalizer if normalizer is not None else 2 * len(psi_i)),
    )


def quench_coefficients(initial: ModelParams, final: ModelParams, tau: float, grid: ModeGrid,
                        tol: float = DEFAULT_TOL) -> OverlapCoefficients:
    """Ground state of ``initial``, linear ramp over ``tau`` to ``final``, overlaps."""
    validate_pair(initial, final)
    schedule = RampSchedule(initial.drive, final.drive, tau)
    psi_i = ground_spinor(initial.kernel(grid.points))
    psi_tau = evolve_ramp_batch(initial, schedule, grid, tol=tol, initial=psi_i)
    basis = eigenbasis(final.kernel(grid.points))
    return overlap_coefficients(psi_i, psi_tau, basis, k=grid.points, normalizer=grid.normalizer)


def mode_factors(coeffs: OverlapCoefficients, t) -> np.ndarray:
    """g_k(t) with shape ``(len(t), M)``."""
    t = np.atleast_1d(np.asarray(t, dtype=float))[:, None]
    return coeffs.A * np.exp(-1j * coeffs.E_minus * t) + coeffs.B * np.exp(-1j * coeffs.E_plus * t)


def _log_g2(coeffs, t, chunk=2048):
    """Sum_k ln|g_k(t)|^2 and min_k |g_k(t)|^2, chunked over t."""
    t = np.atleast_1d(np.asarray(t, dtype=float))
    step = max(1, chunk * 64 // max(len(coeffs), 1))
    logs = np.empty(len(t))
    mins = np.empty(len(t))
    for s in range(0, len(t), step):
        g2 = np.abs(mode_factors(coeffs, t[s:s + step])) ** 2
        mins[s:s + step] = g2.min(axis=1)
        with np.errstate(divide="ignore"):
            logs[s:s + step] = np.log(g2).sum(axis=1)
    return logs, mins


def loschmidt_amplitude_sq(coeffs: OverlapCoefficients, t_f):
    """|G(t_f)|^2 = prod_k |g_k(t_f)|^2; scalar in, scalar out."""
    if np.any(np.asarray(t_f) < 0):
        raise ValidationError("t_f must be non-negative")
    logs, _ = _log_g2(coeffs, t_f)
    out = np.exp(logs)
    return float(out[0]) if np.ndim(t_f) == 0 else out


@dataclass(frozen=True)
class RateTrace:
    """Sampled Loschmidt echo.  ``rate`` is +inf where ``exact_zero`` is set."""

    t: np.ndarray
    echo: np.ndarray
    rate: np.ndarray
    exact_zero: np.ndarray
    normalizer: int

    def peaks(self) -> np.ndarray:
        """Indices of interior local maxima of the rate function."""
        r = self.rate
        return np.flatnonzero((r[1:-1] > r[:-2]) & (r[1:-1] >= r[2:])) + 1


def rate_trace(coeffs: OverlapCoefficients, t_grid) -> RateTrace:
    """lambda(t) = -(1/N) ln |G(t)|^2 on a monotone grid of hold times."""
    t = np.asarray(t_grid, dtype=float)
    if t.ndim != 1 or len(t) == 0:
        raise ValidationError("t grid must be a non-empty 1-d array")
    if np.any(np.diff(t) < 0):
        raise ValidationError("t grid must be monotone")
    logs, mins = _log_g2(coeffs, t)
    zero = mins < TINY
    rate = np.where(zero, np.inf, -logs / coeffs.normalizer)
    echo = np.where(zero, 0.0, np.exp(logs))
    return RateTrace(t, echo, rate, zero, coeffs.normalizer)


def tf_grid(tf_max: float, step: float = DEFAULT_TF_STEP) -> np.ndarray:
    n = int(round(tf_max / step))
    return np.arange(n + 1) * step


@dataclass(frozen=True)
class CriticalTimeTrain:
    """Zeros t_c(n) = [pi (2n + 1) - phi] / (E_plus - E_minus) of one mode factor."""

    k: object
    phi: float
    period: float
    n: np.ndarray
    times: np.ndarray = field(repr=False)

    @property
    def base(self) -> float:
        return float(self.times[0])


def critical_times(mode: ModeOverlap, n_max: int = DEFAULT_N_MAX,
                   rel_tol: float = CRITICAL_REL_TOL) -> CriticalTimeTrain:
    """Critical-time train of a mode tuned to |A| = |B|.

    For the chains E_plus - E_minus = 2 eps_k and this is
    t_c = (pi / eps)(n + 1/2) - phi / (2 eps).
    """
    a, b = abs(mode.A), abs(mode.B)
    scale = max(a, b)
    if scale == 0 or abs(a - b) / scale > rel_tol:
        raise NotAtCriticalRate(f"||A|-|B||/max = {abs(a - b) / max(scale, TINY):.3g} exceeds {rel_tol:g}")
    phi = mode.phi
    gap = mode.gap
    n = np.arange(n_max + 1)
    times = (np.pi * (2 * n + 1) - phi) / gap
    return CriticalTimeTrain(mode.k, phi, 2 * np.pi / gap, n, times)
