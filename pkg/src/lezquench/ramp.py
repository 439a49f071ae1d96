"""Time evolution of a momentum mode through the linear ramp.

Each mode obeys i d/dt psi = H_k(p(t)) psi with the drive
p(t) = p_i + (p_f - p_i) t / tau.  The d-vector depends on the drive through

    d(p) = c0 + c1 * p + c2 * sin(p) + c3 * cos(p)

(see ``drive_coefficients`` on the model classes), which lets one compiled
integrator serve every model.  The integrator is the embedded
Dormand-Prince 5(4) pair with FSAL and standard step-size control.
"""

from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .errors import StepUnderflow, ValidationError
from .models import ModeGrid, ModelParams, ground_spinor

DEFAULT_TOL = 1e-10
MAX_STEPS = 200_000_000

# Dormand-Prince 5(4) tableau
_C2, _C3, _C4, _C5 = 1 / 5, 3 / 10, 4 / 5, 8 / 9
_A21 = 1 / 5
_A31, _A32 = 3 / 40, 9 / 40
_A41, _A42, _A43 = 44 / 45, -56 / 15, 32 / 9
_A51, _A52, _A53, _A54 = 19372 / 6561, -25360 / 2187, 64448 / 6561, -212 / 729
_A61, _A62, _A63, _A64, _A65 = 9017 / 3168, -355 / 33, 46732 / 5247, 49 / 176, -5103 / 18656
_B1, _B3, _B4, _B5, _B6 = 35 / 384, 500 / 1113, 125 / 192, -2187 / 6784, 11 / 84
# 5th minus 4th order weights
_E1 = 35 / 384 - 5179 / 57600
_E3 = 500 / 1113 - 7571 / 16695
_E4 = 125 / 192 - 393 / 640
_E5 = -2187 / 6784 + 92097 / 339200
_E6 = 11 / 84 - 187 / 2100
_E7 = -1 / 40


@dataclass(frozen=True)
class RampSchedule:
    """Linear drive from ``p_i`` to ``p_f`` over ``tau``; ``tau = 0`` is a sudden quench."""

    p_i: float
    p_f: float
    tau: float

    def __post_init__(self):
        if not self.tau >= 0 or not math.isfinite(self.tau):
            raise ValidationError(f"tau must be finite and >= 0, got {self.tau}")

    @property
    def rate(self) -> float:
        if self.tau == 0:
            return math.inf if self.p_f != self.p_i else 0.0
        return (self.p_f - self.p_i) / self.tau

    def drive(self, t):
        t = np.asarray(t, dtype=float)
        if self.tau == 0:
            return np.full_like(t, self.p_f)
        return np.where(t <= self.tau, self.p_i + (self.p_f - self.p_i) * t / self.tau, self.p_f)

    def reversed(self) -> "RampSchedule":
        return RampSchedule(self.p_f, self.p_i, self.tau)


@numba.njit(cache=True, nogil=True)
def _rhs(c, p_i, dp, tau, t, y0, y1, sgn):
    p = p_i + dp * (t / tau)
    sp = math.sin(p)
    cp = math.cos(p)
    dx = c[0, 0] + c[1, 0] * p + c[2, 0] * sp + c[3, 0] * cp
    dy = c[0, 1] + c[1, 1] * p + c[2, 1] * sp + c[3, 1] * cp
    dz = c[0, 2] + c[1, 2] * p + c[2, 2] * sp + c[3, 2] * cp
    d0 = c[0, 3] + c[1, 3] * p + c[2, 3] * sp + c[3, 3] * cp
    a = (d0 + dz) * y0 + complex(dx, -dy) * y1
    b = complex(dx, dy) * y0 + (d0 - dz) * y1
    # -i * sgn * H psi
    return complex(sgn * a.imag, -sgn * a.real), complex(sgn * b.imag, -sgn * b.real)


@numba.njit(cache=True, nogil=True)
def _dopri5(c, p_i, p_f, tau, y0, y1, rtol, atol, sgn, max_steps):
    """Integrate one mode over [0, tau].

    Returns (y0, y1, status, accepted, rejected, max_norm_drift); status 0
    is success, 1 step-size underflow, 2 step budget exhausted.
    """
    dp = p_f - p_i
    n0 = abs(y0) ** 2 + abs(y1) ** 2
    # Initial step from the kernel scale at t = 0.
    hn = abs(c[0, 0] + c[1, 0] * p_i + c[2, 0] * math.sin(p_i) + c[3, 0] * math.cos(p_i))
    hn += abs(c[0, 1] + c[1, 1] * p_i + c[2, 1] * math.sin(p_i) + c[3, 1] * math.cos(p_i))
    hn += abs(c[0, 2] + c[1, 2] * p_i + c[2, 2] * math.sin(p_i) + c[3, 2] * math.cos(p_i))
    hn += abs(c[0, 3] + c[1, 3] * p_i + c[2, 3] * math.sin(p_i) + c[3, 3] * math.cos(p_i))
    h = 0.01 / max(hn, 1e-3)
    if h > tau:
        h = tau
    t = 0.0
    accepted = 0
    rejected = 0
    drift = 0.0
    k10, k11 = _rhs(c, p_i, dp, tau, t, y0, y1, sgn)
    while t < tau:
        if accepted + rejected >= max_steps:
            return y0, y1, 2, accepted, rejected, drift
        last = t + h >= tau
        if last:
            h = tau - t
        if h <= 1e-15 * tau:
            return y0, y1, 1, accepted, rejected, drift
        z0 = y0 + h * _A21 * k10
        z1 = y1 + h * _A21 * k11
        k20, k21 = _rhs(c, p_i, dp, tau, t + _C2 * h, z0, z1, sgn)
        z0 = y0 + h * (_A31 * k10 + _A32 * k20)
        z1 = y1 + h * (_A31 * k11 + _A32 * k21)
        k30, k31 = _rhs(c, p_i, dp, tau, t + _C3 * h, z0, z1, sgn)
        z0 = y0 + h * (_A41 * k10 + _A42 * k20 + _A43 * k30)
        z1 = y1 + h * (_A41 * k11 + _A42 * k21 + _A43 * k31)
        k40, k41 = _rhs(c, p_i, dp, tau, t + _C4 * h, z0, z1, sgn)
        z0 = y0 + h * (_A51 * k10 + _A52 * k20 + _A53 * k30 + _A54 * k40)
        z1 = y1 + h * (_A51 * k11 + _A52 * k21 + _A53 * k31 + _A54 * k41)
        k50, k51 = _rhs(c, p_i, dp, tau, t + _C5 * h, z0, z1, sgn)
        z0 = y0 + h * (_A61 * k10 + _A62 * k20 + _A63 * k30 + _A64 * k40 + _A65 * k50)
        z1 = y1 + h * (_A61 * k11 + _A62 * k21 + _A63 * k31 + _A64 * k41 + _A65 * k51)
        k60, k61 = _rhs(c, p_i, dp, tau, t + h, z0, z1, sgn)
        n0_ = y0 + h * (_B1 * k10 + _B3 * k30 + _B4 * k40 + _B5 * k50 + _B6 * k60)
        n1_ = y1 + h * (_B1 * k11 + _B3 * k31 + _B4 * k41 + _B5 * k51 + _B6 * k61)
        t_new = tau if last else t + h
        k70, k71 = _rhs(c, p_i, dp, tau, t_new, n0_, n1_, sgn)
        e0 = h * (_E1 * k10 + _E3 * k30 + _E4 * k40 + _E5 * k50 + _E6 * k60 + _E7 * k70)
        e1 = h * (_E1 * k11 + _E3 * k31 + _E4 * k41 + _E5 * k51 + _E6 * k61 + _E7 * k71)
        # error per unit step: local budget h / tau keeps the global error near tol
        w = h / tau
        s0 = (atol + rtol * max(abs(y0), abs(n0_))) * w
        s1 = (atol + rtol * max(abs(y1), abs(n1_))) * w
        err = max(abs(e0) / s0, abs(e1) / s1)
        if err <= 1.0:
            t = t_new
            y0 = n0_
            y1 = n1_
            k10 = k70
            k11 = k71
            accepted += 1
            dn = abs(abs(y0) ** 2 + abs(y1) ** 2 - n0)
            if dn > drift:
                drift = dn
            fac = 10.0 if err == 0.0 else min(10.0, 0.9 * err ** -0.25)
        else:
            rejected += 1
            fac = max(0.2, 0.9 * err ** -0.25)
        h = h * fac
    return y0, y1, 0, accepted, rejected, drift


def _run(coef, schedule: RampSchedule, psi0, tol, backward):
    psi0 = np.asarray(psi0, dtype=complex)
    if schedule.tau == 0:
        return psi0.copy(), {"accepted": 0, "rejected": 0, "norm_drift": 0.0}
    y0, y1, status, acc, rej, drift = _dopri5(
        coef, float(schedule.p_i), float(schedule.p_f), float(schedule.tau),
        complex(psi0[0]), complex(psi0[1]), tol, tol, -1.0 if backward else 1.0, MAX_STEPS,
    )
    if status:
        raise StepUnderflow(
            f"integrator failed (status {status}) after {acc} accepted / {rej} rejected steps"
        )
    return np.array([y0, y1]), {"accepted": acc, "rejected": rej, "norm_drift": drift}


def evolve_ramp(model: ModelParams, schedule: RampSchedule, k, initial=None,
                tol: float = DEFAULT_TOL, backward: bool = False, full_output: bool = False):
    """Evolve one mode through the ramp and return the post-ramp spinor.

    Parameters
    ----------
    model : TfimParams, XyParams or HaldaneParams
        Model family; its own drive value is ignored in favour of ``schedule``.
    schedule : RampSchedule
    k : float or array of shape (2,)
        Momentum of the mode.
    initial : array_like, optional
        Starting spinor (Nambu/sublattice basis).  Defaults to the ground
        state of the kernel at ``schedule.p_i``.
    tol : float
        Relative and absolute per-step tolerance.
    backward : bool
        Integrate i d/dt psi = -H psi instead, i.e. apply the inverse
        propagator when combined with ``schedule.reversed()``.
    full_output : bool
        Also return a dict with step counts and the maximal norm drift.
    """
    if not tol > 0:
        raise ValidationError("tol must be positive")
    if initial is None:
        initial = ground_spinor(model.with_drive(schedule.p_i).kernel(k))
    psi, info = _run(model.drive_coefficients(k), schedule, initial, tol, backward)
    return (psi, info) if full_output else psi


def max_workers() -> int:
    env = os.environ.get("LEZ_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def parallel_map(fn, items):
    """Ordered map over ``items`` using up to ``LEZ_THREADS`` threads."""
    items = list(items)
    workers = min(max_workers(), len(items))
    if workers <= 1:
        return [fn(x) for x in items]
    with ThreadPoolExecutor(workers) as pool:
        return list(pool.map(fn, items))


def evolve_ramp_batch(model: ModelParams, schedule: RampSchedule, grid: ModeGrid,
                      tol: float = DEFAULT_TOL, initial=None, full_output: bool = False):
    """Post-ramp spinors for every mode of ``grid``, shape ``(len(grid), 2)``.

    Modes are integrated independently (threaded when ``LEZ_THREADS`` allows)
    and returned in grid order.
    """
    if len(grid) == 0:
        raise ValidationError("grid is empty")
    if initial is None:
        initial = ground_spinor(model.with_drive(schedule.p_i).kernel(grid.points))
    initial = np.asarray(initial, dtype=complex).reshape(len(grid), 2)

    def one(j):
        try:
            return _run(model.drive_coefficients(grid.points[j]), schedule, initial[j], tol, False)
        except StepUnderflow as exc:
            raise StepUnderflow(f"mode {j} (k={grid.points[j]}): {exc}") from exc

    results = parallel_map(one, range(len(grid)))
    psi = np.array([r[0] for r in results])
    if full_output:
        return psi, [r[1] for r in results]
    return psi
