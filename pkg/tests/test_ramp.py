import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from lezquench import errors
from lezquench.models import HaldaneParams, TfimParams, XyParams, chain_grid, eigenbasis, ground_spinor, kernel_matrix
from lezquench.ramp import RampSchedule, evolve_ramp, evolve_ramp_batch


def rk4_reference(model, schedule, k, psi0, dt=1e-4):
    """Classic fixed-step RK4 on i dpsi/dt = H(p(t)) psi with dense 2x2 matrices."""
    n = max(1, int(round(schedule.tau / dt)))
    h = schedule.tau / n

    def f(t, y):
        return -1j * kernel_matrix(model.with_drive(float(schedule.drive(t))).kernel(k)) @ y

    y = np.asarray(psi0, dtype=complex)
    for s in range(n):
        t = s * h
        k1 = f(t, y)
        k2 = f(t + h / 2, y + h / 2 * k1)
        k3 = f(t + h / 2, y + h / 2 * k2)
        k4 = f(t + h, y + h * k3)
        y = y + h / 6 * (k1 + 2 * k2 + 2 * k3 + k4)
    return y


@pytest.mark.parametrize(
    "model, p_f, k, tau",
    [
        (TfimParams(0.5), 1.5, 7 * math.pi / 50, 1.0),
        (TfimParams(0.25), 2.25, math.pi / 8, 0.7),
        (XyParams(0.5, 0.5), 1.5, 13 * math.pi / 50, 0.8),
        (HaldaneParams(1.0, 1.0, 0.0, 4.5), math.pi / 2, np.array([0.9, -1.3]), 0.6),
    ],
    ids=["tfim", "tfim-wide", "xy", "haldane"],
)
def test_matches_fixed_step_rk4(model, p_f, k, tau):
    schedule = RampSchedule(model.drive, p_f, tau)
    psi0 = ground_spinor(model.kernel(k))
    got = evolve_ramp(model, schedule, k, psi0)
    ref = rk4_reference(model, schedule, k, psi0)
    assert np.max(np.abs(got - ref)) < 1e-8


@pytest.mark.parametrize("tau", [1.0, 9.377, 168.37])
def test_norm_conservation(tau):
    model = TfimParams(0.5)
    psi, info = evolve_ramp(model, RampSchedule(0.5, 1.5, tau), math.pi / 50, full_output=True)
    assert info["norm_drift"] <= 1e-9
    assert abs(np.vdot(psi, psi).real - 1) <= 1e-9


def test_zero_duration_is_sudden():
    psi0 = ground_spinor(TfimParams(0.5).kernel(0.4))
    out = evolve_ramp(TfimParams(0.5), RampSchedule(0.5, 1.5, 0.0), 0.4, psi0)
    assert np.array_equal(out, psi0)


def test_backward_propagation_undoes_the_ramp():
    model = TfimParams(0.5)
    schedule = RampSchedule(0.5, 1.5, 3.0)
    psi0 = ground_spinor(model.kernel(0.3))
    fwd = evolve_ramp(model, schedule, 0.3, psi0)
    back = evolve_ramp(model, schedule.reversed(), 0.3, fwd, backward=True)
    # i d/dt psi = -H(p_f -> p_i) psi run forward equals U(tau)^dagger
    assert np.max(np.abs(back - psi0)) < 1e-8


def test_slow_ramp_within_a_phase_is_adiabatic():
    model = TfimParams(0.5)
    k = math.pi / 2
    psi = evolve_ramp(model, RampSchedule(0.5, 0.9, 400.0), k)
    lower = eigenbasis(TfimParams(0.9).kernel(k)).minus
    assert abs(np.vdot(lower, psi)) ** 2 > 1 - 1e-5


def test_batch_matches_single_modes():
    model = TfimParams(0.5)
    grid = chain_grid(10)
    schedule = RampSchedule(0.5, 1.5, 2.0)
    batch = evolve_ramp_batch(model, schedule, grid)
    for j, k in enumerate(grid.points):
        np.testing.assert_array_equal(batch[j], evolve_ramp(model, schedule, k))


@settings(max_examples=25, deadline=None)
@given(tau=st.floats(1e-3, 20.0), k=st.floats(0.05, 3.09))
def test_unitarity_property(tau, k):
    psi = evolve_ramp(TfimParams(0.5), RampSchedule(0.5, 1.5, tau), k)
    assert abs(np.linalg.norm(psi) - 1) < 1e-9


def test_schedule_validation():
    for bad in (-1.0, math.inf, math.nan):
        with pytest.raises(errors.ValidationError):
            RampSchedule(0.5, 1.5, bad)
    with pytest.raises(errors.ValidationError):
        evolve_ramp(TfimParams(0.5), RampSchedule(0.5, 1.5, 1.0), 0.3, tol=0.0)
    s = RampSchedule(0.5, 1.5, 2.0)
    assert s.rate == 0.5
    np.testing.assert_allclose(s.drive([0.0, 1.0, 2.0, 5.0]), [0.5, 1.0, 1.5, 1.5])
