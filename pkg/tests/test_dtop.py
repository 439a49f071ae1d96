import math

import numpy as np
import pytest

from lezquench import errors
from lezquench.critical import find_tau_c
from lezquench.dtop import DtopTrace, dtop_trace, geometric_phase, geometric_phases, plateaus
from lezquench.loschmidt import ModeOverlap, quench_coefficients
from lezquench.models import ModeGrid, TfimParams, chain_grid


@pytest.fixture(scope="module")
def tuned50(tuned_fast_mode):
    coeffs = quench_coefficients(TfimParams(0.5), TfimParams(1.5), tuned_fast_mode.tau_c, chain_grid(50))
    return coeffs, tuned_fast_mode


def away_from(t, times, margin):
    return np.all(np.abs(t[:, None] - np.asarray(times)[None, :]) > margin, axis=1)


def test_zero_at_start():
    for tau in (0.0, 1.7):
        coeffs = quench_coefficients(TfimParams(0.5), TfimParams(1.5), tau, chain_grid(50))
        trace = dtop_trace(coeffs, [0.0])
        assert trace.nu[0] == pytest.approx(0.0, abs=1e-14)
        assert np.max(np.abs(trace.phases)) < 1e-14


def test_same_field_has_no_geometric_phase():
    coeffs = quench_coefficients(TfimParams(0.5), TfimParams(0.5), 0.0, chain_grid(50))
    phases = geometric_phases(coeffs, np.linspace(0, 30, 61))
    assert np.max(np.abs(phases)) < 1e-12


def test_undefined_at_an_exact_zero():
    mode = ModeOverlap(0.0, 0.5 + 0j, 0.5 + 0j, -1.0, 1.0, 0.5, 0.5)
    with pytest.raises(errors.UndefinedAtZero):
        geometric_phase(mode, math.pi / 2)
    assert geometric_phase(mode, 0.3) == pytest.approx(0.0, abs=1e-14)


def test_phase_jump_across_the_tuned_mode(tuned_fast_mode):
    # two modes straddling the tuned momentum, evaluated at the first critical time
    ks = tuned_fast_mode.k + np.array([-1e-3, 1e-3])
    coeffs = quench_coefficients(TfimParams(0.5), TfimParams(1.5), tuned_fast_mode.tau_c,
                                 ModeGrid("chain", (2,), ks, 50))
    tc = tuned_fast_mode.train.times[0]
    jump = np.diff(geometric_phases(coeffs, [tc])[0])[0]
    assert abs(abs(np.angle(np.exp(1j * jump))) - math.pi) < 0.05 * math.pi
    before = np.diff(geometric_phases(coeffs, [tc - 0.05])[0])[0]
    assert abs(before) < 0.25 * math.pi


def test_gauge_robustness(tuned50):
    coeffs, res = tuned50
    t = np.linspace(0.05, 10, 400)
    rotated = coeffs.with_phase(0, 2.1).with_phase(7, -0.4).with_phase(24, 3.0)
    assert np.max(np.abs(dtop_trace(rotated, t).nu - dtop_trace(coeffs, t).nu)) < 1e-12


def test_first_jump_brackets_the_first_critical_time(tuned50):
    coeffs, res = tuned50
    t = np.arange(0.0, res.train.times[1] - 0.05, 1e-3)
    w = dtop_trace(coeffs, t).winding
    changes = t[1:][np.diff(w) != 0]
    assert len(changes) == 1
    assert abs(changes[0] - res.train.times[0]) < 1e-2 * res.train.period


def test_plateaus_flatten_with_system_size(tuned50):
    coeffs50, res = tuned50
    res200 = find_tau_c(TfimParams(0.5), TfimParams(1.5), 28 * math.pi / 200)
    coeffs200 = quench_coefficients(TfimParams(0.5), TfimParams(1.5), res200.tau_c, chain_grid(200))
    t = np.arange(0.0, 12.0, 5e-3)
    devs = []
    for coeffs, r in ((coeffs50, res), (coeffs200, res200)):
        tr = dtop_trace(coeffs, t)
        keep = away_from(t, r.train.times, 1e-2 * r.train.period)
        devs.append(np.max(np.abs(tr.nu - tr.winding)[keep]))
    assert devs[1] < devs[0]


def test_near_integer_away_from_critical_times(tuned50):
    """|nu - round(nu)| <= 0.05 away from every t_c (N = 50)."""
    coeffs, res = tuned50
    t = np.arange(0.0, 12.0, 1e-3)
    tr = dtop_trace(coeffs, t)
    keep = away_from(t, res.train.times, 1e-2 * res.train.period)
    assert np.max(np.abs(tr.nu - tr.winding)[keep]) <= 0.05


def test_plateau_helper_on_a_staircase():
    t = np.linspace(0, 2.99, 300)
    nu = np.floor(t) + 0.01
    out = plateaus(DtopTrace(t, nu, np.zeros((len(t), 1))), [1.0, 2.0], 0.05)
    assert [o[2] for o in out] == [[0], [1], [2]]
    assert max(o[3] for o in out) == pytest.approx(0.01)
