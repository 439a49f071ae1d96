"""Loschmidt echo zeros in finite chains under a linear-ramp quench.

A momentum-factorizable model is prepared in its ground state, ramped
linearly in one parameter over a time ``tau`` and then held at the final
value.  Each momentum mode contributes a factor to the Loschmidt amplitude;
tuning ``tau`` until one mode satisfies |A| = |B| gives exact zeros of the
echo at a predictable train of hold times.
"""

from .critical import (
    CriticalRateResult,
    ScalingFit,
    find_tau_c,
    fit_power_law,
    haldane_find_tau,
    lez_residual,
    scaling_fit,
    select_haldane_convention,
    sudden_ks,
    tau_max,
    tfim_lez_modes,
    xy_lez_modes,
)
from .dtop import DtopTrace, dtop_trace, geometric_phase
from .errors import (
    DegenerateKernel,
    LezError,
    NoRealSolution,
    NoRootInRange,
    NotAtCriticalRate,
    PhaseUndefined,
    StepNotConverged,
    StepUnderflow,
    UndefinedAtZero,
    ValidationError,
)
from .exact import DenseSpinSystem, exact_ground_state, exact_loschmidt
from .loschmidt import (
    CriticalTimeTrain,
    OverlapCoefficients,
    RateTrace,
    critical_times,
    loschmidt_amplitude_sq,
    quench_coefficients,
    rate_trace,
)
from .models import (
    HaldaneParams,
    ModeGrid,
    TfimParams,
    XyParams,
    chain_grid,
    eigenbasis,
    ground_spinor,
    haldane_grid,
    haldane_phase_boundary,
    kernel,
    tfim_spectrum,
)
from .ramp import RampSchedule, evolve_ramp, evolve_ramp_batch

__version__ = "0.1.0"
