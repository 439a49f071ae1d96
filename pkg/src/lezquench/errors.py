"""Exception types raised by the solver stack."""


class LezError(Exception):
    """Base class for all library errors."""


class ValidationError(LezError, ValueError):
    """Invalid parameters or configuration."""


class DegenerateKernel(LezError):
    """The two levels of a momentum mode are (numerically) degenerate."""


class StepUnderflow(LezError):
    """The adaptive integrator could not meet its tolerance."""


class PhaseUndefined(LezError):
    """Arg(A/B) requested while A or B vanishes."""


class NotAtCriticalRate(LezError):
    """Critical times requested for a mode that does not satisfy |A| = |B|."""


class NoRootInRange(LezError):
    """No sign change of the LEZ residual was found in the scanned range."""


class NoRealSolution(LezError):
    """The sudden-quench momentum is complex (intra-phase quench)."""


class UndefinedAtZero(LezError):
    """Geometric phase requested exactly at a zero of the mode factor."""


class StepNotConverged(LezError):
    """The exact-oracle step-halving check did not converge."""
