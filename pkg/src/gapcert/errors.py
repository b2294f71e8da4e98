"""Exception hierarchy shared across the package.

Every error carries the process exit code the CLI maps it to:
1 = the run is fine but the hypotheses of the bound are not met,
2 = numerical failure (no convergence, precision exhausted),
3 = configuration/usage error.
"""


class GapcertError(Exception):
    exit_code = 2


class ConfigError(GapcertError):
    exit_code = 3


class InvalidInputError(ConfigError):
    """Inputs violate a structural precondition (q <= n, nu >= mu, ...)."""


class UnsupportedMethodError(ConfigError):
    pass


class HypothesisViolationError(GapcertError):
    """The run is valid but outside the hypotheses of the certificate."""

    exit_code = 1


class AssumptionViolationError(HypothesisViolationError):
    """A standing geometric assumption fails (separation, clearance, ...)."""


class GeometryInfeasibleError(HypothesisViolationError):
    pass


class InconsistentInputError(HypothesisViolationError):
    """Inputs claim the hypotheses hold but force a degenerate quantity."""


class AssemblyError(HypothesisViolationError):
    """Sampled ellipticity violated during operator assembly."""


class PrecisionExhaustedError(GapcertError):
    """A constant failed to evaluate finitely at the configured precision."""

    def __init__(self, constant, detail=""):
        self.constant = constant
        msg = f"precision exhausted while evaluating {constant!r}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)


class ConvergenceError(GapcertError):
    """Eigensolver failed to reach the requested residual tolerance."""

    def __init__(self, message, best_residual=None):
        super().__init__(message)
        self.best_residual = best_residual


class InsufficientDataError(GapcertError):
    """Too few converged sweep points for the requested fit."""


class PositivityViolationError(GapcertError):
    """Ground state changed sign beyond tolerance; signals solver failure."""
