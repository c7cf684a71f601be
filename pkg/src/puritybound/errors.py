"""Exception types raised across the package."""


class PurityBoundError(Exception):
    """Base class for all package errors."""


class InfeasibleError(PurityBoundError, ValueError):
    """The bounded-purity set is empty: t < 1/n."""

    def __init__(self, t, lower):
        self.t = float(t)
        self.lower = float(lower)
        super().__init__(
            f"purity bound t={self.t!r} is below the minimum purity 1/n={self.lower!r}"
        )


class ValidationError(PurityBoundError, ValueError):
    """Input violates a documented precondition."""


class UniformObjectiveError(ValidationError):
    """The normalized objective is the uniform vector, so it has no direction."""


class DimensionTooLargeError(ValidationError):
    pass


class DimensionMismatchError(ValidationError):
    pass


class NonHermitianError(ValidationError):
    pass


class NotPureTargetError(ValidationError):
    pass


class NotTracePreservingError(ValidationError):
    pass


class OutOfWindowError(ValidationError):
    """Purity bound outside the range where a closed form applies."""


class SingularBasisError(ValidationError):
    pass


class DegenerateDesignError(ValidationError):
    pass


class InternalKKTViolation(PurityBoundError, RuntimeError):
    """Primal point rebuilt from the dual minimizer is not feasible."""


class OracleViolation(PurityBoundError, RuntimeError):
    """A random feasible sample beat the oracle optimum."""


class SolverDisagreement(PurityBoundError, RuntimeError):
    def __init__(self, message, instance=None):
        super().__init__(message)
        self.instance = instance
