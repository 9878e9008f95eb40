"""Exception types shared across the package."""


class AbqedError(Exception):
    """Base class for all package errors."""


class DomainError(AbqedError, ValueError):
    """An argument lies outside the domain of an operation."""


class SingularityError(DomainError):
    """Evaluation point too close to the fluxon or a point charge."""


class ContractError(AbqedError, ValueError):
    """A precondition on the kind of object passed in was violated."""


class ConfigError(AbqedError, ValueError):
    """Malformed or inconsistent run configuration."""


class AccuracyError(AbqedError, ArithmeticError):
    """A numerical procedure failed to reach its tolerance.

    The best available estimate is kept on the exception so callers can
    still report it.
    """

    def __init__(self, message, estimate=None, error_estimate=None):
        super().__init__(message)
        self.estimate = estimate
        self.error_estimate = error_estimate
