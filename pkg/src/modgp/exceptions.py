"""Exception types raised across the package."""


class DomainError(ValueError):
    """An argument lies outside the domain of the function it was passed to."""


class NotTwiceDifferentiable(ValueError):
    """The kernel has no second derivative at the origin."""


class JitterExceeded(RuntimeError):
    """Cholesky factorization failed even at the maximum jitter."""


class QuadratureError(RuntimeError):
    def __init__(self, message, estimate):
        super().__init__(message)
        self.estimate = estimate


class ConfigError(ValueError):
    """Experiment config is malformed; ``field`` names the offending entry."""

    def __init__(self, message, field=None):
        super().__init__(message if field is None else f"{field}: {message}")
        self.field = field


class WarpingCSVError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(message if line is None else f"line {line}: {message}")
        self.line = line
