"""Exception hierarchy shared by all decobec modules."""


class DecobecError(Exception):
    """Base class for every error raised by this package."""


class InvalidArgumentError(DecobecError, ValueError):
    """An argument violates a documented precondition."""


class AccuracyError(DecobecError, ArithmeticError):
    """A numerical routine could not reach the requested accuracy.

    The best available estimate is kept on ``best_estimate`` so callers can
    still report something useful.
    """

    def __init__(self, message, best_estimate=None):
        super().__init__(message)
        self.best_estimate = best_estimate


class ResourceError(DecobecError, MemoryError):
    """A truncated Hilbert space would exceed the configured dimension cap."""


class ConfigError(DecobecError, ValueError):
    """A scenario configuration failed to parse or validate.

    ``problems`` lists every violation found, not just the first one.
    """

    def __init__(self, problems):
        if isinstance(problems, str):
            problems = [problems]
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
