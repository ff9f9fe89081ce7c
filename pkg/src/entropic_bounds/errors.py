"""Exception types shared by all modules."""


class InvalidArgument(ValueError):
    """An input lies outside the documented domain of an operation."""


class AccuracyFailure(RuntimeError):
    """A numerical procedure did not reach its requested accuracy.

    The best estimate obtained so far is attached so callers can decide
    whether it is still usable.
    """

    def __init__(self, message, best_estimate=None, abs_error=None):
        super().__init__(message)
        self.best_estimate = best_estimate
        self.abs_error = abs_error
