"""Exception types shared across the package."""


class InputError(ValueError):
    """Malformed or inconsistent user input: bad dimensions, weights, schemas.

    ``details`` collects every violation found, not just the first.
    """

    def __init__(self, message, details=None):
        super().__init__(message)
        self.details = list(details or [])

    def __str__(self):
        base = super().__str__()
        if self.details:
            return base + ": " + "; ".join(str(d) for d in self.details)
        return base


class DisconnectedError(RuntimeError):
    """A metric or potential was requested on input that is not metrically
    connected, so the result would be infinite."""


class PropertyViolationError(RuntimeError):
    """A mathematical precondition failed.  Carries the failing check
    results (with witnesses) so callers can report them."""

    def __init__(self, message, checks=None):
        super().__init__(message)
        self.checks = list(checks or [])
