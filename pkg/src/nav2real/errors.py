"""Exception types shared across the package."""


class DomainError(ValueError):
    """Input violates a documented precondition (bad geometry, bad pose, ...)."""


class ProtocolError(RuntimeError):
    """Episode protocol violated (step after stop, invalid action, ...)."""


class CorrelationUndefinedError(ValueError):
    """Pearson correlation is undefined (constant vector or too few points)."""
