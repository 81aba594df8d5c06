"""Exception types shared across the package."""


class DomainError(ValueError):
    """Invalid argument: outside the mathematical domain of an operation."""


class NumericalError(RuntimeError):
    """A computation failed numerically (singular matrix, non-finite ELBO, ...)."""


class UsageError(DomainError):
    """Malformed user-facing input, e.g. an unknown model name."""
