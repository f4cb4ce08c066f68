class TwinAPError(Exception):
    """Base class for library errors."""


class DomainError(TwinAPError, ValueError):
    """Argument outside the mathematical domain of an operation."""


class CapacityError(TwinAPError):
    """Requested range or size exceeds the configured memory budget."""


class NotFoundError(TwinAPError):
    """A bounded search finished without a result."""
