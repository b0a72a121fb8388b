# Exceptions shared by every RandCF package


class RandomCFError(Exception):
    """Base exception for all RandCF errors."""
    pass


class DomainError(RandomCFError, ValueError):
    """Raised when a point or literal lies outside the domain an operation accepts."""
    pass


class InvariantViolationError(RandomCFError):
    """Raised when an internal identity fails. Signals a bug, never bad input."""
    pass
