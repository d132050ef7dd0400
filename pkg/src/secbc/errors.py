"""Semantic exception hierarchy for the secbc package."""


class SecbcError(Exception):
    """Base error for this package."""


class ValidationError(SecbcError, ValueError):
    """Inputs violate a contract: shape, mass, stochasticity, index range."""


class DomainError(ValidationError):
    """A scalar argument lies outside its mathematical domain."""


class PreconditionError(SecbcError):
    """An operation was invoked on a channel configuration outside its regime."""


class RelabelingError(PreconditionError):
    """Receiver labels violate the sigma1 <= sigma2 convention; swap receivers 1 and 2."""


class ResourceBudgetError(SecbcError):
    """An exact enumeration would exceed the configured budget; refuse, never subsample."""
