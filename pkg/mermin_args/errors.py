"""
Exceptions raised by mermin_args.

Validation failures derive from ValueError, exceeded resource caps from
RuntimeError, so callers that only know the builtin types still catch them.
"""


class ValidationError(ValueError):
    pass


class ShapeMismatch(ValidationError):
    pass


class GcdViolation(ValidationError):
    pass


class CoefficientBound(ValidationError):
    pass


class PhaseNotASolution(ValidationError):
    pass


class InconsistentSystem(ValidationError):
    pass


class NotASolution(ValidationError):
    pass


class InsufficientCoverage(ValidationError):
    pass


class ResourceLimitError(RuntimeError):
    pass


class SearchSpaceTooLarge(ResourceLimitError):
    pass


class StateSpaceTooLarge(ResourceLimitError):
    pass
