"""Exceptions raised by the lab."""


class LabError(Exception):
    """Base class for all lab errors."""


class DomainError(LabError, ValueError):
    """A parameter lies outside the mathematical domain of an operation."""


class IntegrableSingularityError(DomainError):
    """The closed-form kernel was asked for its value on the singular diagonal.

    Callers handle this case with the analytic cell treatment instead.
    """


class ConfigurationError(LabError):
    """An experiment or data configuration cannot be used as given."""


class SequencingError(LabError):
    """A space-time slab was used before its dependencies were finalized."""


class InsufficientDataError(LabError):
    """Too few usable entries to fit a lifespan model."""
