"""Exception hierarchy shared across the package."""


class SatfluxError(Exception):
    """Base class for all package errors."""


class ParameterError(SatfluxError, ValueError):
    pass


class DomainError(SatfluxError, ValueError):
    pass


class CompatibilityError(SatfluxError):
    pass


class NoSteadyStateError(SatfluxError):
    pass


class DegenerateProfileError(SatfluxError):
    pass


class AdmissibilityError(SatfluxError):
    pass


class NumericError(SatfluxError):
    pass


class UnrepresentableError(SatfluxError):
    pass


class InsufficientDataError(SatfluxError):
    pass


class ConfigError(SatfluxError):
    pass


class PositivityLossError(SatfluxError):
    """A step drove some dual value ``v_i`` to zero or below."""


class SupportCollapseError(SatfluxError):
    """Front update left ``sigma_plus <= sigma_minus``."""
