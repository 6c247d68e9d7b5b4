"""Exception hierarchy shared by every module."""


class RydspecError(Exception):
    """Base class for all package errors."""


class ParameterError(RydspecError, ValueError):
    """An argument is outside its documented domain."""


class AmbiguityError(RydspecError, ValueError):
    """A pair distance sits on the blockade radius, so the edge set is ill-defined."""

    def __init__(self, message, pair=None, distance=None):
        super().__init__(message)
        self.pair = pair
        self.distance = distance


class CapacityError(RydspecError, ValueError):
    """The requested system is too large for dense matrices."""


class ValidationError(RydspecError, ValueError):
    """Input data failed a structural check (e.g. a non-Hermitian matrix)."""


class NumericalError(RydspecError, ArithmeticError):
    """An integrator or solver left its stability envelope."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = dict(diagnostics or {})


class ConfigError(RydspecError, ValueError):
    """An experiment configuration is malformed or fails schema validation."""
