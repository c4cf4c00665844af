"""Exception hierarchy for the link model."""


class ModelError(Exception):
    """Base class for all model errors."""


class InvalidParameterError(ModelError, ValueError):
    """A physical parameter violates its domain invariant."""


class InvalidTimeError(InvalidParameterError):
    pass


class InvalidBandError(InvalidParameterError):
    pass


class BiasRegionError(ModelError):
    """FET bias is outside the linear operating region."""


class EquilibriumError(ModelError):
    """Receptors do not reach equilibrium within the passage window."""

    def __init__(self, message, symbol=None):
        super().__init__(message)
        self.symbol = symbol


class DegenerateConstellationError(ModelError):
    pass


class ThresholdOrderingError(ModelError):
    """A decision threshold fell outside the interval between adjacent means."""


class OracleFailure(ModelError):
    pass


class InsufficientTrialsError(OracleFailure):
    pass


class ConfigError(ModelError):
    """Configuration could not be parsed or validated."""

    def __init__(self, message, key=None, line=None):
        where = []
        if key is not None:
            where.append(f"key {key!r}")
        if line is not None:
            where.append(f"line {line}")
        super().__init__(f"{message} ({', '.join(where)})" if where else message)
        self.key = key
        self.line = line
