"""
Exception hierarchy for SvcjRolling.

Every error raised on purpose by the package derives from SvcjError. Most
also derive from ValueError so callers that only know the builtin still
catch them.
"""


class SvcjError(Exception):
    """Root of all package errors."""


class ValidationError(SvcjError, ValueError):
    """Invalid model parameters. `violations` names every offending field."""

    def __init__(self, violations):
        self.violations = list(violations)
        super().__init__(
            "invalid parameters: " + "; ".join(self.violations))


class NonStationaryError(SvcjError, ValueError):
    pass


class ParseError(SvcjError, ValueError):
    pass


class OrderError(SvcjError, ValueError):
    pass


class PriceValueError(SvcjError, ValueError):
    pass


class DuplicateDateError(SvcjError, ValueError):
    pass


class SchemaError(SvcjError, ValueError):
    pass


class WindowTooShortError(SvcjError, ValueError):
    pass


class NonFiniteInputError(SvcjError, ValueError):
    pass


class NumericalError(SvcjError, ArithmeticError):
    """A conditional variance collapsed; the window is degenerate."""


class DegenerateDimensionError(SvcjError, ValueError):
    pass


class TooFewPointsError(SvcjError, ValueError):
    pass


class UnknownParameterError(SvcjError, ValueError):
    pass


class EmptySeriesError(SvcjError, ValueError):
    pass


class ConfigError(SvcjError, ValueError):
    pass
