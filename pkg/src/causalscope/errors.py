"""Exception hierarchy shared by every module.

Callers that need to distinguish bad input from numerical breakdown catch
DataError and NumericalError separately; the CLI maps them to distinct exit
codes.
"""


class EngineError(Exception):
    """Base class for all errors raised by this package."""


class DataError(EngineError):
    """Invalid, malformed, or insufficient input data."""


class NumericalError(EngineError):
    """A numerical procedure failed (singular matrix, divergence, overflow)."""
