"""Causal discovery, effect estimation, and root-cause analysis for industrial sensor data."""

from causalscope.errors import DataError, EngineError, NumericalError

__version__ = "0.1.0"

__all__ = ["DataError", "EngineError", "NumericalError", "__version__"]
