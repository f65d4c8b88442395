"""Contextuality toolkit: Kochen-Specker proofs, witnesses and simulations."""

from .errors import (
    ConfigError,
    ContextualityError,
    DimensionError,
    GeometryError,
    NormalizationError,
    ParseError,
    SearchBudgetExceeded,
)

__version__ = "0.1.0"

__all__ = [
    "ConfigError",
    "ContextualityError",
    "DimensionError",
    "GeometryError",
    "NormalizationError",
    "ParseError",
    "SearchBudgetExceeded",
]
