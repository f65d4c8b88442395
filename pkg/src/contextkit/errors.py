"""Exception types shared across the toolkit.

Every domain failure derives from :class:`ContextualityError` so the CLI can
map them to exit status 1 in one place.
"""


class ContextualityError(Exception):
    """Base class for domain errors."""


class DimensionError(ContextualityError, ValueError):
    pass


class NormalizationError(ContextualityError, ValueError):
    pass


class ParseError(ContextualityError, ValueError):
    pass


class GeometryError(ContextualityError, ValueError):
    """A context failed orthogonality or completeness.

    ``context_index`` names the offending context when known.
    """

    def __init__(self, message: str, context_index: int | None = None):
        super().__init__(message)
        self.context_index = context_index


class SearchBudgetExceeded(ContextualityError):
    pass


class ConfigError(ContextualityError, ValueError):
    pass
