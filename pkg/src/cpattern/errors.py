"""Exception types raised across the package.

Everything derives from ``CPatternError`` so callers (the CLI in particular)
can tell validation failures apart from programming errors.
"""


class CPatternError(Exception):
    """Base class for all expected, user-facing failures."""


class InvalidGeometryError(CPatternError, ValueError):
    """A polygon or rectangle violates its structural invariants."""


class InputValidationError(CPatternError, ValueError):
    """Input data is inconsistent (overlapping buildings, duplicate truth sets...)."""


class InvalidArgumentError(CPatternError, ValueError):
    pass


class NotFoundError(CPatternError, KeyError):
    pass


class SchemaError(CPatternError, ValueError):
    """A graph mutation would break the entity/relation schema."""


class InvalidPatternError(CPatternError, ValueError):
    pass


class ConsistencyError(CPatternError, RuntimeError):
    """Two engines that must agree produced different results."""


class LoadError(CPatternError, ValueError):
    """A scene file could not be loaded; the message names the offending feature."""


class ExportError(CPatternError, OSError):
    """A result file could not be written."""
