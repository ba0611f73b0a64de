"""Exception taxonomy shared across the package.

The CLI maps these onto exit codes: ConfigError -> 1 (usage),
DataError -> 2 (bad input data), NumericError -> 3 (numeric failure).
"""


class MousetrapError(Exception):
    """Base class for all package errors."""


class ConfigError(MousetrapError):
    """Invalid configuration or parameter value."""


class DataError(MousetrapError):
    """Rejected or malformed input data."""


class NumericError(MousetrapError):
    """Numeric failure during fitting or training (divergence, NaN loss)."""
