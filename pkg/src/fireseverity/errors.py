"""Exception hierarchy; each class carries the CLI exit code it maps to."""


class FireSeverityError(Exception):
    exit_code = 1


class ConfigError(FireSeverityError, ValueError):
    exit_code = 2


class InputError(FireSeverityError, ValueError):
    """Unreadable, missing or malformed input data."""

    exit_code = 3


class ValidationError(FireSeverityError, ValueError):
    """A numeric or contract check failed on otherwise readable data."""

    exit_code = 4


class EmptyResultError(ValidationError):
    """An operation removed every row (e.g. imputation dropped everything)."""
