"""Exception hierarchy shared across the toolkit.

The CLI maps these onto exit codes: configuration and input-validation
problems exit with 2, numerical failures with 3, and I/O errors
(plain ``OSError``) with 4.
"""


class PlugselectError(Exception):
    """Base class for every error raised by this package."""


class ConfigError(PlugselectError):
    """Invalid configuration value, argument combination, or input shape."""


class DataFormatError(ConfigError):
    """A dataset or checkpoint file is malformed or inconsistent."""


class NumericError(PlugselectError):
    """A computation produced non-finite values or otherwise diverged."""
