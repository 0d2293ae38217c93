"""Exception taxonomy shared across the package.

The command line maps these onto exit codes: ConfigError -> 1,
DataError -> 2, NumericalError -> 3.
"""


class FairPolicyError(Exception):
    """Base class for package errors."""


class ConfigError(FairPolicyError):
    """Invalid configuration value or flag combination."""


class DataError(FairPolicyError):
    """Malformed input data (missing file, bad column, bad row)."""


class NumericalError(FairPolicyError):
    """A numerical routine failed to produce a usable result."""
