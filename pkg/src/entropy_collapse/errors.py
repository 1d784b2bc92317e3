"""Exception types shared across the package."""


class EntropyCollapseError(Exception):
    """Base class for all package errors."""


class InvalidDimensionError(EntropyCollapseError):
    """State dimension is too small or does not match an expectation."""


class DegenerateVectorError(EntropyCollapseError):
    """A weight vector cannot be normalized (non-positive or non-finite mass)."""


class ParameterError(EntropyCollapseError):
    """A numeric parameter is outside its documented range."""


class ConfigError(EntropyCollapseError):
    """A config file violates the schema (unknown key, wrong type, missing field)."""
