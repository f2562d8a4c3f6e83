"""Exception types shared across the package."""


class BcosfireError(Exception):
    """Base class for all errors raised by this package."""


class FormatError(BcosfireError, ValueError):
    """A file does not conform to its expected format."""


class ParameterError(BcosfireError, ValueError):
    """An argument violates a documented precondition."""


class SizeMismatchError(BcosfireError, ValueError):
    """Images, masks or kernels have incompatible dimensions."""


class ConfigurationError(BcosfireError, RuntimeError):
    """Filter configuration failed on the given prototype."""
