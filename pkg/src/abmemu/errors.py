"""Exception types shared across the toolkit."""


class AbmEmuError(Exception):
    """Base class for toolkit errors."""


class DataError(AbmEmuError):
    """Malformed or inconsistent input data (files, matrices, indices)."""


class NumericalError(AbmEmuError):
    """A numerical procedure failed (non-PD kernel, diverging loss, ...)."""


class SequencingError(AbmEmuError):
    """An operation was called out of order (e.g. stepping past the end year)."""


class DegenerateFeatureError(DataError):
    """A feature column is constant and cannot be standardized."""


class UnsupportedDimensionError(DataError):
    """Requested dimension exceeds the direction-number table."""
