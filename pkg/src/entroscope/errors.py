"""Exception types, grouped by how the CLI maps them to exit codes."""


class EntroscopeError(Exception):
    """Base class for package errors."""


class ConfigError(EntroscopeError):
    """Invalid configuration: unknown key, bad type, out-of-range value."""


class NumericsError(EntroscopeError):
    """Numerical failure: solver non-convergence, invalid state detected."""


class StorageError(EntroscopeError):
    """Base class for spectrum-cache I/O problems."""


class SpectrumFormatError(StorageError):
    """Cache file has wrong magic, version, or header."""


class SpectrumChecksumError(StorageError):
    """Cache file is truncated or its checksum does not match."""
