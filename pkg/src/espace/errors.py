"""Shared exception types."""


class EspaceError(Exception):
    """Base class for all errors raised by this package."""


class ParseError(EspaceError):
    """Malformed input file. Carries the 1-based line number when known."""

    def __init__(self, message, line=None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class ValidationError(EspaceError):
    """Structurally well-formed input that violates a model invariant."""


class BundleError(EspaceError):
    """A bundle file is missing, corrupt, or incompatible."""
