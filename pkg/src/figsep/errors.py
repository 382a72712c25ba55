"""Exception types shared across the package."""


class FigsepError(Exception):
    """Base class for all package-specific errors."""


class InvalidImage(FigsepError, ValueError):
    """Raised for images with zero extent or an unsupported layout."""


class DomainError(FigsepError, ValueError):
    """Raised when a value lies outside the domain an operation accepts."""


class InputTooSmall(FigsepError, ValueError):
    """Raised when an input is smaller than the operation requires."""


class ShapeError(FigsepError, ValueError):
    """Raised on mismatched array dimensions."""


class DegenerateTrainingSet(FigsepError, ValueError):
    """Raised when a training set contains fewer than two classes."""


class NoSeparators(FigsepError):
    """Raised when a direction decision is requested with no candidate lines."""


class ParseError(FigsepError, ValueError):
    """Raised for malformed persisted records; carries a line number."""

    def __init__(self, message: str, line: int | None = None):
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)
        self.line = line


class MissingAsset(FigsepError):
    """Raised when a referenced file does not exist on disk."""


class AlignmentError(FigsepError):
    """Raised when two id-aligned collections do not cover the same ids."""
