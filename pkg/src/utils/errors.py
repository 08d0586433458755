"""
Error hierarchy shared by every package.

The CLI maps these classes onto exit codes, so each failure mode that the
command line must distinguish gets its own class.
"""

from typing import Any, Optional


class RectifiabilityError(Exception):
    """Base class for all errors raised by the library."""


class ValidationError(RectifiabilityError, ValueError):
    """Invalid input: malformed arrays, out-of-range parameters, bad files."""


class LengthMismatchError(ValidationError):
    """Point and weight arrays disagree in length."""


class NegativeWeightError(ValidationError):
    """A measure received a negative weight."""


class DimensionError(ValidationError):
    """Ambient/intrinsic dimensions are inconsistent (n > d, d mismatch, ...)."""


class PreconditionError(ValidationError):
    """An operation's hypothesis does not hold for the given input."""


class FormatError(ValidationError):
    """A measure or report file does not follow the expected layout."""


class ResolutionError(RectifiabilityError):
    """Requested scales fall below what the point cloud resolves."""

    def __init__(self, message: str, r_min: Optional[float] = None, h: Optional[float] = None):
        super().__init__(message)
        self.r_min = r_min
        self.h = h


class ResourceError(RectifiabilityError):
    """A generator would exceed the configured point budget."""


class AuditFailureError(RectifiabilityError):
    """A Calderon-Zygmund decomposition failed one or more audit clauses."""

    def __init__(self, message: str, decomposition: Any = None, report: Any = None):
        super().__init__(message)
        self.decomposition = decomposition
        self.report = report
