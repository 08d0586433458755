"""
Utils Package - Validation, errors and logging helpers
"""

from .errors import (
    RectifiabilityError,
    ValidationError,
    LengthMismatchError,
    NegativeWeightError,
    DimensionError,
    PreconditionError,
    FormatError,
    ResolutionError,
    ResourceError,
    AuditFailureError,
)
from .validators import (
    as_point_array,
    as_query_point,
    validate_radius,
    validate_dimensions,
    parse_point,
    parse_float_list,
)
from .logging_config import setup_logging

__all__ = [
    'RectifiabilityError',
    'ValidationError',
    'LengthMismatchError',
    'NegativeWeightError',
    'DimensionError',
    'PreconditionError',
    'FormatError',
    'ResolutionError',
    'ResourceError',
    'AuditFailureError',
    'as_point_array',
    'as_query_point',
    'validate_radius',
    'validate_dimensions',
    'parse_point',
    'parse_float_list',
    'setup_logging'
]
