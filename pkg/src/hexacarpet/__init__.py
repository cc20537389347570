"""Resistance scaling on barycentric-subdivision graph families."""

from .subdivision import (
    CapacityError,
    MissingLevelError,
    SimplexId,
    SubdivisionComplex,
)

__all__ = [
    "CapacityError",
    "MissingLevelError",
    "SimplexId",
    "SubdivisionComplex",
]

__version__ = "0.1.0"
