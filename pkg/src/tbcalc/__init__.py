"""Exact index-set calculus with a numerical Fredholm analyzer on top."""

from .indexset import (
    Exponent,
    GapViolation,
    IndexPoint,
    IndexSet,
    closure0,
    closure12,
    pxind0,
)

__all__ = [
    "Exponent",
    "GapViolation",
    "IndexPoint",
    "IndexSet",
    "closure0",
    "closure12",
    "pxind0",
]

__version__ = "0.1.0"
