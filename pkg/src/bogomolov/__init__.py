"""Exact-rational numerics for slope stability, discriminants and effective bounds."""

from .errors import (
    BogomolovError,
    CoveringError,
    DegenerateFormError,
    DimensionMismatch,
    DomainError,
    PreconditionError,
    SchemaError,
    SearchCapExceeded,
    SignatureError,
)

__version__ = "0.1.0"

__all__ = [
    "BogomolovError",
    "CoveringError",
    "DegenerateFormError",
    "DimensionMismatch",
    "DomainError",
    "PreconditionError",
    "SchemaError",
    "SearchCapExceeded",
    "SignatureError",
]
