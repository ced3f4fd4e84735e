"""Exact and numerical certificates for the constructive lemmas of
polyharmonic neck analysis in dimension 2m."""

from polyneck.errors import (
    DomainError,
    GenerationError,
    InvalidParameter,
    PolyneckError,
    PreconditionError,
    SearchFailure,
)

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "GenerationError",
    "InvalidParameter",
    "PolyneckError",
    "PreconditionError",
    "SearchFailure",
]
