"""Multiresolution machinery: filters, connection coefficients, transforms."""

from .basis import (
    SUBBANDS,
    CoefficientField,
    MraBasis,
    ResolutionError,
    analyze,
    grid,
    level_split,
    synthesize,
    wavedec,
    waverec,
)
from .connection import ConnectionCoefficients, SmoothnessError, connection_coefficients, moment_connection
from .filters import (
    UnsupportedOrderError,
    WaveletFamily,
    build_family,
    monomial_moments,
    scaling_function_values,
)

__all__ = [
    "SUBBANDS",
    "CoefficientField",
    "ConnectionCoefficients",
    "MraBasis",
    "ResolutionError",
    "SmoothnessError",
    "UnsupportedOrderError",
    "WaveletFamily",
    "analyze",
    "build_family",
    "connection_coefficients",
    "grid",
    "level_split",
    "moment_connection",
    "monomial_moments",
    "scaling_function_values",
    "synthesize",
    "wavedec",
    "waverec",
]
