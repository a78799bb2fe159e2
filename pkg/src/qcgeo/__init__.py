"""Exact-arithmetic toolkit for quaternionic contact geometry on coframe models."""

from .lie_input import CoframeModel, parse_model, serialize_model, validate_jacobi
from .qc_pipeline import GeometryReport, analyze

__all__ = [
    "CoframeModel",
    "GeometryReport",
    "analyze",
    "parse_model",
    "serialize_model",
    "validate_jacobi",
]

__version__ = "0.1.0"
