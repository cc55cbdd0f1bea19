"""Numerical study of principal-value oscillatory integrals with polynomial
phases and homogeneous Calderon-Zygmund kernels."""
from .errors import HypothesisError, NumericalError, OsclogError
from .poly import MultiPoly, Poly, homogeneous_parts, isolate_roots, radial_restriction

__version__ = "0.1.0"
