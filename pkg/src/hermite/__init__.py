"""
Hermite bases, quadrature and inequality oracles.

Everything downstream (operators, advection, Vlasov-Poisson, diagnostics)
builds on the constants and conventions defined here.
"""

from .core import (
    CoefficientVector,
    HermiteBasis,
    QuadratureRule,
    default_quadrature,
    derivative,
    gauss_hermite,
    hermite_derivative_coeffs,
    hermite_eval,
    hermite_norm_sq,
    max_degree,
    multiply_by_v,
    project,
    reconstruct,
    weighted_norm_sq,
)

__all__ = [
    "CoefficientVector",
    "HermiteBasis",
    "QuadratureRule",
    "default_quadrature",
    "derivative",
    "gauss_hermite",
    "hermite_derivative_coeffs",
    "hermite_eval",
    "hermite_norm_sq",
    "max_degree",
    "multiply_by_v",
    "project",
    "reconstruct",
    "weighted_norm_sq",
]
