"""1-D advection model problem: coefficient systems, closed forms, exact solutions."""

from .exact import exact_coefficients, exact_coeffs_aw, exact_coeffs_sw, exact_solution
from .model import (
    AdvectionSystem,
    alpha_table,
    classical_stability_offset,
    closed_form_aw,
    polynomial_solution_aw,
    rhs_aw,
    rhs_sw,
    steady_state_aw,
)

__all__ = [
    "AdvectionSystem",
    "alpha_table",
    "classical_stability_offset",
    "closed_form_aw",
    "exact_coefficients",
    "exact_coeffs_aw",
    "exact_coeffs_sw",
    "exact_solution",
    "polynomial_solution_aw",
    "rhs_aw",
    "rhs_sw",
    "steady_state_aw",
]
