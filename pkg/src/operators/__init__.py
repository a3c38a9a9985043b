"""Lenard-Bernstein stabilization operators."""

from .lenard_bernstein import (
    LBOperator,
    annihilated_moments,
    apply_lb,
    build_lb,
    compose_lb,
    lb_table_rows,
    mode_space_factors,
)

__all__ = [
    "LBOperator",
    "annihilated_moments",
    "apply_lb",
    "build_lb",
    "compose_lb",
    "lb_table_rows",
    "mode_space_factors",
]
