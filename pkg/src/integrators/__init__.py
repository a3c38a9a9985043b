"""Time integrators for the 1-D coefficient systems."""

from .trapezoidal import (
    StabilityNorm,
    StabilityWeights,
    TrapezoidalIntegrator,
    TrapState,
    chi,
    stability_norm_y,
    stability_weights,
    time_step_heuristic,
    trap_step,
    weighted_stability_sum,
)

__all__ = [
    "StabilityNorm",
    "StabilityWeights",
    "TrapezoidalIntegrator",
    "TrapState",
    "chi",
    "stability_norm_y",
    "stability_weights",
    "time_step_heuristic",
    "trap_step",
    "weighted_stability_sum",
]
