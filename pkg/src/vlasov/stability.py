"""
Advisory time-step bounds for the Vlasov-Poisson trapezoidal scheme.

With M = max_x |E^j + E^{j-1}| (estimated as 2 max|E^{j-1}|):

    dt <= 16 nu / M^2               (viscous bound)
    dt <= 4 / (M sqrt(2N))          (spectral bound)
    nu ~ M / (4 sqrt(2N))           (viscosity balancing the two)

Both bounds are sufficient conditions from a linearized analysis; the solver
logs when a step exceeds them but never refuses to take it.

M can also be bounded a priori through the field's gradient:

    M^2 <= |Omega_x| (8 |Omega_x| + sqrt(pi) H),   H = int int h^2 e^{-v^2} dv dx
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.diagnostics.moments import hermite_weighted_h
from src.vlasov.field import CoefficientField, ElectricField, reconstruct_E

GRID_OVERSAMPLING = 16


@dataclass(frozen=True)
class StabilityBounds:
    dt_visc: float
    dt_spec: float
    nu_suggested: float

    @property
    def dt_max(self) -> float:
        return min(self.dt_visc, self.dt_spec)

    @property
    def unbounded(self) -> bool:
        return math.isinf(self.dt_visc) and math.isinf(self.dt_spec)


@dataclass(frozen=True)
class FieldEstimate:
    """
    Attributes:
        direct: max |2E| over a fine physical grid
        integral_bound: 8 |Omega_x| + sqrt(pi) H
        h_integral: H of the state used for the bound (0 without a state)
        Lx: |Omega_x|
    """

    direct: float
    integral_bound: float
    h_integral: float
    Lx: float

    @property
    def bound_on_M(self) -> float:  # noqa: N802
        """sqrt(|Omega_x| * integral_bound), comparable with `direct`."""
        return math.sqrt(self.Lx * self.integral_bound)


def stability_bounds(M_field: float, nu: float, N: int) -> StabilityBounds:  # noqa: N803
    if M_field < 0:
        raise ValueError(f"field magnitude must be non-negative, got {M_field}")
    if nu <= 0 or N < 1:
        raise ValueError(f"bounds need nu > 0 and N >= 1, got nu={nu}, N={N}")
    root = math.sqrt(2.0 * N)
    if M_field == 0:
        return StabilityBounds(math.inf, math.inf, 0.0)
    return StabilityBounds(
        dt_visc=16.0 * nu / M_field**2,
        dt_spec=4.0 / (M_field * root),
        nu_suggested=M_field / (4.0 * root),
    )


def field_max_estimate(
    E: ElectricField,  # noqa: N803
    Lx: float,  # noqa: N803
    state: Optional[CoefficientField] = None,
    points: Optional[int] = None,
) -> FieldEstimate:
    """Direct max |2E| on a fine grid, plus the integral bound from `state`."""
    points = points or GRID_OVERSAMPLING * (2 * E.Mx + 1)
    x = np.linspace(0.0, Lx, points, endpoint=False)
    direct = 2.0 * float(np.max(np.abs(reconstruct_E(E, x).real))) if E.Mx else 0.0
    h_integral = hermite_weighted_h(state) if state is not None else 0.0
    bound = 8.0 * Lx + math.sqrt(math.pi) * h_integral
    return FieldEstimate(direct=direct, integral_bound=bound, h_integral=h_integral, Lx=Lx)
