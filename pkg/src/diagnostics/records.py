"""
Per-step diagnostics of a Vlasov-Poisson state.

    mass          int int f dv dx
    momentum      int int v f dv dx
    moment2       int int v^2 f dv dx
    field_energy  1/2 int E^2 dx
    total_energy  moment2 / 2 + field_energy

Mass is conserved for every k, momentum for k >= 2 and total energy for k >= 3.
"""
from __future__ import annotations

from src.diagnostics.moments import hermite_weighted_h, moment
from src.models import DiagnosticsRecord, PicardStats
from src.vlasov.field import CoefficientField, ElectricField, field_energy, gauss_residual
from src.vlasov.stability import field_max_estimate, stability_bounds


def total_energy(
    state: CoefficientField, E: ElectricField, fixed_order: bool = False  # noqa: N803
) -> float:
    return 0.5 * moment(state, 2, fixed_order) + field_energy(E)


def vp_record(
    step: int,
    t: float,
    state: CoefficientField,
    E: ElectricField,  # noqa: N803
    stats: PicardStats,
    nu: float,
    fixed_order: bool = False,
) -> DiagnosticsRecord:
    """Evaluate every diagnostic of `state` into one record."""
    estimate = field_max_estimate(E, state.Lx, state=state)
    bounds = stability_bounds(estimate.direct, nu, state.N)
    energy = field_energy(E)
    second = moment(state, 2, fixed_order)
    return DiagnosticsRecord(
        step=step,
        t=t,
        mass=moment(state, 0, fixed_order),
        momentum=moment(state, 1, fixed_order),
        moment2=second,
        field_energy=energy,
        total_energy=0.5 * second + energy,
        gauss_residual=gauss_residual(state, E),
        weighted_l2=hermite_weighted_h(state, fixed_order),
        M_field=estimate.direct,
        M_bound=estimate.bound_on_M,
        picard_iterations=stats.iterations,
        dt_visc=None if bounds.unbounded else bounds.dt_visc,
        dt_spec=None if bounds.unbounded else bounds.dt_spec,
    )
