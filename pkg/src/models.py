"""
Core data models for the Hermite Kinetics toolkit.

These Pydantic models define the schema for everything that crosses a process
boundary. They're used for:
1. Validating flat key=value run configs before any output is written
2. Serializing the resolved configuration into the run manifest
3. Typing the per-step rows that end up in the diagnostics CSV

Numerical state (bases, coefficient arrays, operators) lives in frozen
dataclasses next to the code that uses it; only plain data goes through here.
"""
from __future__ import annotations

import math
from datetime import datetime, timezone
from enum import Enum
from typing import Any, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator


# =============================================================================
# Enums
# =============================================================================


class BasisKind(str, Enum):
    """Hermite basis families."""

    AW = "AW"  # Asymmetrically weighted: H_n e^{-v^2}, dual H_n
    SW = "SW"  # Symmetrically weighted: H_n e^{-v^2/2} on both sides


class CoefficientConvention(str, Enum):
    """Which coefficients a vector holds."""

    POLYNOMIAL = "polynomial"  # C_n, multiplies H_n
    NORMALIZED = "normalized"  # C_n* = C_n / gamma_n, multiplies psi_n


class DealiasMode(str, Enum):
    """Treatment of the quadratic E * df/dv product in x."""

    NONE = "none"
    TWO_THIRDS = "two_thirds"


class FieldTreatment(str, Enum):
    """How the midpoint field enters the trapezoidal update."""

    IMPLICIT = "implicit"  # Picard iteration on (E^j + E^{j-1}) / 2
    EXPLICIT = "explicit"  # frozen at E^{j-1}


class Command(str, Enum):
    """CLI subcommands."""

    ADVECT = "advect"
    VP = "vp"
    STABILITY_CALC = "stability-calc"
    LB_TABLE = "lb-table"
    PROJECT_IC = "project-ic"


class AdvectionInitial(str, Enum):
    """Initial conditions for the 1-D advection problem."""

    MAXWELLIAN = "maxwellian"
    SHIFTED = "shifted"  # exact travelling solution evaluated at t = shift
    RANDOM = "random"
    TABULATED = "tabulated"


class VPInitial(str, Enum):
    """Initial conditions for Vlasov-Poisson runs."""

    LANDAU = "landau"
    EQUILIBRIUM = "equilibrium"
    TABULATED = "tabulated"


class SnapshotFormat(str, Enum):
    """Coefficient snapshot encodings."""

    BINARY = "binary"
    TEXT = "text"


# =============================================================================
# Run Configuration
# =============================================================================


class SimConfig(BaseModel):
    """
    Settings shared by the advection and Vlasov-Poisson drivers.

    Attributes:
        N: Hermite truncation degree (modes 0..N)
        k: Lenard-Bernstein order parameter (operator of order 2k)
        nu: Artificial viscosity
        lb: Whether the Lenard-Bernstein term is switched on
        dt: Time step; None means time_step_heuristic(nu, N)
        T: Final time
        seed: Seed for randomized initial data, recorded in the manifest
        record_every: Emit a diagnostics row every this many steps
    """

    model_config = ConfigDict(extra="forbid", use_enum_values=False)

    basis: BasisKind = BasisKind.AW
    N: int = Field(..., ge=0, description="Hermite truncation degree")
    k: int = Field(1, ge=1, description="Lenard-Bernstein order parameter")
    nu: float = Field(1.0, gt=0, description="Artificial viscosity")
    lb: bool = Field(True, description="Apply the Lenard-Bernstein term")
    dt: Optional[float] = Field(None, gt=0, description="Time step")
    T: float = Field(1.0, gt=0, description="Final time")
    seed: Optional[int] = Field(None, ge=0)
    record_every: int = Field(1, ge=1)

    @model_validator(mode="after")
    def _check_orders(self) -> SimConfig:
        from src.hermite.core import max_degree

        if self.N > max_degree():
            raise ValueError(f"N={self.N} exceeds the degree cap {max_degree()}")
        if self.lb and self.k > self.N:
            raise ValueError(f"LB order k={self.k} exceeds truncation N={self.N}")
        if self.dt is None and self.N < 1:
            raise ValueError("dt must be given explicitly when N = 0")
        return self

    @property
    def resolved_dt(self) -> float:
        """The step actually used: explicit dt or the nu*N*dt = 1/2 heuristic."""
        if self.dt is not None:
            return self.dt
        from src.integrators.trapezoidal import time_step_heuristic

        return time_step_heuristic(self.nu, self.N)

    @property
    def steps(self) -> int:
        """Number of uniform steps to reach T (rounded to the nearest integer)."""
        return max(1, int(round(self.T / self.resolved_dt)))


class AdvectionConfig(SimConfig):
    """Configuration of the 1-D model problem df/dt - df/dv = LB term."""

    problem: Literal["advection"] = "advection"
    ic: AdvectionInitial = AdvectionInitial.MAXWELLIAN
    shift: float = 0.0
    ic_file: Optional[str] = None
    freeze_mean: bool = Field(False, description="SW only: force dC_0/dt = 0")

    @model_validator(mode="after")
    def _check_initial(self) -> AdvectionConfig:
        if self.ic == AdvectionInitial.TABULATED and not self.ic_file:
            raise ValueError("ic=tabulated requires ic_file")
        if self.freeze_mean and self.basis != BasisKind.SW:
            raise ValueError("freeze_mean only applies to the SW basis")
        return self


class VPConfig(SimConfig):
    """
    Configuration of a 1D-1V Vlasov-Poisson run (AW Hermite x Fourier).

    Attributes:
        Mx: Fourier truncation, modes m in -Mx..Mx
        Lx: Spatial period
        picard_tol: Coefficient-space residual at which Picard stops
        picard_max: Iteration budget per step
        dealias: Product treatment for E * df/dv
        field_treatment: Implicit (Picard) or explicit midpoint field
        ic: Initial condition family
        amplitude: Density perturbation amplitude
        mode: Fourier mode carrying the perturbation
        snapshot_every: Write a coefficient snapshot every this many steps (0 = off)
    """

    problem: Literal["vp"] = "vp"
    N: int = Field(..., ge=1, description="Hermite truncation degree")
    Mx: int = Field(..., ge=1, description="Fourier truncation")
    Lx: float = Field(4.0 * math.pi, gt=0, description="Spatial period")
    picard_tol: float = Field(1e-12, gt=0)
    picard_max: int = Field(50, ge=1)
    dealias: DealiasMode = DealiasMode.TWO_THIRDS
    field_treatment: FieldTreatment = FieldTreatment.IMPLICIT
    ic: VPInitial = VPInitial.LANDAU
    amplitude: float = Field(0.01, ge=0)
    mode: int = Field(1, ge=1)
    ic_file: Optional[str] = None
    snapshot_every: int = Field(0, ge=0)
    snapshot_format: SnapshotFormat = SnapshotFormat.BINARY

    @model_validator(mode="after")
    def _check_vp(self) -> VPConfig:
        if self.basis != BasisKind.AW:
            raise ValueError("Vlasov-Poisson runs use the AW basis")
        if self.mode > self.Mx:
            raise ValueError(f"perturbation mode {self.mode} exceeds Mx={self.Mx}")
        if self.ic == VPInitial.TABULATED and not self.ic_file:
            raise ValueError("ic=tabulated requires ic_file")
        return self


# =============================================================================
# Solver Records
# =============================================================================


class PicardStats(BaseModel):
    """Outcome of the fixed-point iteration inside one Vlasov-Poisson step."""

    iterations: int = 0
    residual: float = 0.0
    converged: bool = True


class TrapRecord(BaseModel):
    """One row of a 1-D advection trajectory."""

    step: int
    t: float
    weighted_l2: float
    stability_Y: Optional[float] = None  # noqa: N815
    mass: Optional[float] = None  # AW only
    coefficients: list[float] = Field(default_factory=list)

    def flat(self) -> dict[str, Any]:
        """Row form with one column per coefficient."""
        row = self.model_dump(exclude={"coefficients"})
        row.update({f"c{n}": value for n, value in enumerate(self.coefficients)})
        return row


class DiagnosticsRecord(BaseModel):
    """
    Per-step conserved quantities of a Vlasov-Poisson run.

    dt_visc / dt_spec are None while the field vanishes (no bound applies).
    M_bound is the a-priori bound on M_field from the weighted L2 norm of h.
    """

    step: int = Field(..., ge=0)
    t: float
    mass: float
    momentum: float
    moment2: float
    field_energy: float
    total_energy: float
    gauss_residual: float = Field(..., ge=0)
    weighted_l2: float
    stability_Y: Optional[float] = None  # noqa: N815
    M_field: float = Field(..., ge=0)
    M_bound: Optional[float] = Field(None, ge=0)
    picard_iterations: int = 0
    dt_visc: Optional[float] = None
    dt_spec: Optional[float] = None

    @model_validator(mode="after")
    def _check_finite(self) -> DiagnosticsRecord:
        for name, value in self.model_dump().items():
            if isinstance(value, float) and not math.isfinite(value):
                raise ValueError(f"diagnostic {name} is not finite: {value}")
        return self

    def flat(self) -> dict[str, Any]:
        return self.model_dump()


class RunManifest(BaseModel):
    """Everything needed to repeat a run: resolved config plus provenance."""

    command: Command
    config: dict[str, Any]
    version: str
    seed: Optional[int] = None
    deterministic: bool = False
    created_at: datetime = Field(default_factory=lambda: datetime.now(timezone.utc))
