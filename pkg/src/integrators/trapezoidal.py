"""
Implicit trapezoidal stepping for the 1-D advection systems.

One step solves

    (C^j - C^{j-1}) / dt = A (C^j + C^{j-1}) / 2

where A is the Galerkin generator. On the AW basis A is lower bidiagonal
(-C_{n-1} coupling plus the diagonal LB decay), so the update is a forward
substitution:

    C_n^j (1 + dt r_n / 2) = C_n^{j-1} (1 - dt r_n / 2) - dt/2 (C_{n-1}^j + C_{n-1}^{j-1})

with r_n = nu (-1)^k lambda_n. On the SW basis A is tridiagonal and the step
goes through a banded solve. For k = 1 the diagonal factor of each mode is

    chi_n = (1 - nu n dt / 2) / (1 + nu n dt / 2),  |chi_n| < 1.

Stability is monitored with the weights w_1 = 1, w_{n+1} = nu^2 (n+1)(n-1/2) w_n:
for C_0 = 0 the weighted sum sum_{n>=1} w_n C_n^2 never increases under the
scheme, and Y = sum w_n C_n^2 - (2/nu^2) w_1 C_0^2 is the monitored functional.

Usage:
    from src.integrators.trapezoidal import TrapezoidalIntegrator, time_step_heuristic

    dt = time_step_heuristic(nu=1.0, N=10)
    integrator = TrapezoidalIntegrator(system, dt)
    final = integrator.run(steps=100, sink=sink)
"""
from __future__ import annotations

import logging
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
from scipy.linalg import LinAlgError, solve_banded

from src.advection.model import AdvectionSystem
from src.diagnostics.moments import moment
from src.errors import SingularUpdateError
from src.hermite.core import CoefficientVector, weighted_norm_sq
from src.models import BasisKind, TrapRecord

logger = logging.getLogger(__name__)


# =============================================================================
# State and Weights
# =============================================================================


@dataclass(frozen=True)
class TrapState:
    """
    Solution after step_index uniform steps.

    Attributes:
        c: Polynomial-convention coefficients C^j
        t: step_index * dt
        dt: Time step
        step_index: j
    """

    c: CoefficientVector
    t: float
    dt: float
    step_index: int = 0

    @classmethod
    def initial(cls, c: CoefficientVector, dt: float) -> TrapState:
        if dt <= 0:
            raise ValueError(f"time step must be positive, got {dt}")
        return cls(c=c.to_polynomial(), t=0.0, dt=dt, step_index=0)


@dataclass(frozen=True, eq=False)
class StabilityWeights:
    """w_1..w_N stored as w[0]..w[N-1]."""

    nu: float
    w: np.ndarray

    def __getitem__(self, n: int) -> float:
        """w_n for 1 <= n <= N."""
        return float(self.w[n - 1])


@dataclass(frozen=True)
class StabilityNorm:
    """The two parts of Y and their combination."""

    weighted_sum: float  # sum_{n>=1} w_n C_n^2
    correction: float  # (2 / nu^2) w_1 C_0^2

    @property
    def value(self) -> float:
        return self.weighted_sum - self.correction


def stability_weights(nu: float, N: int) -> StabilityWeights:  # noqa: N803
    """w_1 = 1, w_{n+1} = nu^2 (n+1)(n-1/2) w_n."""
    if nu <= 0:
        raise ValueError(f"viscosity nu must be positive, got {nu}")
    w = np.empty(max(N, 0))
    if N >= 1:
        w[0] = 1.0
    for n in range(1, N):
        w[n] = nu**2 * (n + 1) * (n - 0.5) * w[n - 1]
    w.setflags(write=False)
    return StabilityWeights(nu=float(nu), w=w)


def weighted_stability_sum(c: CoefficientVector, weights: StabilityWeights) -> float:
    """sum_{n>=1} w_n C_n^2."""
    p = c.polynomial_values
    return float(np.sum(weights.w * p[1 : weights.w.size + 1] ** 2))


def stability_norm_y(c: CoefficientVector, weights: StabilityWeights) -> StabilityNorm:
    """Y = sum_{n>=1} w_n C_n^2 - (2/nu^2) w_1 C_0^2, returned with both parts."""
    w1 = weights.w[0] if weights.w.size else 1.0
    correction = 2.0 / weights.nu**2 * w1 * c.polynomial_values[0] ** 2
    return StabilityNorm(weighted_stability_sum(c, weights), float(correction))


# =============================================================================
# Scalar helpers
# =============================================================================


def chi(n: int, nu: float, dt: float) -> float:
    """Amplification factor of mode n >= 1 for the k = 1 AW scheme."""
    if n < 1 or nu <= 0 or dt <= 0:
        raise ValueError(f"chi needs n >= 1, nu > 0, dt > 0; got n={n}, nu={nu}, dt={dt}")
    half = 0.5 * nu * n * dt
    return (1.0 - half) / (1.0 + half)


def time_step_heuristic(nu: float, N: int) -> float:  # noqa: N803
    """dt with nu N dt = 1/2."""
    if nu <= 0 or N < 1:
        raise ValueError(f"heuristic needs nu > 0 and N >= 1, got nu={nu}, N={N}")
    return 1.0 / (2.0 * nu * N)


# =============================================================================
# Stepping
# =============================================================================


def _forward_substitution(old: np.ndarray, rates: np.ndarray, dt: float) -> np.ndarray:
    half = 0.5 * dt
    new = np.empty_like(old)
    for n in range(old.size):
        denom = 1.0 + half * rates[n]
        if denom == 0.0:
            raise SingularUpdateError(f"trapezoidal update singular at mode n={n}")
        value = (1.0 - half * rates[n]) * old[n]
        if n:
            value -= half * (new[n - 1] + old[n - 1])
        new[n] = value / denom
    return new


def _banded_step(system: AdvectionSystem, old: np.ndarray, dt: float) -> np.ndarray:
    half = 0.5 * dt
    size = old.size
    # (I - dt/2 A) rows: upper A[n, n+1] = n+1, diagonal -r_n, lower A[n, n-1] = -1/2
    bands = np.zeros((3, size))
    bands[0, 1:] = -half * np.arange(1, size)
    if system.freeze_mean and size > 1:
        bands[0, 1] = 0.0
    bands[1] = 1.0 + half * system.decay_rates
    bands[2, :-1] = half * 0.5
    rhs = old + half * system.rhs(old)
    try:
        return solve_banded((1, 1), bands, rhs)
    except (LinAlgError, ValueError) as exc:
        raise SingularUpdateError(f"banded trapezoidal solve failed: {exc}") from exc


def trap_step(state: TrapState, system: AdvectionSystem) -> TrapState:
    """Advance one trapezoidal step."""
    if state.dt <= 0:
        raise ValueError(f"time step must be positive, got {state.dt}")
    old = state.c.polynomial_values
    if system.basis_kind == BasisKind.AW:
        new = _forward_substitution(old, system.decay_rates, state.dt)
    else:
        new = _banded_step(system, old, state.dt)
    j = state.step_index + 1
    return TrapState(
        c=CoefficientVector(state.c.basis, new), t=j * state.dt, dt=state.dt, step_index=j
    )


class TrapezoidalIntegrator:
    """
    Runs trap_step in a loop and emits TrapRecord rows.

    Y is recorded for AW systems with k = 1 stabilization, the only case the
    weights are built for.
    """

    def __init__(self, system: AdvectionSystem, dt: float):
        self.system = system
        self.dt = dt
        self.weights: Optional[StabilityWeights] = None
        if system.lb is not None and system.lb.k == 1 and system.basis_kind == BasisKind.AW:
            self.weights = stability_weights(system.lb.nu, system.N)

    def initial_state(self) -> TrapState:
        return TrapState.initial(self.system.initial, self.dt)

    def record(self, state: TrapState) -> TrapRecord:
        y = stability_norm_y(state.c, self.weights).value if self.weights else None
        mass = moment(state.c, 0) if self.system.basis_kind == BasisKind.AW else None
        return TrapRecord(
            step=state.step_index,
            t=state.t,
            weighted_l2=weighted_norm_sq(state.c),
            stability_Y=y,
            mass=mass,
            coefficients=state.c.values.tolist(),
        )

    def run(
        self,
        steps: int,
        state: Optional[TrapState] = None,
        sink=None,
        record_every: int = 1,
        on_step: Optional[Callable[[TrapState], None]] = None,
    ) -> TrapState:
        """Take `steps` steps from `state` (default: the initial data)."""
        state = state or self.initial_state()
        if sink is not None:
            sink.append(self.record(state))
        for _ in range(steps):
            state = trap_step(state, self.system)
            if sink is not None and state.step_index % record_every == 0:
                sink.append(self.record(state))
            if on_step is not None:
                on_step(state)
        logger.info(
            f"Integrated {self.system.basis_kind.value} advection to t={state.t:.6g} "
            f"in {steps} steps"
        )
        return state
