"""
Vlasov-Poisson solver: AW Hermite in v, Fourier in x, trapezoidal in t.

Equation (electrons, unit ion background, stabilized):

    df/dt + v df/dx - E df/dv = -(-1)^k nu (L*)^k L^k f,   dE/dx = 1 - int f dv

Coefficient system in the polynomial convention, from 2v H_n = 2n H_{n-1} + H_{n+1}
and d/dv (H_n e^{-v^2}) = -H_{n+1} e^{-v^2}:

    dC^_{m,n}/dt = -i kappa_m [ (n+1) C^_{m,n+1} + 1/2 C^_{m,n-1} ]     streaming
                   - (E * C_{n-1})^_m                                   acceleration
                   - nu (-1)^k lambda_n C^_{m,n}                         LB

In the normalized convention C* the streaming factors become sqrt((n+1)/2)
and sqrt(n/2), and the acceleration factor sqrt(2n).

The product E * C_{n-1} is evaluated pseudo-spectrally: transform to a grid of
2Mx+1 points (dealias=none) or 3Mx+1 points (dealias=two_thirds, which makes the
retained modes alias-free), multiply, transform back. Inside the implicit solve
the same product appears as a Toeplitz (two_thirds) or circulant (none) matrix
in m, so both paths give the same operator.

Each step solves

    (C^j - C^{j-1}) / dt = A(E_mid) (C^j + C^{j-1}) / 2,   E_mid = (E^j + E^{j-1}) / 2

by Picard iteration on E^j: freeze E_mid, solve the linear system (sparse LU),
refresh E^j from Poisson, repeat until the coefficient change drops below
picard_tol. With field_treatment=explicit E_mid = E^{j-1} and one solve is done.

Usage:
    from src.vlasov.solver import VlasovPoissonSolver

    solver = VlasovPoissonSolver(cfg)
    state, field = solver.run(sink=sink)
"""
from __future__ import annotations

import logging
from pathlib import Path
from typing import Callable, Optional

import numpy as np
from scipy import sparse
from scipy.sparse.linalg import spsolve

from src.diagnostics.records import vp_record
from src.errors import PicardNonConvergenceError, SingularUpdateError
from src.hermite.core import HermiteBasis
from src.models import (
    BasisKind,
    DealiasMode,
    FieldTreatment,
    PicardStats,
    SnapshotFormat,
    VPConfig,
)
from src.operators.lenard_bernstein import LBOperator, build_lb
from src.vlasov.field import CoefficientField, ElectricField, poisson_solve, wavenumbers
from src.vlasov.initial import build_initial_state
from src.vlasov.snapshots import write_snapshot
from src.vlasov.stability import field_max_estimate, stability_bounds

logger = logging.getLogger(__name__)

PICARD_WARN_FRACTION = 0.8


# =============================================================================
# Pseudo-spectral product
# =============================================================================


def product_grid_size(Mx: int, dealias: DealiasMode) -> int:  # noqa: N803
    """Grid points for the E * C product."""
    if DealiasMode(dealias) == DealiasMode.TWO_THIRDS:
        return 3 * Mx + 1
    return 2 * Mx + 1


def _to_grid(coeffs: np.ndarray, points: int) -> np.ndarray:
    Mx = (coeffs.shape[0] - 1) // 2
    spectrum = np.zeros((points,) + coeffs.shape[1:], dtype=complex)
    spectrum[np.arange(-Mx, Mx + 1) % points] = coeffs
    return np.fft.ifft(spectrum, axis=0) * points


def _from_grid(values: np.ndarray, Mx: int) -> np.ndarray:  # noqa: N803
    points = values.shape[0]
    spectrum = np.fft.fft(values, axis=0) / points
    return spectrum[np.arange(-Mx, Mx + 1) % points]


def convolve_modes(ehat: np.ndarray, coeffs: np.ndarray, dealias: DealiasMode) -> np.ndarray:
    """(E * C)^_m for every column of coeffs, by transform-multiply-transform."""
    Mx = (ehat.size - 1) // 2
    points = product_grid_size(Mx, dealias)
    e_grid = _to_grid(ehat[:, None], points)
    c_grid = _to_grid(coeffs, points)
    return _from_grid(e_grid * c_grid, Mx)


def field_coupling_matrix(ehat: np.ndarray, dealias: DealiasMode) -> np.ndarray:
    """Matrix T with T @ c == convolve_modes(ehat, c) for a single column c."""
    Mx = (ehat.size - 1) // 2
    m = np.arange(-Mx, Mx + 1)
    offset = m[:, None] - m[None, :]
    if DealiasMode(dealias) == DealiasMode.TWO_THIRDS:
        inside = np.abs(offset) <= Mx
        return np.where(inside, ehat[np.clip(offset, -Mx, Mx) + Mx], 0.0)
    period = 2 * Mx + 1
    wrapped = (offset + Mx) % period
    return ehat[wrapped]


# =============================================================================
# Right-hand side and operator
# =============================================================================


def vlasov_rhs(
    state: CoefficientField,
    E: ElectricField,  # noqa: N803
    lb: Optional[LBOperator] = None,
    cfg: Optional[VPConfig] = None,
) -> CoefficientField:
    """dC^/dt of the semi-discrete system at fixed field E."""
    dealias = cfg.dealias if cfg is not None else DealiasMode.TWO_THIRDS
    chat = state.Chat
    N = state.N
    stream = np.zeros_like(chat)
    stream[:, :N] += np.arange(1, N + 1)[None, :] * chat[:, 1:]
    stream[:, 1:] += 0.5 * chat[:, :-1]
    out = -1j * state.kappa[:, None] * stream
    out[:, 1:] -= convolve_modes(E.Ehat, chat[:, :-1], dealias)
    if lb is not None:
        out -= lb.decay_rates[None, :] * chat
    return state.with_chat(out)


def flatten(chat: np.ndarray) -> np.ndarray:
    """Hermite-major vector: entry n*(2Mx+1) + (m+Mx)."""
    return np.ascontiguousarray(chat.T).reshape(-1)


def unflatten(vector: np.ndarray, Mx: int, N: int) -> np.ndarray:  # noqa: N803
    return vector.reshape(N + 1, 2 * Mx + 1).T


class VlasovPoissonOperator:
    """
    Sparse generator A(E) of the coefficient system, ordered as flatten().

    The streaming and LB parts do not depend on the field and are assembled once.
    """

    def __init__(
        self,
        N: int,  # noqa: N803
        Mx: int,  # noqa: N803
        Lx: float,  # noqa: N803
        lb: Optional[LBOperator] = None,
        dealias: DealiasMode = DealiasMode.TWO_THIRDS,
    ):
        self.N = N
        self.Mx = Mx
        self.dealias = DealiasMode(dealias)
        self.size = (N + 1) * (2 * Mx + 1)
        kappa = wavenumbers(Mx, Lx)
        hermite_stream = sparse.diags(
            [np.arange(1, N + 1, dtype=float), np.full(N, 0.5)], [1, -1], shape=(N + 1, N + 1)
        )
        stream = sparse.kron(hermite_stream, sparse.diags(-1j * kappa))
        rates = lb.decay_rates if lb is not None else np.zeros(N + 1)
        damping = sparse.kron(sparse.diags(-rates), sparse.identity(2 * Mx + 1))
        self._linear = (stream + damping).tocsc()
        self._raise = sparse.diags([np.ones(N)], [-1], shape=(N + 1, N + 1))
        self.identity = sparse.identity(self.size, dtype=complex, format="csc")

    def matrix(self, ehat: np.ndarray) -> sparse.csc_matrix:
        coupling = sparse.csr_matrix(-field_coupling_matrix(ehat, self.dealias))
        return (self._linear + sparse.kron(self._raise, coupling)).tocsc()

    def trapezoidal_solve(self, old: np.ndarray, ehat: np.ndarray, dt: float) -> np.ndarray:
        """Solve (I - dt/2 A) x = (I + dt/2 A) old."""
        generator = self.matrix(ehat)
        half = 0.5 * dt
        rhs = old + half * (generator @ old)
        new = spsolve((self.identity - half * generator).tocsc(), rhs)
        if not np.all(np.isfinite(new)):
            raise SingularUpdateError("trapezoidal Vlasov-Poisson system is singular")
        return new


# =============================================================================
# Time step
# =============================================================================


def vp_step(
    state: CoefficientField,
    cfg: VPConfig,
    lb: Optional[LBOperator] = None,
    E_prev: Optional[ElectricField] = None,  # noqa: N803
    dt: Optional[float] = None,
    operator: Optional[VlasovPoissonOperator] = None,
) -> tuple[CoefficientField, ElectricField, PicardStats]:
    """
    One trapezoidal step with Picard resolution of the midpoint field.

    Raises PicardNonConvergenceError when picard_max sweeps do not bring the
    coefficient change under picard_tol.
    """
    dt = cfg.resolved_dt if dt is None else dt
    if dt < 0:
        raise ValueError(f"time step must be non-negative, got {dt}")
    if E_prev is None:
        E_prev = poisson_solve(state.Chat[:, 0], state.Lx)
    if dt == 0:
        return state, E_prev, PicardStats(iterations=0, residual=0.0, converged=True)
    operator = operator or VlasovPoissonOperator(state.N, state.Mx, state.Lx, lb, cfg.dealias)
    explicit = cfg.field_treatment == FieldTreatment.EXPLICIT
    old = flatten(state.Chat)
    current, E_current = state, E_prev
    residual = float("inf")
    for iteration in range(1, cfg.picard_max + 1):
        ehat_mid = E_prev.Ehat if explicit else 0.5 * (E_prev.Ehat + E_current.Ehat)
        new = operator.trapezoidal_solve(old, ehat_mid, dt)
        candidate = state.with_chat(unflatten(new, state.Mx, state.N)).symmetrized()
        residual = float(np.max(np.abs(candidate.Chat - current.Chat)))
        current = candidate
        E_current = poisson_solve(candidate.Chat[:, 0], state.Lx, warn=False)
        logger.debug(f"Picard iteration {iteration}: residual {residual:.3e}")
        if explicit or residual < cfg.picard_tol:
            if iteration > PICARD_WARN_FRACTION * cfg.picard_max:
                logger.warning(
                    f"Picard needed {iteration}/{cfg.picard_max} iterations; consider a smaller dt"
                )
            return current, E_current, PicardStats(
                iterations=iteration, residual=residual, converged=True
            )
    raise PicardNonConvergenceError(cfg.picard_max, residual, cfg.picard_tol)


# =============================================================================
# Driver
# =============================================================================


class VlasovPoissonSolver:
    """
    Runs a configured Vlasov-Poisson simulation.

    Emits one DiagnosticsRecord per `record_every` steps into the sink, writes
    coefficient snapshots when snapshot_every > 0, and logs (but never enforces)
    the advisory time-step bounds.
    """

    def __init__(self, cfg: VPConfig, deterministic: bool = False):
        self.cfg = cfg
        self.deterministic = deterministic
        self.basis = HermiteBasis.build(BasisKind.AW, cfg.N)
        self.lb = build_lb(BasisKind.AW, cfg.k, cfg.nu, cfg.N) if cfg.lb else None
        self.operator = VlasovPoissonOperator(cfg.N, cfg.Mx, cfg.Lx, self.lb, cfg.dealias)
        self.dt = cfg.resolved_dt
        self.bound_violations = 0

    def initial_state(self) -> CoefficientField:
        return build_initial_state(self.cfg, self.basis)

    def step(
        self, state: CoefficientField, E: ElectricField  # noqa: N803
    ) -> tuple[CoefficientField, ElectricField, PicardStats]:
        return vp_step(state, self.cfg, self.lb, E_prev=E, dt=self.dt, operator=self.operator)

    def _check_bounds(self, step: int, E: ElectricField) -> None:  # noqa: N803
        estimate = field_max_estimate(E, self.cfg.Lx)
        bounds = stability_bounds(estimate.direct, self.cfg.nu, self.cfg.N)
        if self.dt > bounds.dt_max:
            self.bound_violations += 1
            if self.bound_violations == 1:
                logger.warning(
                    f"Step {step}: dt={self.dt:.4g} exceeds the advisory bound "
                    f"{bounds.dt_max:.4g} (M={estimate.direct:.3g}); continuing"
                )

    def run(
        self,
        state: Optional[CoefficientField] = None,
        steps: Optional[int] = None,
        sink=None,
        snapshot_dir: Optional[Path] = None,
        on_step: Optional[Callable[[int], None]] = None,
    ) -> tuple[CoefficientField, ElectricField]:
        state = state if state is not None else self.initial_state()
        steps = self.cfg.steps if steps is None else steps
        E = poisson_solve(state.Chat[:, 0], state.Lx)  # noqa: N806
        stats = PicardStats()
        logger.info(
            f"Vlasov-Poisson run: N={self.cfg.N}, Mx={self.cfg.Mx}, k={self.cfg.k}, "
            f"nu={self.cfg.nu}, dt={self.dt:.4g}, steps={steps}"
        )
        self._emit(0, state, E, stats, sink, snapshot_dir)
        for j in range(1, steps + 1):
            self._check_bounds(j, E)
            state, E, stats = self.step(state, E)  # noqa: N806
            self._emit(j, state, E, stats, sink, snapshot_dir)
            if on_step is not None:
                on_step(j)
        if self.bound_violations:
            logger.warning(f"{self.bound_violations} steps exceeded the advisory dt bounds")
        logger.info(f"Finished at t={steps * self.dt:.6g}")
        return state, E

    def _emit(self, step, state, E, stats, sink, snapshot_dir) -> None:  # noqa: N803
        t = step * self.dt
        if sink is not None and step % self.cfg.record_every == 0:
            sink.append(
                vp_record(step, t, state, E, stats, self.cfg.nu, fixed_order=self.deterministic)
            )
        every = self.cfg.snapshot_every
        if snapshot_dir is not None and every and step % every == 0:
            suffix = "bin" if self.cfg.snapshot_format == SnapshotFormat.BINARY else "txt"
            path = Path(snapshot_dir) / f"snapshot_{step:06d}.{suffix}"
            write_snapshot(state, t, path, self.cfg.snapshot_format)
