"""
Lenard-Bernstein operators of order 2k on the Hermite bases.

With L = 1/2 d/dv + v, L* = d/dv (AW) or L = d/dv + v, L* = d/dv - v (SW), the
composition (L*)^k L^k is diagonal on psi_n:

    AW:  (L*)^k L^k psi_n = (-1)^k n!/(n-k)! psi_n
    SW:  (L*)^k L^k psi_n = (-1)^k 2^k n!/(n-k)! psi_n

and vanishes for n < k. The stabilizing term -(-1)^k nu (L*)^k L^k therefore
decays mode n at rate nu (-1)^k lambda_n >= 0. On the AW basis it leaves the
velocity moments of order < k untouched; on the SW basis physical moments are
not conserved at all, and asking for them raises UnsupportedBasisError.

mode_space_factors() rebuilds L and L* from d/dv H_n = 2n H_{n-1} and
2v H_n = 2n H_{n-1} + H_{n+1}, which lets the tests check the eigenvalue table
against a first-principles composition.

Usage:
    from src.operators.lenard_bernstein import build_lb, apply_lb

    op = build_lb(BasisKind.AW, k=2, nu=1.0, N=5)
    print(op.eigenvalues)   # [0, 0, 2, 6, 12, 20]
"""
from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from src.errors import BasisMismatchError, HermiteOverflowError, UnsupportedBasisError
from src.hermite.core import CoefficientVector
from src.models import BasisKind

logger = logging.getLogger(__name__)


@dataclass(frozen=True, eq=False)
class LBOperator:
    """
    Diagonal action of (L*)^k L^k on a truncated basis.

    Attributes:
        basis_kind: AW or SW
        k: Order parameter (operator of order 2k)
        nu: Viscosity
        N: Truncation degree
        eigenvalues: lambda_0..lambda_N
    """

    basis_kind: BasisKind
    k: int
    nu: float
    N: int
    eigenvalues: np.ndarray

    @property
    def sign(self) -> int:
        return -1 if self.k % 2 else 1

    @property
    def decay_rates(self) -> np.ndarray:
        """nu (-1)^k lambda_n, non-negative; mode n evolves as exp(-rate t)."""
        return self.nu * self.sign * self.eigenvalues

    @property
    def kernel(self) -> list[int]:
        return [n for n in range(self.N + 1) if self.eigenvalues[n] == 0.0]


def _eigenvalue(kind: BasisKind, k: int, n: int) -> float:
    if n < k:
        return 0.0
    # k consecutive integers n-k+1..n, exact in integer arithmetic
    falling = math.prod(range(n - k + 1, n + 1))
    if kind == BasisKind.SW:
        falling *= 2**k
    try:
        magnitude = float(falling)
    except OverflowError as exc:
        raise HermiteOverflowError(
            f"LB eigenvalue for n={n}, k={k} ({kind.value}) exceeds double range"
        ) from exc
    return -magnitude if k % 2 else magnitude


def build_lb(basis_kind: BasisKind, k: int, nu: float, N: int) -> LBOperator:  # noqa: N803
    """Build the eigenvalue table of (L*)^k L^k for modes 0..N."""
    basis_kind = BasisKind(basis_kind)
    if k < 1:
        raise ValueError(f"LB order k must be >= 1, got {k}")
    if nu <= 0:
        raise ValueError(f"viscosity nu must be positive, got {nu}")
    if N < 0:
        raise ValueError(f"truncation N must be non-negative, got {N}")
    eigenvalues = np.array([_eigenvalue(basis_kind, k, n) for n in range(N + 1)])
    eigenvalues.setflags(write=False)
    logger.debug(f"Built {basis_kind.value} LB operator k={k}, nu={nu}, N={N}")
    return LBOperator(basis_kind=basis_kind, k=k, nu=float(nu), N=N, eigenvalues=eigenvalues)


def apply_lb(op: LBOperator, c: CoefficientVector) -> CoefficientVector:
    """
    D_n = lambda_n C_n, returned in the convention of c.

    The action is diagonal, so the C_n and C_n* conventions give the same
    coefficients up to the conversion itself.
    """
    if c.basis.kind != op.basis_kind or c.N != op.N:
        raise BasisMismatchError(
            f"LB operator is {op.basis_kind.value} with N={op.N}, "
            f"coefficients are {c.basis.kind.value} with N={c.N}"
        )
    return c.with_values(op.eigenvalues * c.values)


def annihilated_moments(op: LBOperator) -> list[int]:
    """Velocity moment orders m with d/dt int v^m f dv = 0 under the LB term (AW only)."""
    if op.basis_kind != BasisKind.AW:
        raise UnsupportedBasisError(
            "physical velocity moments are not conserved by the SW Lenard-Bernstein operator"
        )
    return list(range(op.k))


# =============================================================================
# First-principles construction
# =============================================================================


def mode_space_factors(
    basis_kind: BasisKind, N: int  # noqa: N803
) -> tuple[np.ndarray, np.ndarray]:
    """
    Matrices of L and L* acting on polynomial-part coefficients (size N+1).

    AW: f = h e^{-v^2};  L f = (h'/2) e^{-v^2},  L* g e^{-v^2} = (g' - 2v g) e^{-v^2}
    SW: f = h e^{-v^2/2}; L f = h' e^{-v^2/2},  L* g e^{-v^2/2} = (g' - 2v g) e^{-v^2/2}

    so L maps H_n to n H_{n-1} (AW) or 2n H_{n-1} (SW), and L* maps H_n to -H_{n+1}.
    """
    size = N + 1
    n = np.arange(1, size)
    scale = 1.0 if BasisKind(basis_kind) == BasisKind.AW else 2.0
    lower = np.zeros((size, size))
    lower[n - 1, n] = scale * n
    raise_op = np.zeros((size, size))
    raise_op[n, n - 1] = -1.0
    return lower, raise_op


def compose_lb(basis_kind: BasisKind, k: int, N: int) -> np.ndarray:  # noqa: N803
    """(L*)^k L^k as an explicit matrix on polynomial coefficients."""
    lower, raise_op = mode_space_factors(basis_kind, N)
    return np.linalg.matrix_power(raise_op, k) @ np.linalg.matrix_power(lower, k)


def lb_table_rows(basis_kind: BasisKind, k: int, N: int) -> list[dict[str, Any]]:  # noqa: N803
    """Rows (n, lambda_n, conserved-moment marker) with overflow reported per row."""
    basis_kind = BasisKind(basis_kind)
    rows = []
    for n in range(N + 1):
        row: dict[str, Any] = {"n": n, "eigenvalue": None, "overflow": False}
        try:
            row["eigenvalue"] = _eigenvalue(basis_kind, k, n)
        except HermiteOverflowError:
            row["overflow"] = True
        row["annihilated_moment"] = basis_kind == BasisKind.AW and n < k
        rows.append(row)
    return rows
