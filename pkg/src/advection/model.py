"""
The 1-D model problem df/dt - df/dv = -(-1)^k nu (L*)^k L^k f in coefficient space.

Galerkin projection gives, in the polynomial convention C_n,

    SW:  dC_n/dt = (n+1) C_{n+1} - 1/2 C_{n-1}         (C_{N+1} = 0)
    AW:  dC_n/dt = -C_{n-1} - nu (-1)^k lambda_n C_n,   dC_0/dt = 0

For SW the n = 0 row keeps its (n+1) C_{n+1} = C_1 term. Dropping it
(freeze_mean=True) reproduces the "dC_0/dt = 0" variant, which is only
norm-preserving while C_0 = 0.

Closed forms:
    no LB:       C_n(t) = sum_l C_{n-l,0} (-t)^l / l!
    k = 1:       C_n(t) = sum_{l<=n} alpha_l^(n) e^{-l nu t}
                 alpha_l^(n) = -alpha_l^(n-1) / (nu (n-l)),  l < n
                 alpha_n^(n) = C_{n,0} - sum_{l<n} alpha_l^(n)
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from src.errors import BasisMismatchError, UnsupportedBasisError, UnsupportedOrderError
from src.hermite.core import CoefficientVector, HermiteBasis
from src.models import BasisKind
from src.operators.lenard_bernstein import LBOperator


# =============================================================================
# System
# =============================================================================


@dataclass(frozen=True, eq=False)
class AdvectionSystem:
    """
    Semi-discrete advection system on one basis.

    Attributes:
        basis_kind: AW or SW
        N: Truncation degree
        initial: C_{n,0}
        lb: Optional stabilization; None means pure advection
        freeze_mean: SW only, force dC_0/dt = 0
    """

    basis_kind: BasisKind
    N: int
    initial: CoefficientVector
    lb: Optional[LBOperator] = None
    freeze_mean: bool = False

    def __post_init__(self) -> None:
        if self.initial.basis.kind != self.basis_kind or self.initial.N != self.N:
            raise BasisMismatchError(
                f"initial data lives on {self.initial.basis.kind.value} N={self.initial.N}, "
                f"system is {self.basis_kind.value} N={self.N}"
            )
        if self.lb is not None and (self.lb.basis_kind != self.basis_kind or self.lb.N != self.N):
            raise BasisMismatchError(
                f"LB operator is {self.lb.basis_kind.value} N={self.lb.N}, "
                f"system is {self.basis_kind.value} N={self.N}"
            )
        if self.freeze_mean and self.basis_kind != BasisKind.SW:
            raise UnsupportedBasisError("freeze_mean only applies to the SW system")

    @classmethod
    def create(
        cls,
        initial: CoefficientVector,
        lb: Optional[LBOperator] = None,
        freeze_mean: bool = False,
    ) -> AdvectionSystem:
        return cls(initial.basis.kind, initial.N, initial.to_polynomial(), lb, freeze_mean)

    @property
    def basis(self) -> HermiteBasis:
        return self.initial.basis

    @property
    def decay_rates(self) -> np.ndarray:
        if self.lb is None:
            return np.zeros(self.N + 1)
        return self.lb.decay_rates

    def rhs(self, values: np.ndarray) -> np.ndarray:
        """dC/dt for polynomial-convention values."""
        c = CoefficientVector(self.basis, values)
        if self.basis_kind == BasisKind.SW:
            return rhs_sw(c, self.lb, self.freeze_mean).values
        return rhs_aw(c, self.lb).values

    def generator(self) -> np.ndarray:
        """Dense matrix A with dC/dt = A C."""
        return np.column_stack([self.rhs(e) for e in np.eye(self.N + 1)])


# =============================================================================
# Right-hand sides
# =============================================================================


def _lb_rates(c: CoefficientVector, lb: Optional[LBOperator]) -> np.ndarray:
    if lb is None:
        return np.zeros(c.N + 1)
    if lb.basis_kind != c.basis.kind or lb.N != c.N:
        raise BasisMismatchError(
            f"LB operator is {lb.basis_kind.value} N={lb.N}, coefficients are "
            f"{c.basis.kind.value} N={c.N}"
        )
    return lb.decay_rates


def rhs_sw(
    c: CoefficientVector,
    lb: Optional[LBOperator] = None,
    freeze_mean: bool = False,
) -> CoefficientVector:
    """dC_n/dt = (n+1) C_{n+1} - C_{n-1}/2 on the SW basis, returned in c's convention."""
    if c.basis.kind != BasisKind.SW:
        raise UnsupportedBasisError("rhs_sw needs SW coefficients")
    p = c.polynomial_values
    out = np.zeros_like(p)
    out[:-1] += np.arange(1, c.N + 1) * p[1:]
    out[1:] -= 0.5 * p[:-1]
    out -= _lb_rates(c, lb) * p
    if freeze_mean:
        out[0] = 0.0
    return c.in_convention(out)


def rhs_aw(c: CoefficientVector, lb: Optional[LBOperator] = None) -> CoefficientVector:
    """dC_n/dt = -C_{n-1} - nu (-1)^k lambda_n C_n on the AW basis, in c's convention."""
    if c.basis.kind != BasisKind.AW:
        raise UnsupportedBasisError("rhs_aw needs AW coefficients")
    p = c.polynomial_values
    out = np.zeros_like(p)
    out[1:] -= p[:-1]
    out -= _lb_rates(c, lb) * p
    return c.in_convention(out)


# =============================================================================
# Closed forms
# =============================================================================


def alpha_table(initial: CoefficientVector, nu: float) -> np.ndarray:
    """Lower-triangular alpha[n, l] of the k = 1 closed form."""
    if nu <= 0:
        raise ValueError(f"viscosity nu must be positive, got {nu}")
    c0 = initial.polynomial_values
    alpha = np.zeros((initial.N + 1, initial.N + 1))
    alpha[0, 0] = c0[0]
    for n in range(1, initial.N + 1):
        ell = np.arange(n)
        alpha[n, :n] = -alpha[n - 1, :n] / (nu * (n - ell))
        alpha[n, n] = c0[n] - alpha[n, :n].sum()
    return alpha


def closed_form_aw(
    initial: CoefficientVector,
    nu: float,
    t: float,
    k: int = 1,
) -> CoefficientVector:
    """C(t) of the stabilized AW system dC_n/dt = -C_{n-1} - nu n C_n."""
    if k != 1:
        raise UnsupportedOrderError(f"closed form is only available for k=1, got k={k}")
    if initial.basis.kind != BasisKind.AW:
        raise UnsupportedBasisError("closed_form_aw needs AW coefficients")
    alpha = alpha_table(initial, nu)
    decay = np.exp(-np.arange(initial.N + 1) * nu * t)
    return initial.in_convention(alpha @ decay)


def polynomial_solution_aw(initial: CoefficientVector, t: float) -> CoefficientVector:
    """C(t) of the unstabilized AW system: each C_n is a degree-n polynomial in t."""
    if initial.basis.kind != BasisKind.AW:
        raise UnsupportedBasisError("polynomial_solution_aw needs AW coefficients")
    c0 = initial.polynomial_values
    powers = np.array([(-t) ** ell / math.factorial(ell) for ell in range(initial.N + 1)])
    out = np.array([np.dot(c0[n::-1], powers[: n + 1]) for n in range(initial.N + 1)])
    return initial.in_convention(out)


def steady_state_aw(basis: HermiteBasis, c00: float, nu: float) -> CoefficientVector:
    """Fixed point of the k = 1 AW system: C_n = (-1/nu)^n C_00 / n!."""
    values = np.empty(basis.N + 1)
    values[0] = c00
    for n in range(1, basis.N + 1):
        values[n] = -values[n - 1] / (nu * n)
    return CoefficientVector(basis, values)


def classical_stability_offset(nu: float, c00: float) -> float:
    """
    K = (nu-1)/(nu-3/2) sqrt(pi) C_00^2. For nu > 3/2 the weighted norm minus K
    decays, so ||h(t)||^2 <= max(||h_0||^2, K).
    """
    if nu <= 1.5:
        raise ValueError(f"offset is only defined for nu > 3/2, got {nu}")
    return (nu - 1.0) / (nu - 1.5) * math.sqrt(math.pi) * c00**2
