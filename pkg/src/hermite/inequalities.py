"""
Checkable forms of the weighted inequalities satisfied by truncated Hermite
expansions phi = sum_{n<=N} C_n H_n (norms are e^{-v^2}-weighted L2):

    Poincare            ||phi||^2 <= 1/2 ||phi'||^2 + sqrt(pi) C_0^2
    generalized         ||phi||^2 <= ||phi^(m)||^2 / (2^m m!)
                                     + sqrt(pi) sum_{l<m} 2^l l! C_l^2
    derivative pair     ||phi^(p)||^2 <= ||phi^(m)||^2 / (2^(m-p) (m-p)!)
                                     + sum_{p<=n<m} ||(C_n H_n)^(p)||^2
    inverse             ||phi'||^2 <= 2N ||phi||^2
    second moment       ||v phi||^2 <= 3/4 N ||phi'||^2      (C_0 = 0, N >= 1)

Each function returns an InequalityCheck with both sides evaluated exactly from
the coefficients, so callers can compare against independent quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from src.hermite.core import (
    CoefficientVector,
    derivative,
    multiply_by_v,
    norm_sq_table,
    weighted_norm_sq,
)

RELATIVE_SLACK = 1e-12


@dataclass(frozen=True)
class InequalityCheck:
    """Both sides of an inequality lhs <= rhs."""

    name: str
    lhs: float
    rhs: float

    @property
    def holds(self) -> bool:
        return self.lhs <= self.rhs + RELATIVE_SLACK * max(abs(self.rhs), abs(self.lhs))

    @property
    def ratio(self) -> float:
        return self.lhs / self.rhs if self.rhs else math.inf


def _low_mode_energy(c: CoefficientVector, upto: int, order: int) -> float:
    # sum_{order <= n < upto} ||(C_n H_n)^(order)||^2 = sum 2^order n!/(n-order)! C_n^2 a_n
    p = c.polynomial_values
    norms = norm_sq_table(c.N)
    total = 0.0
    for n in range(order, min(upto, c.N + 1)):
        total += (2.0**order) * math.perm(n, order) * p[n] ** 2 * norms[n]
    return total


def poincare(c: CoefficientVector) -> InequalityCheck:
    lhs = weighted_norm_sq(c)
    rhs = 0.5 * weighted_norm_sq(derivative(c, 1))
    rhs += math.sqrt(math.pi) * c.polynomial_values[0] ** 2
    return InequalityCheck("poincare", lhs, rhs)


def generalized_poincare(c: CoefficientVector, m: int) -> InequalityCheck:
    if m < 1:
        raise ValueError(f"derivative order must be >= 1, got {m}")
    lhs = weighted_norm_sq(c)
    rhs = weighted_norm_sq(derivative(c, m)) / (2.0**m * math.factorial(m))
    rhs += _low_mode_energy(c, upto=m, order=0)
    return InequalityCheck(f"generalized_poincare[m={m}]", lhs, rhs)


def derivative_poincare(c: CoefficientVector, p: int, m: int) -> InequalityCheck:
    """Bound the p-th derivative by the m-th one, p < m."""
    if not 0 <= p < m:
        raise ValueError(f"need 0 <= p < m, got p={p}, m={m}")
    lhs = weighted_norm_sq(derivative(c, p)) if p else weighted_norm_sq(c)
    rhs = weighted_norm_sq(derivative(c, m)) / (2.0 ** (m - p) * math.factorial(m - p))
    rhs += _low_mode_energy(c, upto=m, order=p)
    return InequalityCheck(f"derivative_poincare[p={p},m={m}]", lhs, rhs)


def inverse_inequality(c: CoefficientVector) -> InequalityCheck:
    lhs = weighted_norm_sq(derivative(c, 1))
    rhs = 2.0 * c.N * weighted_norm_sq(c)
    return InequalityCheck("inverse", lhs, rhs)


def second_moment_inequality(c: CoefficientVector) -> InequalityCheck:
    """int v^2 phi^2 e^{-v^2} <= 3/4 N ||phi'||^2; requires C_0 = 0."""
    if c.polynomial_values[0] != 0.0:
        raise ValueError("second-moment inequality requires C_0 = 0")
    v_phi = multiply_by_v(c.polynomial_values)
    lhs = float(np.sum(v_phi**2 * norm_sq_table(c.N + 1)))
    rhs = 0.75 * c.N * weighted_norm_sq(derivative(c, 1))
    return InequalityCheck("second_moment", lhs, rhs)
