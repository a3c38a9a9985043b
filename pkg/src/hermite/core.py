"""
Hermite polynomial machinery for the AW and SW velocity bases.

Physicists' Hermite polynomials H_n satisfy

    H_0 = 1,  H_1 = 2v,  H_{n+1} = 2v H_n - 2n H_{n-1}
    int H_n^2 e^{-v^2} dv = sqrt(pi) 2^n n!
    H_n^{(m)} = 2^m n!/(n-m)! H_{n-m}

and the two basis families built on them are

    AW:  psi_n = gamma_n H_n e^{-v^2},    psi^n = gamma~_n H_n
    SW:  psi_n = gamma_n H_n e^{-v^2/2},  psi^n = gamma~_n H_n e^{-v^2/2}

with <psi_n, psi^m> = delta_nm. A CoefficientVector holds either the
polynomial coefficients C_n (what multiplies H_n) or the normalized ones
C_n* = C_n / gamma_n (what multiplies psi_n); every public function says which
one it reads.

Factorial-bearing constants are built as running products so nothing is formed
as a raw factorial. The truncation degree is capped (HERMITE_KINETICS_MAX_DEGREE,
default 128) because 2^n n! leaves double range near n = 150.

Usage:
    from src.hermite.core import HermiteBasis, project, weighted_norm_sq
    from src.models import BasisKind

    basis = HermiteBasis.build(BasisKind.AW, N=8)
    c = project(lambda v: np.exp(-v**2), basis)
    print(c.values)              # [1, 0, 0, ...]
    print(weighted_norm_sq(c))   # sqrt(pi)
"""
from __future__ import annotations

import logging
import math
import os
from dataclasses import dataclass
from typing import Callable, Union

import numpy as np
from scipy.linalg import eigh_tridiagonal

from src.errors import BasisMismatchError, HermiteOverflowError, InsufficientQuadratureError
from src.models import BasisKind, CoefficientConvention

logger = logging.getLogger(__name__)

SQRT_PI = math.sqrt(math.pi)
DEFAULT_MAX_DEGREE = 128
QUADRATURE_PADDING = 8

ArrayLike = Union[float, np.ndarray]


def max_degree() -> int:
    """Largest truncation degree a basis may be built with."""
    return int(os.getenv("HERMITE_KINETICS_MAX_DEGREE", str(DEFAULT_MAX_DEGREE)))


# =============================================================================
# Polynomials and Constants
# =============================================================================


def hermite_eval(n: int, v: ArrayLike) -> ArrayLike:
    """H_n(v) by forward three-term recursion. Accepts scalars or arrays."""
    if n < 0:
        raise ValueError(f"Hermite degree must be non-negative, got {n}")
    v_arr = np.asarray(v, dtype=float)
    prev = np.ones_like(v_arr)
    if n == 0:
        return float(prev) if prev.ndim == 0 else prev
    curr = 2.0 * v_arr
    for j in range(1, n):
        prev, curr = curr, 2.0 * v_arr * curr - 2.0 * j * prev
    return float(curr) if curr.ndim == 0 else curr


def hermite_table(N: int, v: np.ndarray) -> np.ndarray:
    """Rows H_0(v)..H_N(v); shape (N+1, len(v))."""
    v = np.asarray(v, dtype=float)
    table = np.empty((N + 1,) + v.shape)
    table[0] = 1.0
    if N >= 1:
        table[1] = 2.0 * v
    for j in range(1, N):
        table[j + 1] = 2.0 * v * table[j] - 2.0 * j * table[j - 1]
    return table


def orthonormal_hermite_table(N: int, v: np.ndarray) -> np.ndarray:
    """
    Rows p_n(v) = H_n(v) / sqrt(sqrt(pi) 2^n n!), orthonormal under e^{-v^2}.

    Uses the normalized recursion
        p_{n+1} = sqrt(2/(n+1)) v p_n - sqrt(n/(n+1)) p_{n-1}
    which stays in range where the raw H_n would not.
    """
    v = np.asarray(v, dtype=float)
    table = np.empty((N + 1,) + v.shape)
    table[0] = math.pi ** -0.25
    if N >= 1:
        table[1] = math.sqrt(2.0) * v * table[0]
    for j in range(1, N):
        table[j + 1] = (
            math.sqrt(2.0 / (j + 1)) * v * table[j] - math.sqrt(j / (j + 1)) * table[j - 1]
        )
    return table


def norm_sq_table(N: int) -> np.ndarray:
    """sqrt(pi) 2^n n! for n = 0..N, as a running product."""
    out = np.empty(N + 1)
    out[0] = SQRT_PI
    for n in range(1, N + 1):
        out[n] = out[n - 1] * 2.0 * n
    if not np.all(np.isfinite(out)):
        first = int(np.argmin(np.isfinite(out)))
        raise HermiteOverflowError(f"sqrt(pi) 2^n n! overflows at n={first}")
    return out


def hermite_norm_sq(n: int) -> float:
    """int H_n^2 e^{-v^2} dv = sqrt(pi) 2^n n!."""
    if n < 0:
        raise ValueError(f"Hermite degree must be non-negative, got {n}")
    return float(norm_sq_table(n)[n])


def hermite_derivative_coeffs(n: int, m: int) -> float:
    """Factor mapping H_n to H_{n-m} under m-fold differentiation (0 when n < m)."""
    if n < 0 or m < 0:
        raise ValueError(f"degree and order must be non-negative, got n={n}, m={m}")
    if n < m:
        return 0.0
    factor = 1.0
    for j in range(n - m + 1, n + 1):
        factor *= 2.0 * j
    if not math.isfinite(factor):
        raise HermiteOverflowError(f"2^m n!/(n-m)! overflows for n={n}, m={m}")
    return factor


def sw_gammas(N: int) -> np.ndarray:
    # (sqrt(pi) 2^n n!)^{-1/2}
    out = np.empty(N + 1)
    out[0] = math.pi ** -0.25
    for n in range(1, N + 1):
        out[n] = out[n - 1] / math.sqrt(2.0 * n)
    return out


def aw_dual_gammas(N: int) -> np.ndarray:
    # (2^n n!)^{-1/2}
    out = np.empty(N + 1)
    out[0] = 1.0
    for n in range(1, N + 1):
        out[n] = out[n - 1] / math.sqrt(2.0 * n)
    return out


# =============================================================================
# Basis and Coefficients
# =============================================================================


@dataclass(frozen=True, eq=False)
class HermiteBasis:
    """
    A truncated Hermite basis with its normalization constants.

    Attributes:
        kind: AW or SW
        N: Maximum Hermite index
        gammas: gamma_0..gamma_N (primal normalization)
        dual_gammas: gamma~_0..gamma~_N (dual normalization)
    """

    kind: BasisKind
    N: int
    gammas: np.ndarray
    dual_gammas: np.ndarray

    @classmethod
    def build(cls, kind: BasisKind, N: int) -> HermiteBasis:
        if N < 0:
            raise ValueError(f"Truncation degree must be non-negative, got {N}")
        if N > max_degree():
            raise HermiteOverflowError(
                f"Truncation N={N} exceeds the supported cap {max_degree()} "
                "(set HERMITE_KINETICS_MAX_DEGREE to change it)"
            )
        kind = BasisKind(kind)
        if kind == BasisKind.SW:
            gammas = sw_gammas(N)
            dual = gammas.copy()
        else:
            dual = aw_dual_gammas(N)
            gammas = dual / SQRT_PI
        gammas.setflags(write=False)
        dual.setflags(write=False)
        return cls(kind=kind, N=N, gammas=gammas, dual_gammas=dual)

    @property
    def size(self) -> int:
        return self.N + 1

    def weight(self, v: ArrayLike) -> ArrayLike:
        """Weight multiplying the polynomial part of f: e^{-v^2} (AW) or e^{-v^2/2} (SW)."""
        v = np.asarray(v, dtype=float)
        return np.exp(-(v**2)) if self.kind == BasisKind.AW else np.exp(-0.5 * v**2)

    def matches(self, other: HermiteBasis) -> bool:
        return self.kind == other.kind and self.N == other.N

    def psi(self, n: int, v: ArrayLike) -> ArrayLike:
        """Primal basis function psi_n(v)."""
        return self.gammas[n] * hermite_eval(n, v) * self.weight(v)

    def dual_psi(self, n: int, v: ArrayLike) -> ArrayLike:
        """Dual basis function psi^n(v)."""
        dual_weight = 1.0 if self.kind == BasisKind.AW else np.exp(-0.5 * np.asarray(v) ** 2)
        return self.dual_gammas[n] * hermite_eval(n, v) * dual_weight


@dataclass(frozen=True, eq=False)
class CoefficientVector:
    """Hermite-mode coefficients of a 1-D velocity distribution."""

    basis: HermiteBasis
    values: np.ndarray
    convention: CoefficientConvention = CoefficientConvention.POLYNOMIAL

    def __post_init__(self) -> None:
        values = np.array(self.values, dtype=float)
        if values.shape != (self.basis.size,):
            raise BasisMismatchError(
                f"expected {self.basis.size} coefficients for N={self.basis.N}, "
                f"got shape {values.shape}"
            )
        values.setflags(write=False)
        object.__setattr__(self, "values", values)

    @classmethod
    def zeros(cls, basis: HermiteBasis) -> CoefficientVector:
        return cls(basis, np.zeros(basis.size))

    @property
    def N(self) -> int:
        return self.basis.N

    @property
    def polynomial_values(self) -> np.ndarray:
        """C_n regardless of the stored convention."""
        if self.convention == CoefficientConvention.POLYNOMIAL:
            return self.values
        return self.values * self.basis.gammas

    @property
    def normalized_values(self) -> np.ndarray:
        """C_n* = C_n / gamma_n regardless of the stored convention."""
        if self.convention == CoefficientConvention.NORMALIZED:
            return self.values
        return self.values / self.basis.gammas

    def to_polynomial(self) -> CoefficientVector:
        return CoefficientVector(self.basis, self.polynomial_values)

    def to_normalized(self) -> CoefficientVector:
        return CoefficientVector(
            self.basis, self.normalized_values, CoefficientConvention.NORMALIZED
        )

    def with_values(self, values: np.ndarray) -> CoefficientVector:
        """Same basis and convention, new numbers."""
        return CoefficientVector(self.basis, values, self.convention)

    def in_convention(self, values: np.ndarray) -> CoefficientVector:
        """Wrap polynomial-convention values in this vector's convention."""
        if self.convention == CoefficientConvention.POLYNOMIAL:
            return CoefficientVector(self.basis, values)
        return CoefficientVector(
            self.basis, np.asarray(values) / self.basis.gammas, CoefficientConvention.NORMALIZED
        )


# =============================================================================
# Quadrature
# =============================================================================


@dataclass(frozen=True, eq=False)
class QuadratureRule:
    """Gauss-Hermite rule for integrals against e^{-v^2}."""

    nodes: np.ndarray
    weights: np.ndarray

    @property
    def Q(self) -> int:  # noqa: N802
        return len(self.nodes)

    def integrate(self, g: Callable[[np.ndarray], np.ndarray]) -> float:
        """int g(v) e^{-v^2} dv, exact for polynomials of degree <= 2Q-1."""
        return float(self.weights @ g(self.nodes))


def gauss_hermite(Q: int) -> QuadratureRule:  # noqa: N803
    """
    Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix of the
    recursion (zero diagonal, off-diagonal sqrt(j/2)); weights are
    sqrt(pi) times the squared first eigenvector components.
    """
    if Q < 1:
        raise ValueError(f"Quadrature needs at least one node, got Q={Q}")
    if Q == 1:
        return QuadratureRule(np.zeros(1), np.array([SQRT_PI]))
    off_diagonal = np.sqrt(np.arange(1, Q) / 2.0)
    nodes, vectors = eigh_tridiagonal(np.zeros(Q), off_diagonal)
    weights = SQRT_PI * vectors[0, :] ** 2
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return QuadratureRule(nodes=nodes, weights=weights)


def default_quadrature(basis: HermiteBasis) -> QuadratureRule:
    return gauss_hermite(basis.N + QUADRATURE_PADDING)


# =============================================================================
# Projection and Norms
# =============================================================================


def project(
    f: Callable[[np.ndarray], np.ndarray],
    basis: HermiteBasis,
    quad: QuadratureRule | None = None,
    convention: CoefficientConvention = CoefficientConvention.POLYNOMIAL,
) -> CoefficientVector:
    """
    Project f(v) onto the truncated basis.

    C_n = 1/(sqrt(pi) 2^n n!) int h H_n e^{-v^2} dv with h = f e^{v^2} (AW) or
    h = f e^{v^2/2} (SW), evaluated with Gauss-Hermite quadrature.
    """
    quad = quad or default_quadrature(basis)
    if quad.Q <= basis.N:
        raise InsufficientQuadratureError(
            f"Quadrature with Q={quad.Q} nodes cannot resolve N={basis.N}; need Q >= N+1"
        )
    v = quad.nodes
    h = np.asarray(f(v), dtype=float) / basis.weight(v)
    p = orthonormal_hermite_table(basis.N, v)
    # C_n = gamma^SW_n * sum_i w_i h(v_i) p_n(v_i)
    values = sw_gammas(basis.N) * (p @ (quad.weights * h))
    c = CoefficientVector(basis, values)
    return c if convention == CoefficientConvention.POLYNOMIAL else c.to_normalized()


def weighted_norm_sq(c: CoefficientVector) -> float:
    """sum_n C_n^2 sqrt(pi) 2^n n!, the e^{-v^2}-weighted L2 norm of the polynomial part."""
    p = c.polynomial_values
    return float(np.sum(p**2 * norm_sq_table(c.N)))


def reconstruct(c: CoefficientVector, v: ArrayLike) -> np.ndarray:
    """Evaluate the truncated expansion f(v) = sum C_n H_n(v) * weight(v)."""
    v = np.asarray(v, dtype=float)
    return c.polynomial_values @ hermite_table(c.N, v) * c.basis.weight(v)


def derivative(c: CoefficientVector, m: int = 1) -> CoefficientVector:
    """Polynomial coefficients of phi^{(m)} where phi = sum C_n H_n."""
    p = c.polynomial_values
    out = np.zeros_like(p)
    for n in range(m, c.N + 1):
        out[n - m] = hermite_derivative_coeffs(n, m) * p[n]
    return CoefficientVector(c.basis, out)


def multiply_by_v(values: np.ndarray) -> np.ndarray:
    """
    Coefficients of v * phi (one degree higher), from v H_n = n H_{n-1} + H_{n+1}/2.
    """
    values = np.asarray(values, dtype=float)
    n = np.arange(values.size)
    out = np.zeros(values.size + 1)
    out[:-2] += n[1:] * values[1:]
    out[1:] += 0.5 * values
    return out
